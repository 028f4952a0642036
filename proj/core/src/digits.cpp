#include "uplan/digits.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "uplan/errors.hpp"
#include "uplan/pi_base4.hpp"

namespace uplan {

std::string_view to_string(DigitSource source) {
  switch (source) {
    case DigitSource::kChampernowne: return "champernowne";
    case DigitSource::kPi4: return "pi4";
    case DigitSource::kPseudorandom: return "pseudorandom";
    case DigitSource::kFile: return "file";
  }
  return "unknown";
}

namespace {

__extension__ typedef unsigned __int128 u128;

void check_base(unsigned base) {
  if (base < 2) throw InvalidArgument("digit base must be at least 2");
}

void check_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("digit indices start at 1");
}

// Locates the numeral holding 0-based position `pos` of the Champernowne
// string: returns (numeral, its length, offset of the symbol in it).
struct ChampernownePosition {
  u128 numeral;
  unsigned length;
  unsigned offset;
};

ChampernownePosition locate_champernowne(unsigned base, std::uint64_t pos) {
  if (pos < base) return {pos, 1, 0};
  u128 rest = pos - base;
  unsigned length = 2;
  u128 first = base;                           // smallest numeral of this length
  u128 count = static_cast<u128>(base - 1) * base;  // numerals of this length
  while (rest >= count * length) {
    rest -= count * length;
    ++length;
    first *= base;
    count *= base;
  }
  return {first + rest / length, length, static_cast<unsigned>(rest % length)};
}

std::uint8_t numeral_symbol(u128 numeral, unsigned length, unsigned offset, unsigned base) {
  for (unsigned i = length - 1; i > offset; --i) numeral /= base;
  return static_cast<std::uint8_t>(numeral % base);
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return -1;
}

char digit_char(std::uint8_t d) {
  return d < 10 ? static_cast<char>('0' + d) : static_cast<char>('a' + d - 10);
}

}  // namespace

std::uint8_t champernowne_digit(unsigned base, std::uint64_t n) {
  check_base(base);
  check_index(n);
  const auto at = locate_champernowne(base, n - 1);
  return numeral_symbol(at.numeral, at.length, at.offset, base);
}

std::uint8_t pi_digit_base4(std::uint64_t n) { return Pi4Table::shared()->digit(n); }

std::uint8_t pseudorandom_digit(std::uint64_t seed, unsigned base, std::uint64_t n) {
  if (base < 2 || base > 256) throw InvalidArgument("pseudorandom base must lie in [2, 256]");
  // Largest multiple of base not exceeding 2^64; values at or above it are redrawn.
  const u128 span = u128(1) << 64;
  const u128 accept = span - span % base;
  std::uint64_t z = splitmix_finalize(seed ^ n);
  while (static_cast<u128>(z) >= accept) z = splitmix_finalize(z);
  return static_cast<std::uint8_t>(z % base);
}

namespace detail {

class DigitSourceImpl {
 public:
  DigitSourceImpl(DigitSource kind, unsigned base) : kind_(kind), base_(base) {}
  virtual ~DigitSourceImpl() = default;

  DigitSource kind() const { return kind_; }
  unsigned base() const { return base_; }
  virtual std::optional<std::uint64_t> limit() const { return std::nullopt; }
  virtual void read(std::uint64_t first, std::span<std::uint8_t> out) const = 0;
  virtual std::string describe() const = 0;

 private:
  DigitSource kind_;
  unsigned base_;
};

namespace {

class ChampernowneSource final : public DigitSourceImpl {
 public:
  explicit ChampernowneSource(unsigned base) : DigitSourceImpl(DigitSource::kChampernowne, base) {}

  void read(std::uint64_t first, std::span<std::uint8_t> out) const override {
    if (out.empty()) return;
    const unsigned b = base();
    auto at = locate_champernowne(b, first - 1);
    u128 numeral = at.numeral;
    unsigned length = at.length;
    u128 next_length_at = 1;
    for (unsigned i = 0; i < length; ++i) next_length_at *= b;
    std::array<std::uint8_t, 128> symbols{};
    auto expand = [&] {
      u128 v = numeral;
      for (unsigned i = length; i-- > 0;) {
        symbols[i] = static_cast<std::uint8_t>(v % b);
        v /= b;
      }
    };
    expand();
    unsigned offset = at.offset;
    for (auto& d : out) {
      d = symbols[offset];
      if (++offset == length) {
        offset = 0;
        ++numeral;
        if (numeral == next_length_at) {
          ++length;
          next_length_at *= b;
        }
        expand();
      }
    }
  }

  std::string describe() const override { return "champernowne(base=" + std::to_string(base()) + ")"; }
};

class PiSource final : public DigitSourceImpl {
 public:
  explicit PiSource(std::shared_ptr<Pi4Table> table)
      : DigitSourceImpl(DigitSource::kPi4, 4), table_(std::move(table)) {}

  std::optional<std::uint64_t> limit() const override { return table_->max_digits(); }
  void read(std::uint64_t first, std::span<std::uint8_t> out) const override { table_->read(first, out); }
  std::string describe() const override { return "pi4"; }

 private:
  std::shared_ptr<Pi4Table> table_;
};

class PseudorandomSource final : public DigitSourceImpl {
 public:
  PseudorandomSource(std::uint64_t seed, unsigned base)
      : DigitSourceImpl(DigitSource::kPseudorandom, base), seed_(seed) {}

  void read(std::uint64_t first, std::span<std::uint8_t> out) const override {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = pseudorandom_digit(seed_, base(), first + i);
  }

  std::string describe() const override {
    return "pseudorandom(seed=" + std::to_string(seed_) + ",base=" + std::to_string(base()) + ")";
  }

 private:
  std::uint64_t seed_;
};

class FileSource final : public DigitSourceImpl {
 public:
  FileSource(std::vector<std::uint8_t> digits, unsigned base, std::string origin)
      : DigitSourceImpl(DigitSource::kFile, base), digits_(std::move(digits)), origin_(std::move(origin)) {}

  std::optional<std::uint64_t> limit() const override { return digits_.size(); }

  void read(std::uint64_t first, std::span<std::uint8_t> out) const override {
    if (out.empty()) return;
    if (first - 1 + out.size() > digits_.size()) {
      throw ResourceLimit("digit " + std::to_string(first - 1 + out.size()) + " is past the end of " +
                          origin_ + " (" + std::to_string(digits_.size()) + " digits)");
    }
    std::copy_n(digits_.begin() + static_cast<std::ptrdiff_t>(first - 1), out.size(), out.begin());
  }

  std::string describe() const override { return "file(" + origin_ + ")"; }

 private:
  std::vector<std::uint8_t> digits_;
  std::string origin_;
};

std::vector<std::uint8_t> parse_digit_text(std::string_view text, unsigned base) {
  std::vector<std::uint8_t> digits;
  digits.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\n' || c == '\r' || c == '\t') continue;
    const int v = digit_value(c);
    if (v < 0 || static_cast<unsigned>(v) >= base) {
      throw InvalidArgument(std::string("invalid base-") + std::to_string(base) + " digit '" + c + "'");
    }
    digits.push_back(static_cast<std::uint8_t>(v));
  }
  return digits;
}

}  // namespace
}  // namespace detail

DigitStream::DigitStream(std::shared_ptr<const detail::DigitSourceImpl> impl) : impl_(std::move(impl)) {}

DigitStream DigitStream::champernowne(unsigned base) {
  check_base(base);
  if (base > 36) throw InvalidArgument("champernowne base must not exceed 36");
  return DigitStream(std::make_shared<detail::ChampernowneSource>(base));
}

DigitStream DigitStream::pi4() { return pi4(Pi4Table::shared()); }

DigitStream DigitStream::pi4(std::shared_ptr<Pi4Table> table) {
  return DigitStream(std::make_shared<detail::PiSource>(std::move(table)));
}

DigitStream DigitStream::pseudorandom(std::uint64_t seed, unsigned base) {
  if (base < 2 || base > 256) throw InvalidArgument("pseudorandom base must lie in [2, 256]");
  return DigitStream(std::make_shared<detail::PseudorandomSource>(seed, base));
}

DigitStream DigitStream::from_digits(std::string_view text, unsigned base) {
  check_base(base);
  return DigitStream(
      std::make_shared<detail::FileSource>(detail::parse_digit_text(text, base), base, "inline digits"));
}

DigitStream DigitStream::from_file(const std::filesystem::path& path, unsigned base) {
  check_base(base);
  std::ifstream is(path);
  if (!is) throw Error("cannot open digit file: " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return DigitStream(
      std::make_shared<detail::FileSource>(detail::parse_digit_text(text.str(), base), base, path.string()));
}

DigitSource DigitStream::kind() const { return impl_->kind(); }
unsigned DigitStream::base() const { return impl_->base(); }
std::optional<std::uint64_t> DigitStream::limit() const { return impl_->limit(); }
std::string DigitStream::describe() const { return impl_->describe(); }

std::uint8_t DigitStream::digit(std::uint64_t n) const {
  std::uint8_t d = 0;
  read(n, std::span<std::uint8_t>(&d, 1));
  return d;
}

void DigitStream::read(std::uint64_t first, std::span<std::uint8_t> out) const {
  check_index(first);
  if (out.empty()) return;
  if (const auto lim = limit(); lim && first - 1 + out.size() > *lim) {
    throw ResourceLimit("digit " + std::to_string(first - 1 + out.size()) + " exceeds the limit of " +
                        describe() + " (" + std::to_string(*lim) + ")");
  }
  impl_->read(first, out);
}

DigitCursor::DigitCursor(DigitStream stream, std::uint64_t first)
    : stream_(std::move(stream)), position_(first) {
  check_index(first);
}

void DigitCursor::reset(std::uint64_t first) {
  check_index(first);
  position_ = first;
}

void DigitCursor::refill() {
  std::size_t count = kBlock;
  if (const auto lim = stream_.limit()) {
    if (position_ > *lim) {
      throw ResourceLimit("digit " + std::to_string(position_) + " exceeds the limit of " +
                          stream_.describe() + " (" + std::to_string(*lim) + ")");
    }
    count = static_cast<std::size_t>(std::min<std::uint64_t>(count, *lim - position_ + 1));
  }
  stream_.read(position_, std::span<std::uint8_t>(buffer_.data(), count));
  buffer_first_ = position_;
  buffer_size_ = count;
}

std::uint8_t DigitCursor::next() {
  if (position_ < buffer_first_ || position_ >= buffer_first_ + buffer_size_) refill();
  return buffer_[position_++ - buffer_first_];
}

char action_letter(Action a) {
  switch (a) {
    case Action::kLeft: return 'L';
    case Action::kRight: return 'R';
    case Action::kUp: return 'U';
    case Action::kDown: return 'D';
  }
  return '?';
}

Action action_from_letter(char c) {
  switch (c) {
    case 'L': case 'l': return Action::kLeft;
    case 'R': case 'r': return Action::kRight;
    case 'U': case 'u': return Action::kUp;
    case 'D': case 'd': return Action::kDown;
    default: break;
  }
  throw InvalidArgument(std::string("unknown action letter '") + c + "'");
}

ActionMap::ActionMap() : table_(kAllActions.begin(), kAllActions.end()) {}

ActionMap::ActionMap(std::vector<Action> table) : table_(std::move(table)) {
  if (table_.empty()) throw InvalidArgument("action map needs at least one entry");
}

ActionMap ActionMap::parse(std::string_view letters) {
  std::vector<Action> table;
  for (char c : letters) table.push_back(action_from_letter(c));
  return ActionMap(std::move(table));
}

Action ActionMap::operator()(std::uint8_t digit) const {
  if (digit >= table_.size()) {
    throw InvalidArgument("digit " + std::to_string(digit) + " is outside the action map domain");
  }
  return table_[digit];
}

bool ActionMap::is_bijective() const {
  if (table_.size() != 4) return false;
  std::array<bool, 4> seen{};
  for (Action a : table_) seen[static_cast<int>(a)] = true;
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::string ActionMap::to_string() const {
  std::string s;
  for (Action a : table_) s.push_back(action_letter(a));
  return s;
}

Vec2i map_digit_to_action(const ActionMap& map, std::uint8_t digit) { return unit_vector(map(digit)); }

std::map<std::string, double> block_frequency(const DigitStream& stream, unsigned k, std::uint64_t n) {
  if (k == 0) throw InvalidArgument("block length must be positive");
  if (n < k) throw InvalidArgument("prefix length must be at least the block length");
  const unsigned base = stream.base();
  std::uint64_t words = 1;
  for (unsigned i = 0; i < k; ++i) {
    words *= base;
    if (words > (1u << 24)) throw ResourceLimit("too many distinct words for block_frequency");
  }
  std::vector<std::uint64_t> counts(words, 0);
  DigitCursor cursor(stream, 1);
  std::uint64_t word = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    word = (word * base + cursor.next()) % words;
    if (i + 1 >= k) ++counts[word];
  }
  const double windows = static_cast<double>(n - k + 1);
  std::map<std::string, double> freq;
  for (std::uint64_t w = 0; w < words; ++w) {
    std::string key(k, '0');
    std::uint64_t v = w;
    for (unsigned i = k; i-- > 0;) {
      key[i] = digit_char(static_cast<std::uint8_t>(v % base));
      v /= base;
    }
    freq.emplace(std::move(key), static_cast<double>(counts[w]) / windows);
  }
  return freq;
}

}  // namespace uplan
