#include "uplan/pi_base4.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <mutex>
#include <string>

#include "uplan/errors.hpp"

namespace uplan {
namespace {

// Partial products for the series sum_k (-1)^k / ((2k+1) x^(2k)) over [a, b).
// The range sum equals T / (B * Q) and the running ratio product is P / Q.
struct Split {
  mpz_class p;
  mpz_class q;
  mpz_class b;
  mpz_class t;
};

void split_atan(std::uint64_t a, std::uint64_t b, const mpz_class& x2, Split& out) {
  if (b - a == 1) {
    out.p = a == 0 ? 1 : -1;
    out.q = a == 0 ? mpz_class(1) : x2;
    out.b = 2 * a + 1;
    out.t = out.p;
    return;
  }
  const std::uint64_t mid = a + (b - a) / 2;
  Split right;
  split_atan(a, mid, x2, out);
  split_atan(mid, b, x2, right);
  // T = B2 Q2 T1 + B1 P1 T2, evaluated before the products are overwritten.
  out.t = right.b * right.q * out.t + out.b * out.p * right.t;
  out.p *= right.p;
  out.q *= right.q;
  out.b *= right.b;
}

// floor(atan(1/x) * 2^prec), within 2 units of the exact scaled value.
mpz_class atan_inverse_fixed(unsigned long x, std::uint64_t prec) {
  const double log2x = std::log2(static_cast<double>(x));
  const auto terms = static_cast<std::uint64_t>(
      std::ceil((static_cast<double>(prec + 1) / log2x - 1.0) / 2.0) + 2);
  Split s;
  split_atan(0, terms, mpz_class(x) * x, s);
  mpz_class numer = s.t;
  numer <<= prec;
  mpz_class denom = s.b * s.q * x;
  mpz_class result;
  mpz_fdiv_q(result.get_mpz_t(), numer.get_mpz_t(), denom.get_mpz_t());
  return result;
}

constexpr std::array<char, 4> kCacheMagic = {'U', 'P', 'D', '4'};
constexpr std::uint32_t kCacheVersion = 1;

void put_le(std::ostream& os, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) {
    os.put(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw Error("digit cache: truncated header");
    value |= static_cast<std::uint64_t>(c & 0xff) << (8 * i);
  }
  return value;
}

}  // namespace

std::vector<std::uint8_t> compute_pi_base4(std::size_t count, unsigned guard_bits) {
  if (count == 0) return {};
  const std::uint64_t frac_bits = 2 * static_cast<std::uint64_t>(count - 1);
  // |V - pi 2^prec| < 16*2 + 4*2.
  const mpz_class error_bound = 40;
  for (unsigned guard = std::max(guard_bits, 8u);; guard += 32) {
    const std::uint64_t prec = frac_bits + guard;
    const mpz_class v = 16 * atan_inverse_fixed(5, prec) - 4 * atan_inverse_fixed(239, prec);
    mpz_class lo = v - error_bound;
    mpz_class hi = v + error_bound;
    lo >>= guard;
    hi >>= guard;
    if (lo != hi) continue;
    const std::string text = lo.get_str(4);
    if (text.size() != count) throw Error("pi computation produced an unexpected digit count");
    std::vector<std::uint8_t> digits(count);
    std::transform(text.begin(), text.end(), digits.begin(),
                   [](char c) { return static_cast<std::uint8_t>(c - '0'); });
    return digits;
  }
}

void write_digit_cache(const std::filesystem::path& path, std::span<const std::uint8_t> digits) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open digit cache for writing: " + path.string());
  os.write(kCacheMagic.data(), kCacheMagic.size());
  put_le(os, kCacheVersion, 4);
  put_le(os, digits.size(), 8);
  std::vector<char> packed((digits.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (digits[i] > 3) throw InvalidArgument("digit cache holds base-4 digits only");
    packed[i / 4] = static_cast<char>(packed[i / 4] | (digits[i] << (2 * (i % 4))));
  }
  os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
  if (!os) throw Error("failed writing digit cache: " + path.string());
}

std::vector<std::uint8_t> read_digit_cache(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open digit cache: " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kCacheMagic) throw Error("digit cache: bad magic in " + path.string());
  const auto version = get_le(is, 4);
  if (version != kCacheVersion) throw Error("digit cache: unsupported version");
  const auto count = get_le(is, 8);
  std::vector<char> packed((count + 3) / 4);
  is.read(packed.data(), static_cast<std::streamsize>(packed.size()));
  if (static_cast<std::size_t>(is.gcount()) != packed.size()) {
    throw Error("digit cache: truncated payload in " + path.string());
  }
  std::vector<std::uint8_t> digits(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    digits[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(packed[i / 4]) >> (2 * (i % 4))) & 3);
  }
  return digits;
}

Pi4Table::Pi4Table(std::uint64_t max_digits, std::filesystem::path cache_dir)
    : max_digits_(max_digits), cache_dir_(std::move(cache_dir)) {}

std::shared_ptr<Pi4Table> Pi4Table::shared() {
  static const std::shared_ptr<Pi4Table> table = [] {
    std::uint64_t limit = kDefaultPiDigitLimit;
    if (const char* env = std::getenv("UPLAN_PI_MAX_DIGITS"); env != nullptr && *env != '\0') {
      limit = std::stoull(env);
    }
    std::filesystem::path dir;
    if (const char* env = std::getenv("UPLAN_DIGIT_CACHE"); env != nullptr && *env != '\0') {
      dir = env;
    }
    return std::make_shared<Pi4Table>(limit, dir);
  }();
  return table;
}

std::uint64_t Pi4Table::available() const {
  std::shared_lock lock(mutex_);
  return digits_.size();
}

std::filesystem::path Pi4Table::cache_file() const { return cache_dir_ / "pi4.upd"; }

void Pi4Table::ensure(std::uint64_t n) {
  if (n > max_digits_) {
    throw ResourceLimit("pi digit " + std::to_string(n) + " exceeds the configured maximum of " +
                        std::to_string(max_digits_));
  }
  {
    std::shared_lock lock(mutex_);
    if (digits_.size() >= n) return;
  }
  std::unique_lock lock(mutex_);
  if (digits_.size() >= n) return;

  if (!cache_dir_.empty()) {
    std::error_code ec;
    if (std::filesystem::exists(cache_file(), ec)) {
      try {
        auto cached = read_digit_cache(cache_file());
        if (cached.size() >= n) {
          if (cached.size() > max_digits_) cached.resize(max_digits_);
          digits_ = std::move(cached);
          return;
        }
      } catch (const Error&) {
        // Unreadable cache: recompute and overwrite below.
      }
    }
  }

  constexpr std::uint64_t kChunk = 1 << 16;
  std::uint64_t target = std::max({n + n / 4, 2 * static_cast<std::uint64_t>(digits_.size()), kChunk});
  target = (target + kChunk - 1) / kChunk * kChunk;
  target = std::min(target, max_digits_);
  digits_ = compute_pi_base4(target);

  if (!cache_dir_.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_dir_, ec);
    const auto tmp = cache_file().string() + ".tmp";
    try {
      write_digit_cache(tmp, digits_);
      std::filesystem::rename(tmp, cache_file(), ec);
    } catch (const Error&) {
      std::filesystem::remove(tmp, ec);
    }
  }
}

std::uint8_t Pi4Table::digit(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("digit indices start at 1");
  ensure(n);
  std::shared_lock lock(mutex_);
  return digits_[n - 1];
}

void Pi4Table::read(std::uint64_t first, std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (first == 0) throw InvalidArgument("digit indices start at 1");
  ensure(first + out.size() - 1);
  std::shared_lock lock(mutex_);
  std::copy_n(digits_.begin() + static_cast<std::ptrdiff_t>(first - 1), out.size(), out.begin());
}

}  // namespace uplan
