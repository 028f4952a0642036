#pragma once

// Deterministic digit sources and the digit -> action mapping.
//
// Every source is indexed from 1, matching the convention that the first
// symbol of a normal number's expansion is alpha_1. Streams are immutable and
// cheap to copy; cursors carry the only mutable state.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uplan {

class Pi4Table;

enum class DigitSource { kChampernowne, kPi4, kPseudorandom, kFile };

std::string_view to_string(DigitSource source);

/// n-th symbol (1-based) of the concatenation of the base-`base` numerals
/// 0, 1, 2, ... ("0123101112..." in base 4). O(log n), nothing is materialized.
std::uint8_t champernowne_digit(unsigned base, std::uint64_t n);

/// n-th base-4 digit of pi, index 1 being the integer part 3. Backed by the
/// process-wide Pi4Table.
std::uint8_t pi_digit_base4(std::uint64_t n);

/// Counter-based generator: splitmix64 finalizer applied to seed XOR n,
/// reduced modulo base by rejection. See README for the exact definition.
std::uint8_t pseudorandom_digit(std::uint64_t seed, unsigned base, std::uint64_t n);

namespace detail {
class DigitSourceImpl;
}

/// Indexed, immutable source of base-b digits.
class DigitStream {
 public:
  static DigitStream champernowne(unsigned base = 4);
  static DigitStream pi4();
  static DigitStream pi4(std::shared_ptr<Pi4Table> table);
  static DigitStream pseudorandom(std::uint64_t seed, unsigned base = 4);
  /// Digits taken from text: characters 0-9 then a-z, whitespace ignored.
  static DigitStream from_digits(std::string_view text, unsigned base = 4);
  static DigitStream from_file(const std::filesystem::path& path, unsigned base = 4);

  DigitSource kind() const;
  unsigned base() const;

  /// Largest valid index, if the source is finite or capped.
  std::optional<std::uint64_t> limit() const;

  /// Throws InvalidArgument for n == 0 and ResourceLimit past limit().
  std::uint8_t digit(std::uint64_t n) const;

  /// Fills `out` with digits first, first+1, ...
  void read(std::uint64_t first, std::span<std::uint8_t> out) const;

  std::string describe() const;

 private:
  explicit DigitStream(std::shared_ptr<const detail::DigitSourceImpl> impl);

  std::shared_ptr<const detail::DigitSourceImpl> impl_;
};

/// Sequential reader over a stream. Buffers digits in blocks.
class DigitCursor {
 public:
  DigitCursor(DigitStream stream, std::uint64_t first = 1);

  /// Index of the digit the next call to next() returns.
  std::uint64_t position() const { return position_; }

  std::uint8_t next();
  void reset(std::uint64_t first);

  const DigitStream& stream() const { return stream_; }

 private:
  void refill();

  static constexpr std::size_t kBlock = 4096;

  DigitStream stream_;
  std::uint64_t position_;
  std::uint64_t buffer_first_ = 0;
  std::size_t buffer_size_ = 0;
  std::array<std::uint8_t, kBlock> buffer_{};
};

enum class Action : std::uint8_t { kLeft = 0, kRight = 1, kUp = 2, kDown = 3 };

inline constexpr std::array<Action, 4> kAllActions = {Action::kLeft, Action::kRight,
                                                      Action::kUp, Action::kDown};

struct Vec2i {
  int x = 0;
  int y = 0;
  friend bool operator==(const Vec2i&, const Vec2i&) = default;
};

/// Unit vector for an action: left (-1,0), right (1,0), up (0,1), down (0,-1).
constexpr Vec2i unit_vector(Action a) {
  switch (a) {
    case Action::kLeft: return {-1, 0};
    case Action::kRight: return {1, 0};
    case Action::kUp: return {0, 1};
    case Action::kDown: return {0, -1};
  }
  return {0, 0};
}

char action_letter(Action a);
Action action_from_letter(char c);

/// digit -> action table.
class ActionMap {
 public:
  /// 0->left, 1->right, 2->up, 3->down.
  ActionMap();
  explicit ActionMap(std::vector<Action> table);

  /// Parses a letter string such as "LRUD": the i-th letter is the image of digit i.
  static ActionMap parse(std::string_view letters);

  Action operator()(std::uint8_t digit) const;
  std::size_t domain_size() const { return table_.size(); }
  bool is_bijective() const;
  std::string to_string() const;

 private:
  std::vector<Action> table_;
};

Vec2i map_digit_to_action(const ActionMap& map, std::uint8_t digit);

/// Empirical sliding-window frequencies of all base^k words over the first N
/// digits. Keys are the words written with digit characters.
std::map<std::string, double> block_frequency(const DigitStream& stream, unsigned k,
                                              std::uint64_t n);

}  // namespace uplan
