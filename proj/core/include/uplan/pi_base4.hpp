#pragma once

// Exact base-4 digits of pi.
//
// pi is evaluated as 16 atan(1/5) - 4 atan(1/239) in fixed point with GMP
// integers, each arctangent series summed by binary splitting. The fixed-point
// value carries an explicit error bound; a digit is emitted only when the
// lower and upper ends of that bound agree on it.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <span>
#include <vector>

namespace uplan {

/// Base-4 digits of pi: result[0] == 3 (integer part), then fractional digits.
/// `guard_bits` extra bits of working precision beyond the 2*(count-1) bits
/// the digits themselves occupy; the computation retries with more guard bits
/// if the error bound does not settle the last digit.
std::vector<std::uint8_t> compute_pi_base4(std::size_t count, unsigned guard_bits = 64);

/// Digit-cache file: "UPD4", u32 version, u64 count (all little-endian),
/// followed by 2-bit digits packed four to a byte, first digit in the low bits.
void write_digit_cache(const std::filesystem::path& path, std::span<const std::uint8_t> digits);
std::vector<std::uint8_t> read_digit_cache(const std::filesystem::path& path);

inline constexpr std::uint64_t kDefaultPiDigitLimit = 2'000'000;

/// Lazily grown table of pi digits shared by every pi4 stream.
///
/// Readers take a shared lock; growing the table takes the exclusive lock and
/// recomputes to the next chunk boundary. When a cache directory is set, the
/// largest table computed so far is stored there and reused by later runs.
class Pi4Table {
 public:
  explicit Pi4Table(std::uint64_t max_digits = kDefaultPiDigitLimit,
                    std::filesystem::path cache_dir = {});

  /// Process-wide table. Cache directory comes from UPLAN_DIGIT_CACHE and the
  /// limit from UPLAN_PI_MAX_DIGITS when set.
  static std::shared_ptr<Pi4Table> shared();

  std::uint64_t max_digits() const { return max_digits_; }
  std::uint64_t available() const;

  /// 1-based. Throws ResourceLimit past max_digits().
  std::uint8_t digit(std::uint64_t n);
  void read(std::uint64_t first, std::span<std::uint8_t> out);

  /// Makes digits 1..n available.
  void ensure(std::uint64_t n);

 private:
  std::filesystem::path cache_file() const;

  std::uint64_t max_digits_;
  std::filesystem::path cache_dir_;
  mutable std::shared_mutex mutex_;
  std::vector<std::uint8_t> digits_;
};

}  // namespace uplan
