#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tentlab/maps.hpp"
#include "tentlab/orbit.hpp"

namespace tentlab {

/// Partition convention: state A (|x| < threshold) emits 1, the macro-state
/// B = B1 u B2 (|x| >= threshold) emits 0. One-sided maps have x >= 0, so
/// the |x| test reduces to the direct test on x.
struct PartitionRule {
  double threshold = 0.5;
};

struct BitProvenance {
  std::optional<MapKind> kind;
  std::optional<OrbitConfig> config;
  PartitionRule rule;
};

/// Packed binary sequence, MSB-first within each byte; the final partial
/// byte is zero-padded and the bit count is carried separately.
class BitStream {
 public:
  BitStream() = default;

  void push_back(bool bit);
  bool bit(std::size_t i) const;
  std::size_t size() const noexcept { return n_bits_; }
  bool empty() const noexcept { return n_bits_ == 0; }
  std::size_t ones() const noexcept { return ones_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  std::string to_ascii() const;
  /// Parses '0'/'1' text; whitespace is ignored, anything else throws.
  static BitStream from_ascii(std::string_view text);
  static BitStream from_bytes(std::vector<std::uint8_t> bytes, std::size_t n_bits);

  BitProvenance provenance;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t n_bits_ = 0;
  std::size_t ones_ = 0;
};

/// One bit per orbit state; |x| == threshold classifies as B (bit 0).
BitStream extract_bits(const OrbitResult& orbit, const PartitionRule& rule);

struct MarkovEstimate {
  std::optional<double> p;  ///< P(1 follows 1); empty when no 1 -> * transitions exist
  std::optional<double> q;  ///< P(0 follows 0); empty when no 0 -> * transitions exist
  std::uint64_t n11 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n00 = 0;
};

/// Maximum-likelihood transition probabilities from consecutive bit pairs.
/// The four counts always sum to size() - 1.
MarkovEstimate estimate_markov(const BitStream& bits);

struct TestResult {
  std::string name;
  double statistic = 0.0;
  double p_value = 0.0;
  bool pass = false;
  bool skipped = false;  ///< excluded from the suite verdict
  std::string note;
};

struct TestReport {
  std::vector<TestResult> entries;
  double alpha = 0.01;
  bool suite_pass = false;
};

/// Two-sided normal test on the ones count vs n/2.
TestResult monobit_test(const BitStream& bits, double alpha);

/// Wald-Wolfowitz runs count vs expectation 2 n pi0 pi1 + 1. Skipped when
/// the ones fraction is farther than 2/sqrt(n) from 1/2.
TestResult runs_test(const BitStream& bits, double alpha);

/// Sample autocorrelation at the given lag, tested against 0 with the
/// null variance 1/n.
TestResult serial_correlation_test(const BitStream& bits, std::size_t lag, double alpha);

/// Chi-square over the 2^block_bits non-overlapping block patterns against
/// the uniform expectation. block_bits must be 2, 3 or 4.
TestResult block_chisquare_test(const BitStream& bits, std::size_t block_bits, double alpha);

bool suite_verdict(const std::vector<TestResult>& entries);

/// Monobit, runs, lag-1 serial correlation and 2-bit block chi-square.
/// Verdict passes iff every non-skipped entry passes. Requires 10^4 bits.
TestReport run_suite(const BitStream& bits, double alpha);

}  // namespace tentlab
