#include "tentlab/trng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "tentlab/errors.hpp"
#include "tentlab/stats.hpp"

namespace tentlab {

void BitStream::push_back(bool bit) {
  if (n_bits_ % 8 == 0) bytes_.push_back(0);
  if (bit) {
    bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (n_bits_ % 8));
    ++ones_;
  }
  ++n_bits_;
}

bool BitStream::bit(std::size_t i) const {
  if (i >= n_bits_) throw std::out_of_range("BitStream::bit: index past the end");
  return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
}

std::string BitStream::to_ascii() const {
  std::string s(n_bits_, '0');
  for (std::size_t i = 0; i < n_bits_; ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

BitStream BitStream::from_ascii(std::string_view text) {
  BitStream b;
  for (char c : text) {
    if (c == '0')
      b.push_back(false);
    else if (c == '1')
      b.push_back(true);
    else if (c == '\n' || c == '\r' || c == '\t' || c == ' ')
      continue;
    else
      throw std::invalid_argument("bit text contains a character other than 0/1");
  }
  return b;
}

BitStream BitStream::from_bytes(std::vector<std::uint8_t> bytes, std::size_t n_bits) {
  if (n_bits > bytes.size() * 8)
    throw std::invalid_argument("from_bytes: n_bits exceeds the packed payload");
  BitStream b;
  b.bytes_ = std::move(bytes);
  b.bytes_.resize((n_bits + 7) / 8);
  if (n_bits % 8 != 0)  // zero the pad bits so ones() and bytes() agree
    b.bytes_.back() &= static_cast<std::uint8_t>(0xffu << (8 - n_bits % 8));
  b.n_bits_ = n_bits;
  b.ones_ = 0;
  for (std::uint8_t byte : b.bytes_) b.ones_ += static_cast<std::size_t>(std::popcount(byte));
  return b;
}

BitStream extract_bits(const OrbitResult& orbit, const PartitionRule& rule) {
  if (orbit.states.empty()) throw std::invalid_argument("extract_bits: empty orbit");
  if (!(rule.threshold > 0.0 && rule.threshold < 1.0))
    throw std::invalid_argument("partition threshold must lie in (0, 1)");
  BitStream bits;
  for (double x : orbit.states)
    bits.push_back(std::abs(x) < rule.threshold);  // |x| == threshold lands in B -> 0
  bits.provenance.rule = rule;
  return bits;
}

MarkovEstimate estimate_markov(const BitStream& bits) {
  if (bits.size() < 2) throw InsufficientDataError(2, "estimate_markov needs at least 2 bits");
  MarkovEstimate e;
  bool prev = bits.bit(0);
  for (std::size_t i = 1; i < bits.size(); ++i) {
    const bool cur = bits.bit(i);
    if (prev)
      cur ? ++e.n11 : ++e.n10;
    else
      cur ? ++e.n01 : ++e.n00;
    prev = cur;
  }
  if (e.n11 + e.n10 > 0)
    e.p = static_cast<double>(e.n11) / static_cast<double>(e.n11 + e.n10);
  if (e.n00 + e.n01 > 0)
    e.q = static_cast<double>(e.n00) / static_cast<double>(e.n00 + e.n01);
  return e;
}

TestResult monobit_test(const BitStream& bits, double alpha) {
  const std::size_t n = bits.size();
  if (n < 100) throw InsufficientDataError(100, "monobit test needs at least 100 bits");
  const double half = static_cast<double>(n) / 2.0;
  const double statistic =
      std::abs(static_cast<double>(bits.ones()) - half) / (std::sqrt(static_cast<double>(n)) / 2.0);
  const double p = stats::normal_two_sided_p(statistic);
  return {"monobit", statistic, p, p >= alpha, false, ""};
}

TestResult runs_test(const BitStream& bits, double alpha) {
  const std::size_t n = bits.size();
  if (n < 100) throw InsufficientDataError(100, "runs test needs at least 100 bits");
  const double pi1 = static_cast<double>(bits.ones()) / static_cast<double>(n);
  if (std::abs(pi1 - 0.5) > 2.0 / std::sqrt(static_cast<double>(n)))
    return {"runs", 0.0, 0.0, false, true, "ones fraction too far from 1/2"};

  std::size_t runs = 1;
  bool prev = bits.bit(0);
  for (std::size_t i = 1; i < n; ++i) {
    const bool cur = bits.bit(i);
    runs += cur != prev;
    prev = cur;
  }
  const double pi0 = 1.0 - pi1;
  const double mu = 2.0 * static_cast<double>(n) * pi0 * pi1 + 1.0;
  const double var = (mu - 1.0) * (mu - 2.0) / (static_cast<double>(n) - 1.0);
  const double z = (static_cast<double>(runs) - mu) / std::sqrt(var);
  const double p = stats::normal_two_sided_p(z);
  return {"runs", z, p, p >= alpha, false, ""};
}

TestResult serial_correlation_test(const BitStream& bits, std::size_t lag, double alpha) {
  if (lag == 0) throw std::invalid_argument("serial_correlation_test: lag must be >= 1");
  const std::size_t n = bits.size();
  if (n <= lag + 100)
    throw InsufficientDataError(lag + 101, "serial correlation test needs more than lag+100 bits");
  const std::string name = "serial_correlation(lag=" + std::to_string(lag) + ")";
  const double mean = static_cast<double>(bits.ones()) / static_cast<double>(n);
  const double var = mean * (1.0 - mean);  // population variance of a 0/1 sequence
  if (var == 0.0) return {name, 0.0, 0.0, false, false, "constant stream"};

  double acc = 0.0;
  for (std::size_t i = 0; i + lag < n; ++i)
    acc += (static_cast<double>(bits.bit(i)) - mean) *
           (static_cast<double>(bits.bit(i + lag)) - mean);
  const double r = acc / (static_cast<double>(n - lag) * var);
  const double z = r * std::sqrt(static_cast<double>(n));
  const double p = stats::normal_two_sided_p(z);
  return {name, r, p, p >= alpha, false, ""};
}

TestResult block_chisquare_test(const BitStream& bits, std::size_t block_bits, double alpha) {
  if (block_bits < 2 || block_bits > 4)
    throw std::invalid_argument("block_chisquare_test: block_bits must be 2, 3 or 4");
  const std::size_t n = bits.size();
  const std::size_t patterns = std::size_t{1} << block_bits;
  if (n < 20 * patterns)
    throw InsufficientDataError(20 * patterns, "block chi-square test needs 20 * 2^block_bits bits");

  const std::size_t n_blocks = n / block_bits;
  std::vector<std::uint64_t> counts(patterns, 0);
  for (std::size_t b = 0; b < n_blocks; ++b) {
    std::size_t v = 0;
    for (std::size_t j = 0; j < block_bits; ++j)
      v = (v << 1) | static_cast<std::size_t>(bits.bit(b * block_bits + j));
    ++counts[v];
  }
  const double expected = static_cast<double>(n_blocks) / static_cast<double>(patterns);
  double chi2 = 0.0;
  for (std::uint64_t c : counts) {
    const double dev = static_cast<double>(c) - expected;
    chi2 += dev * dev / expected;
  }
  const double p = stats::chi_square_sf(chi2, static_cast<unsigned>(patterns - 1));
  const std::string name = "block_chisquare(bits=" + std::to_string(block_bits) + ")";
  return {name, chi2, p, p >= alpha, false, ""};
}

bool suite_verdict(const std::vector<TestResult>& entries) {
  return std::all_of(entries.begin(), entries.end(),
                     [](const TestResult& e) { return e.skipped || e.pass; });
}

TestReport run_suite(const BitStream& bits, double alpha) {
  if (bits.size() < 10000)
    throw InsufficientDataError(10000, "test suite needs at least 10000 bits");
  TestReport report;
  report.alpha = alpha;
  report.entries.push_back(monobit_test(bits, alpha));
  report.entries.push_back(runs_test(bits, alpha));
  report.entries.push_back(serial_correlation_test(bits, 1, alpha));
  report.entries.push_back(block_chisquare_test(bits, 2, alpha));
  report.suite_pass = suite_verdict(report.entries);
  return report;
}

}  // namespace tentlab
