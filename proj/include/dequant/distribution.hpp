#pragma once

// Outcome distributions over measurement bitstrings, total variation
// distance, and reproducible sampling.

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dequant/rng.hpp"

namespace dequant {

// Exact distributions map outcome -> probability; empirical ones map
// outcome -> shot count. Exact construction normalises away float residue
// so that deterministic pipelines compare bit-identically.
class Distribution {
 public:
  enum class Mode { Exact, Empirical };

  static Distribution exact(std::map<std::string, double> probabilities) {
    if (probabilities.empty()) {
      throw std::invalid_argument("exact distribution must have at least one outcome");
    }
    double total = 0.0;
    for (const auto& [outcome, p] : probabilities) {
      if (p < 0.0) throw std::invalid_argument("negative probability for outcome " + outcome);
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
    }
    for (auto& [outcome, p] : probabilities) p /= total;
    Distribution d;
    d.mode_ = Mode::Exact;
    d.probabilities_ = std::move(probabilities);
    return d;
  }

  static Distribution point(std::string outcome) {
    return exact({{std::move(outcome), 1.0}});
  }

  static Distribution empirical(std::map<std::string, std::uint64_t> counts) {
    if (counts.empty()) {
      throw std::invalid_argument("empirical distribution must have at least one outcome");
    }
    Distribution d;
    d.mode_ = Mode::Empirical;
    d.counts_ = std::move(counts);
    for (const auto& [outcome, c] : d.counts_) d.shots_ += c;
    if (d.shots_ == 0) throw std::invalid_argument("empirical distribution has zero shots");
    return d;
  }

  Mode mode() const { return mode_; }
  bool is_exact() const { return mode_ == Mode::Exact; }
  std::uint64_t shots() const { return shots_; }

  const std::map<std::string, double>& probabilities() const { return probabilities_; }
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

  // Probability view in either mode (counts normalised by shots).
  std::map<std::string, double> normalized() const {
    if (mode_ == Mode::Exact) return probabilities_;
    std::map<std::string, double> out;
    for (const auto& [outcome, c] : counts_) {
      out[outcome] = static_cast<double>(c) / static_cast<double>(shots_);
    }
    return out;
  }

  double probability(const std::string& outcome) const {
    if (mode_ == Mode::Exact) {
      auto it = probabilities_.find(outcome);
      return it == probabilities_.end() ? 0.0 : it->second;
    }
    auto it = counts_.find(outcome);
    return it == counts_.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(shots_);
  }

  std::size_t support_size() const {
    return mode_ == Mode::Exact ? probabilities_.size() : counts_.size();
  }

  bool operator==(const Distribution&) const = default;

 private:
  Mode mode_ = Mode::Exact;
  std::map<std::string, double> probabilities_;
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t shots_ = 0;
};

// Total variation distance: (1/2) sum over the union of outcomes of
// |p(x) - q(x)|. Empirical distributions are normalised first.
inline double tvd(const Distribution& p, const Distribution& q) {
  std::map<std::string, double> pn = p.normalized();
  std::map<std::string, double> qn = q.normalized();
  double sum = 0.0;
  auto ip = pn.begin();
  auto iq = qn.begin();
  while (ip != pn.end() || iq != qn.end()) {
    if (iq == qn.end() || (ip != pn.end() && ip->first < iq->first)) {
      sum += std::abs(ip->second);
      ++ip;
    } else if (ip == pn.end() || iq->first < ip->first) {
      sum += std::abs(iq->second);
      ++iq;
    } else {
      sum += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return 0.5 * sum;
}

// Draws `shots` samples from `p`. Shot s uses the derived stream
// (seed, s), so the result is independent of execution order.
inline Distribution sample_distribution(const Distribution& p, std::uint64_t shots,
                                        std::uint64_t seed) {
  if (shots == 0) throw std::invalid_argument("shots must be >= 1");
  std::map<std::string, double> probs = p.normalized();
  std::vector<std::pair<std::string, double>> cumulative;
  cumulative.reserve(probs.size());
  double acc = 0.0;
  for (const auto& [outcome, prob] : probs) {
    acc += prob;
    cumulative.emplace_back(outcome, acc);
  }
  std::map<std::string, std::uint64_t> counts;
  for (std::uint64_t s = 0; s < shots; ++s) {
    CounterRng rng = CounterRng::derive(seed, s);
    double u = rng.uniform() * acc;
    const std::string* chosen = &cumulative.back().first;
    for (const auto& [outcome, cum] : cumulative) {
      if (u < cum) {
        chosen = &outcome;
        break;
      }
    }
    ++counts[*chosen];
  }
  return Distribution::empirical(std::move(counts));
}

}  // namespace dequant
