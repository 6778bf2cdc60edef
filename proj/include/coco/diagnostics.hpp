#ifndef COCO_DIAGNOSTICS_HPP
#define COCO_DIAGNOSTICS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coco/bnb.hpp"
#include "coco/instance.hpp"
#include "coco/pipeline.hpp"
#include "coco/rng.hpp"

namespace coco {

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  Histogram() = default;
  Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {}

  // Values outside [lo, hi] are clamped into the end bins; hi lands in the last bin.
  void add(double v) {
    const double t = (v - lo) / (hi - lo) * static_cast<double>(counts.size());
    auto b = static_cast<std::ptrdiff_t>(std::floor(t));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(counts.size()) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  double edge(std::size_t k) const { return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(counts.size()); }
  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

inline std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out += format_double(h.edge(k)) + "," + format_double(h.edge(k + 1)) + "," + std::to_string(h.counts[k]) + "\n";
  return out;
}

// ---------------------------------------------------------------- separability

struct SeparabilityReport {
  std::size_t sampled_pairs = 0;
  double fraction_positive = 0.0;
  double mean_delta = 0.0;
  Histogram delta_histogram{-1.0, 1.0, 50};
};

// delta = xhat_i - xhat_j over (one, zero) pairs of the reference solution.
inline SeparabilityReport pairwise_ranking_stats(std::span<const double> marginals, std::span<const std::uint8_t> truth,
                                                 std::size_t num_pairs, std::uint64_t seed) {
  if (marginals.size() != truth.size())
    throw std::invalid_argument("pairwise_ranking_stats: marginals and truth differ in length");
  std::vector<std::size_t> ones, zeros;
  for (std::size_t j = 0; j < truth.size(); ++j) (truth[j] ? ones : zeros).push_back(j);
  if (ones.empty()) throw std::invalid_argument("pairwise_ranking_stats: truth has no variable set to 1");
  if (zeros.empty()) throw std::invalid_argument("pairwise_ranking_stats: truth has no variable set to 0");
  if (num_pairs < 1) throw std::invalid_argument("pairwise_ranking_stats: num_pairs must be >= 1");

  SeparabilityReport rep;
  std::size_t positive = 0;
  double sum = 0.0;
  auto take = [&](std::size_t i, std::size_t j) {
    const double d = marginals[i] - marginals[j];
    positive += d > 0.0;
    sum += d;
    rep.delta_histogram.add(d);
    ++rep.sampled_pairs;
  };
  if (ones.size() * zeros.size() <= num_pairs) {
    for (auto i : ones)
      for (auto j : zeros) take(i, j);
  } else {
    SplitMix64 rng(seed);
    for (std::size_t s = 0; s < num_pairs; ++s) {
      const auto i = ones[static_cast<std::size_t>(rng.below(ones.size()))];
      const auto j = zeros[static_cast<std::size_t>(rng.below(zeros.size()))];
      take(i, j);
    }
  }
  rep.fraction_positive = static_cast<double>(positive) / static_cast<double>(rep.sampled_pairs);
  rep.mean_delta = sum / static_cast<double>(rep.sampled_pairs);
  return rep;
}

// ---------------------------------------------------------------- variance

struct VarianceReport {
  double intra_var_mean = 0.0;
  double inter_var = 0.0;
  double ratio = 0.0;
  std::size_t constraints_used = 0;
};

inline double population_variance(std::span<const double> v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

inline VarianceReport intra_constraint_variance(std::span<const double> logits, const MilpInstance& inst) {
  if (logits.size() != inst.num_binary)
    throw std::invalid_argument("intra_constraint_variance: expected one logit per binary");
  VarianceReport rep;
  std::vector<double> members;
  for (const auto& row : inst.rows) {
    members.clear();
    for (auto j : row.cols)
      if (j < inst.num_binary) members.push_back(logits[j]);
    if (members.size() < 2) continue;
    rep.intra_var_mean += population_variance(members);
    ++rep.constraints_used;
  }
  if (rep.constraints_used == 0)
    throw std::invalid_argument("intra_constraint_variance: no constraint has two binary members");
  rep.intra_var_mean /= static_cast<double>(rep.constraints_used);
  rep.inter_var = population_variance(logits);
  rep.ratio = rep.inter_var > 0.0 ? rep.intra_var_mean / rep.inter_var : 0.0;
  return rep;
}

// ---------------------------------------------------------------- activation

struct ActivationReport {
  std::vector<double> ratios;  // one per row with a binary member, row order
  Histogram histogram{0.0, 1.0, 20};
};

inline ActivationReport activation_ratios(const MilpInstance& inst, std::span<const double> solution) {
  if (solution.size() != inst.num_vars) throw InstanceError("activation_ratios: solution length differs from n");
  ActivationReport rep;
  for (const auto& row : inst.rows) {
    std::size_t members = 0, active = 0;
    for (auto j : row.cols) {
      if (j >= inst.num_binary) continue;
      ++members;
      active += solution[j] > 0.5;
    }
    if (members == 0) continue;
    const double r = static_cast<double>(active) / static_cast<double>(members);
    rep.ratios.push_back(r);
    rep.histogram.add(r);
  }
  return rep;
}

// ---------------------------------------------------------------- primal curve

struct CurvePoint {
  double seconds = 0.0;
  std::size_t node = 0;
  double gap = 0.0;
};

struct PrimalCurve {
  bool has_solution = false;
  std::vector<CurvePoint> points;
};

// One point per incumbent-improvement event in the trace.
inline PrimalCurve primal_curve(const std::vector<TraceEvent>& trace, double bks) {
  if (trace.empty()) throw std::invalid_argument("primal_curve: empty trace");
  PrimalCurve c;
  std::optional<double> last;
  for (const auto& ev : trace) {
    if (!ev.incumbent || (last && *ev.incumbent == *last)) continue;
    last = ev.incumbent;
    c.points.push_back({ev.seconds, ev.node, gap_abs(*ev.incumbent, bks)});
  }
  c.has_solution = !c.points.empty();
  return c;
}

// The time column depends on the machine; curves written with use_nodes
// are reproducible byte for byte.
inline std::string primal_curve_csv(const PrimalCurve& c, bool use_nodes) {
  std::string out = use_nodes ? "node,gap_abs\n" : "time,gap_abs\n";
  if (!c.has_solution) return out + "# no solution\n";
  for (const auto& p : c.points)
    out += (use_nodes ? std::to_string(p.node) : format_double(p.seconds)) + "," + format_double(p.gap) + "\n";
  return out;
}

}  // namespace coco

#endif  // COCO_DIAGNOSTICS_HPP
