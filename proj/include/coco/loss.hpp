#ifndef COCO_LOSS_HPP
#define COCO_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "coco/nn.hpp"
#include "coco/rng.hpp"

namespace coco {

struct LossConfig {
  double tau = 0.1;
  double gamma = 0.9;
  double lambda_rank = 0.01;
  std::size_t pair_cap = 50000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("LossConfig: tau must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("LossConfig: gamma must be > 0");
    if (!(lambda_rank >= 0.0)) throw std::invalid_argument("LossConfig: lambda_rank must be >= 0");
    if (pair_cap < 1) throw std::invalid_argument("LossConfig: pair_cap must be >= 1");
  }
  bool operator==(const LossConfig&) const = default;
};

// Weighted supervision over the p binaries of one instance.
struct LabeledSolutionSet {
  std::vector<std::vector<std::uint8_t>> solutions;
  std::vector<double> weights;
  std::vector<double> objectives;

  std::size_t size() const { return solutions.size(); }
};

struct LossValue {
  double loss = 0.0;
  std::vector<double> grad;  // d(loss)/d(logits)
};

namespace detail {

// log(sigmoid(z)) without overflow.
inline double log_sigmoid(double z) {
  return z >= 0.0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

inline double log_sum_exp(std::span<const double> z, std::span<const std::size_t> idx, double scale) {
  double top = -kInf;
  for (auto i : idx) top = std::max(top, z[i] * scale);
  double sum = 0.0;
  for (auto i : idx) sum += std::exp(z[i] * scale - top);
  return top + std::log(sum);
}

inline void split_solution(std::span<const std::uint8_t> x, std::vector<std::size_t>& pos,
                           std::vector<std::size_t>& neg) {
  pos.clear();
  neg.clear();
  for (std::size_t j = 0; j < x.size(); ++j) (x[j] ? pos : neg).push_back(j);
}

inline void check_labels(const LabeledSolutionSet& labels, std::size_t p) {
  if (labels.weights.size() != labels.solutions.size())
    throw std::invalid_argument("labels: weight count differs from solution count");
  for (const auto& s : labels.solutions)
    if (s.size() != p) throw std::invalid_argument("labels: solution length differs from number of binaries");
}

}  // namespace detail

// Solution-weighted binary cross-entropy on the marginals; log clamped at 1e-12.
inline LossValue bce_weighted(std::span<const double> logits, const LabeledSolutionSet& labels) {
  const std::size_t p = logits.size();
  detail::check_labels(labels, p);
  static const double kLogFloor = std::log(1e-12);
  LossValue out{0.0, std::vector<double>(p, 0.0)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = labels.weights[i];
    const auto& x = labels.solutions[i];
    double term = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      // -log(xhat) = -log sigmoid(z); -log(1 - xhat) = -log sigmoid(-z)
      const double z = logits[j];
      const double lp = x[j] ? detail::log_sigmoid(z) : detail::log_sigmoid(-z);
      if (lp > kLogFloor) {
        term -= lp;
        out.grad[j] += w * (sigmoid(z) - (x[j] ? 1.0 : 0.0));
      } else {
        term -= kLogFloor;
      }
    }
    out.loss += w * term;
  }
  return out;
}

inline LossValue bce_weighted(const Prediction& pred, const LabeledSolutionSet& labels) {
  return bce_weighted(pred.logits, labels);
}

// -log( sum_{V+} e^{z/tau} / sum_{all} e^{z/tau} ). An empty V+ contributes 0.
inline LossValue mscl(std::span<const double> z, std::span<const std::size_t> positives, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("mscl: tau must be > 0");
  const std::size_t p = z.size();
  LossValue out{0.0, std::vector<double>(p, 0.0)};
  if (positives.empty()) return out;
  std::vector<std::size_t> all(p);
  for (std::size_t j = 0; j < p; ++j) all[j] = j;
  const double scale = 1.0 / tau;
  const double lse_pos = detail::log_sum_exp(z, positives, scale);
  const double lse_all = detail::log_sum_exp(z, all, scale);
  out.loss = lse_all - lse_pos;
  for (std::size_t k = 0; k < p; ++k) out.grad[k] = std::exp(z[k] * scale - lse_all) * scale;
  for (auto i : positives) out.grad[i] -= std::exp(z[i] * scale - lse_pos) * scale;
  return out;
}

// Mean hinge  max(0, gamma - (z_i - z_j))  over positive/negative pairs.
// Above pair_cap pairs, pair_cap pairs are drawn uniformly with replacement.
inline LossValue rank_loss(std::span<const double> z, std::span<const std::size_t> positives,
                           std::span<const std::size_t> negatives, double gamma, std::size_t pair_cap,
                           std::uint64_t seed) {
  if (!(gamma > 0.0)) throw std::invalid_argument("rank_loss: gamma must be > 0");
  LossValue out{0.0, std::vector<double>(z.size(), 0.0)};
  if (positives.empty() || negatives.empty()) return out;
  auto hinge = [&](std::size_t i, std::size_t j, double share) {
    const double slack = gamma - (z[i] - z[j]);
    if (slack > 0.0) {
      out.loss += slack * share;
      out.grad[i] -= share;
      out.grad[j] += share;
    }
  };
  const std::size_t total = positives.size() * negatives.size();
  if (total <= pair_cap) {
    const double share = 1.0 / static_cast<double>(total);
    for (auto i : positives)
      for (auto j : negatives) hinge(i, j, share);
  } else {
    SplitMix64 rng(seed);
    const double share = 1.0 / static_cast<double>(pair_cap);
    for (std::size_t s = 0; s < pair_cap; ++s) {
      const auto i = positives[static_cast<std::size_t>(rng.below(positives.size()))];
      const auto j = negatives[static_cast<std::size_t>(rng.below(negatives.size()))];
      hinge(i, j, share);
    }
  }
  return out;
}

// Weights applied to the two contrastive components; the ablation variants
// switch either one off.
struct ContrastiveMix {
  double mscl = 1.0;
  double rank = 1.0;
};

// sum_i w_i [ mix.mscl * MSCL_i + mix.rank * lambda_rank * rank_i ]
inline LossValue vcl(std::span<const double> z, const LabeledSolutionSet& labels, const LossConfig& cfg,
                     ContrastiveMix mix = {}) {
  cfg.validate();
  const std::size_t p = z.size();
  detail::check_labels(labels, p);
  LossValue out{0.0, std::vector<double>(p, 0.0)};
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = labels.weights[i];
    detail::split_solution(labels.solutions[i], pos, neg);
    if (pos.empty()) spdlog::warn("vcl: solution {} has no positive binaries; its contrastive term is zero", i);
    if (mix.mscl != 0.0) {
      const auto part = mscl(z, pos, cfg.tau);
      out.loss += w * mix.mscl * part.loss;
      for (std::size_t j = 0; j < p; ++j) out.grad[j] += w * mix.mscl * part.grad[j];
    }
    const double rank_weight = mix.rank * cfg.lambda_rank;
    if (rank_weight != 0.0) {
      const auto part = rank_loss(z, pos, neg, cfg.gamma, cfg.pair_cap, derive_seed(cfg.seed, "rank/" + std::to_string(i)));
      out.loss += w * rank_weight * part.loss;
      for (std::size_t j = 0; j < p; ++j) out.grad[j] += w * rank_weight * part.grad[j];
    }
  }
  return out;
}

inline LossValue vcl(const Prediction& pred, const LabeledSolutionSet& labels, const LossConfig& cfg,
                     ContrastiveMix mix = {}) {
  return vcl(pred.logits, labels, cfg, mix);
}

}  // namespace coco

#endif  // COCO_LOSS_HPP
