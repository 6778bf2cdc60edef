#ifndef COCO_GENERATORS_HPP
#define COCO_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "coco/instance.hpp"
#include "coco/rng.hpp"

namespace coco {

// Set covering: min sum c_j x_j  s.t.  sum_{j in S_k} x_j >= 1 for every row k.
//
// Construction order (all draws from one SplitMix64 seeded with `seed`):
//   1. every column j is placed in one uniformly drawn row;
//   2. every row receives two distinct uniformly drawn columns;
//   3. uniformly drawn cells are switched on until ceil(density * m * n)
//      cells are set;
//   4. column costs are drawn uniformly from [cost_lo, cost_hi].
inline MilpInstance generate_set_cover(std::size_t m, std::size_t n, double density,
                                       std::int64_t cost_lo, std::int64_t cost_hi,
                                       std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("generate_set_cover: need at least 2 rows");
  if (n < 4) throw std::invalid_argument("generate_set_cover: need at least 4 columns");
  if (!(density > 0.0 && density < 1.0))
    throw std::invalid_argument("generate_set_cover: density must lie in (0, 1)");
  if (density * static_cast<double>(n) < 2.0)
    throw std::invalid_argument("generate_set_cover: density * n must be at least 2 to cover each row twice");
  if (cost_lo > cost_hi || cost_lo < 0)
    throw std::invalid_argument("generate_set_cover: cost range must satisfy 0 <= cost_lo <= cost_hi");

  SplitMix64 rng(seed);
  std::vector<std::uint8_t> cell(m * n, 0);
  std::size_t filled = 0;
  auto set = [&](std::size_t r, std::size_t c) {
    auto& v = cell[r * n + c];
    if (!v) {
      v = 1;
      ++filled;
    }
  };

  for (std::size_t j = 0; j < n; ++j) set(static_cast<std::size_t>(rng.below(m)), j);
  for (std::size_t k = 0; k < m; ++k) {
    const auto a = static_cast<std::size_t>(rng.below(n));
    auto b = static_cast<std::size_t>(rng.below(n - 1));
    if (b >= a) ++b;
    set(k, a);
    set(k, b);
  }
  const auto target = static_cast<std::size_t>(std::ceil(density * static_cast<double>(m * n)));
  while (filled < target) set(static_cast<std::size_t>(rng.below(m)), static_cast<std::size_t>(rng.below(n)));

  MilpInstance inst;
  inst.name = "sc_" + std::to_string(m) + "x" + std::to_string(n) + "_s" + std::to_string(seed);
  inst.num_vars = n;
  inst.num_binary = n;
  inst.sense = Sense::minimize;
  inst.lower.assign(n, 0.0);
  inst.upper.assign(n, 1.0);
  inst.objective.resize(n);
  for (std::size_t j = 0; j < n; ++j) inst.objective[j] = static_cast<double>(rng.uniform_int(cost_lo, cost_hi));
  inst.rows.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    ConstraintRow row;
    row.relation = Relation::greater_equal;
    row.rhs = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (cell[k * n + j]) {
        row.cols.push_back(j);
        row.coefs.push_back(1.0);
      }
    }
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

// Combinatorial auction (set packing): max sum v_b x_b  s.t.  every item is
// sold at most once.
//
// Draw order: base value of each item uniform in [1, 100]; then per bid its
// bundle size uniform in [1, max_bundle], the bundle's items by a partial
// Fisher-Yates over the item list, and its surplus u in [0, 0.3) giving
// value = (sum of base values) * (1 + u). Items that appear in no bundle do
// not get a row.
inline MilpInstance generate_comb_auction(std::size_t items, std::size_t bids, std::size_t max_bundle,
                                          std::uint64_t seed) {
  if (items < 2) throw std::invalid_argument("generate_comb_auction: need at least 2 items");
  if (bids < 2) throw std::invalid_argument("generate_comb_auction: need at least 2 bids");
  if (max_bundle < 1 || max_bundle > items)
    throw std::invalid_argument("generate_comb_auction: max_bundle must lie in [1, items]");

  constexpr double kSurplus = 0.3;
  SplitMix64 rng(seed);
  std::vector<double> base(items);
  for (auto& v : base) v = static_cast<double>(rng.uniform_int(1, 100));

  std::vector<std::vector<std::size_t>> holders(items);
  std::vector<double> value(bids);
  std::vector<std::size_t> pool(items);
  for (std::size_t b = 0; b < bids; ++b) {
    const auto size = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_bundle)));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    double total = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
      const auto pick = k + static_cast<std::size_t>(rng.below(items - k));
      std::swap(pool[k], pool[pick]);
      holders[pool[k]].push_back(b);
      total += base[pool[k]];
    }
    value[b] = total * (1.0 + kSurplus * rng.uniform01());
  }

  MilpInstance inst;
  inst.name = "ca_" + std::to_string(items) + "x" + std::to_string(bids) + "_s" + std::to_string(seed);
  inst.num_vars = bids;
  inst.num_binary = bids;
  inst.sense = Sense::maximize;
  inst.objective = std::move(value);
  inst.lower.assign(bids, 0.0);
  inst.upper.assign(bids, 1.0);
  for (std::size_t i = 0; i < items; ++i) {
    if (holders[i].empty()) continue;
    ConstraintRow row;
    row.relation = Relation::less_equal;
    row.rhs = 1.0;
    row.cols = holders[i];  // bids are visited in increasing order
    row.coefs.assign(row.cols.size(), 1.0);
    inst.rows.push_back(std::move(row));
  }
  inst.validate();
  return inst;
}

}  // namespace coco

#endif  // COCO_GENERATORS_HPP
