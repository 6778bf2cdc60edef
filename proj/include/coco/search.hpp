#ifndef COCO_SEARCH_HPP
#define COCO_SEARCH_HPP

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "coco/bnb.hpp"
#include "coco/graph.hpp"
#include "coco/instance.hpp"
#include "coco/nn.hpp"

namespace coco {

// Trust-region shape: fix-toward-0 the k0 lowest-scored binaries, fix-toward-1
// the k1 highest, and allow at most delta of those fixings to be violated.
struct SearchConfig {
  std::size_t k0 = 0;
  std::size_t k1 = 0;
  std::size_t delta = 0;

  void validate(std::size_t num_binary) const {
    if (k0 + k1 > num_binary)
      throw std::invalid_argument("SearchConfig: k0 + k1 = " + std::to_string(k0 + k1) +
                                  " exceeds the number of binaries " + std::to_string(num_binary));
  }
  bool operator==(const SearchConfig&) const = default;
};

struct TrustRegionSelection {
  std::vector<std::size_t> low;   // pushed toward 0
  std::vector<std::size_t> high;  // pushed toward 1
};

// Ties in the score are broken toward the lower variable index on both ends.
inline TrustRegionSelection select_trust_region(std::span<const double> marginals, const SearchConfig& sc) {
  sc.validate(marginals.size());
  const std::size_t p = marginals.size();
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return marginals[a] < marginals[b]; });
  TrustRegionSelection sel;
  sel.low.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sc.k0));
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(sc.k0), order.end());
  std::stable_sort(rest.begin(), rest.end(),
                   [&](std::size_t a, std::size_t b) { return marginals[a] > marginals[b]; });
  sel.high.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(sc.k1));
  std::sort(sel.low.begin(), sel.low.end());
  std::sort(sel.high.begin(), sel.high.end());
  return sel;
}

// Returns a copy of the instance with the row
//   sum_{L} x_i + sum_{H} (1 - x_i) <= delta,
// stored as  sum_{L} x_i - sum_{H} x_i <= delta - k1.
// With k0 = k1 = 0 the row would be empty (0 <= delta) and is omitted.
inline MilpInstance build_trust_region(const MilpInstance& inst, std::span<const double> marginals,
                                       const SearchConfig& sc) {
  if (marginals.size() != inst.num_binary)
    throw std::invalid_argument("build_trust_region: expected one marginal per binary");
  const auto sel = select_trust_region(marginals, sc);
  MilpInstance out = inst;
  out.name = inst.name + "+tr";
  if (sel.low.empty() && sel.high.empty()) return out;
  ConstraintRow row;
  row.relation = Relation::less_equal;
  row.rhs = static_cast<double>(sc.delta) - static_cast<double>(sc.k1);
  std::size_t a = 0, b = 0;
  while (a < sel.low.size() || b < sel.high.size()) {
    if (b == sel.high.size() || (a < sel.low.size() && sel.low[a] < sel.high[b])) {
      row.cols.push_back(sel.low[a++]);
      row.coefs.push_back(1.0);
    } else {
      row.cols.push_back(sel.high[b++]);
      row.coefs.push_back(-1.0);
    }
  }
  out.rows.push_back(std::move(row));
  return out;
}

// Trust-region search around the given marginals. Pool members and the
// incumbent are feasible for the original instance (the added row only
// shrinks the feasible set; the objective is unchanged).
inline BnbResult search_around(const MilpInstance& inst, std::span<const double> marginals, const SearchConfig& sc,
                               const BnbConfig& cfg) {
  return branch_and_bound(build_trust_region(inst, marginals, sc), cfg);
}

inline BnbResult predict_and_search(const MilpInstance& inst, const GnnModel& model, const SearchConfig& sc,
                                    const BnbConfig& cfg) {
  sc.validate(inst.num_binary);
  const auto graph = encode(inst);
  const auto pred = forward(model, graph);
  return search_around(inst, pred.marginals, sc, cfg);
}

}  // namespace coco

#endif  // COCO_SEARCH_HPP
