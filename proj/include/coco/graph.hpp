#ifndef COCO_GRAPH_HPP
#define COCO_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "coco/instance.hpp"

namespace coco {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kVarFeatures = 4;
inline constexpr std::size_t kConFeatures = 4;
inline constexpr std::size_t kEdgeFeatures = 1;

struct Edge {
  std::size_t con = 0;
  std::size_t var = 0;
};

// Adjacency lists of the variable/constraint incidence, both in ascending
// index order. Edge ids refer to positions in BipartiteGraph::edges.
struct Incidence {
  std::size_t num_vars = 0;
  std::size_t num_cons = 0;
  std::vector<std::vector<std::size_t>> con_vars;
  std::vector<std::vector<std::size_t>> var_cons;

  static Incidence from_edges(std::size_t num_vars, std::size_t num_cons, const std::vector<Edge>& edges) {
    Incidence inc;
    inc.num_vars = num_vars;
    inc.num_cons = num_cons;
    inc.con_vars.resize(num_cons);
    inc.var_cons.resize(num_vars);
    for (const auto& e : edges) {
      inc.con_vars[e.con].push_back(e.var);
      inc.var_cons[e.var].push_back(e.con);
    }
    for (auto& v : inc.con_vars) std::sort(v.begin(), v.end());
    for (auto& v : inc.var_cons) std::sort(v.begin(), v.end());
    return inc;
  }
};

struct BipartiteGraph {
  std::size_t num_var_nodes = 0;
  std::size_t num_con_nodes = 0;
  std::size_t num_binary = 0;
  RowMatrix var_features;   // num_var_nodes x kVarFeatures
  RowMatrix con_features;   // num_con_nodes x kConFeatures
  RowMatrix edge_features;  // edges.size() x kEdgeFeatures
  std::vector<Edge> edges;  // row-major: ascending constraint, then variable
  std::vector<bool> binary_mask;
  Incidence incidence;

  std::size_t num_edges() const { return edges.size(); }
};

// Variable features: [c_j / max|c|, deg(v_j) / m, is_binary, 1]
// Constraint features: [b_k / max|b|, deg(c_k) / n, relation code, 1] with
//   relation code -1 for <=, 0 for ==, +1 for >=
// Edge features: [A_kj / max_j' |A_kj'|]
// A max-abs of zero is replaced by one.
inline BipartiteGraph encode(const MilpInstance& inst) {
  const std::size_t n = inst.num_vars;
  const std::size_t m = inst.rows.size();
  BipartiteGraph g;
  g.num_var_nodes = n;
  g.num_con_nodes = m;
  g.num_binary = inst.num_binary;
  g.binary_mask.assign(n, false);
  for (std::size_t j = 0; j < inst.num_binary; ++j) g.binary_mask[j] = true;

  auto guard = [](double v) { return v == 0.0 ? 1.0 : v; };
  double max_c = 0.0;
  for (double c : inst.objective) max_c = std::max(max_c, std::abs(c));
  max_c = guard(max_c);
  double max_b = 0.0;
  for (const auto& r : inst.rows) max_b = std::max(max_b, std::abs(r.rhs));
  max_b = guard(max_b);

  std::vector<std::size_t> var_degree(n, 0);
  for (const auto& r : inst.rows)
    for (auto j : r.cols) ++var_degree[j];

  const double m_div = guard(static_cast<double>(m));
  const double n_div = guard(static_cast<double>(n));
  g.var_features.resize(static_cast<Eigen::Index>(n), kVarFeatures);
  for (std::size_t j = 0; j < n; ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    g.var_features(r, 0) = inst.objective[j] / max_c;
    g.var_features(r, 1) = static_cast<double>(var_degree[j]) / m_div;
    g.var_features(r, 2) = j < inst.num_binary ? 1.0 : 0.0;
    g.var_features(r, 3) = 1.0;
  }

  g.con_features.resize(static_cast<Eigen::Index>(m), kConFeatures);
  const auto nnz = inst.num_nonzeros();
  g.edges.reserve(nnz);
  g.edge_features.resize(static_cast<Eigen::Index>(nnz), kEdgeFeatures);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& row = inst.rows[k];
    const auto r = static_cast<Eigen::Index>(k);
    g.con_features(r, 0) = row.rhs / max_b;
    g.con_features(r, 1) = static_cast<double>(row.cols.size()) / n_div;
    g.con_features(r, 2) = row.relation == Relation::less_equal ? -1.0
                           : row.relation == Relation::equal    ? 0.0
                                                                : 1.0;
    g.con_features(r, 3) = 1.0;
    double max_a = 0.0;
    for (double a : row.coefs) max_a = std::max(max_a, std::abs(a));
    max_a = guard(max_a);
    for (std::size_t t = 0; t < row.cols.size(); ++t) {
      g.edge_features(static_cast<Eigen::Index>(g.edges.size()), 0) = row.coefs[t] / max_a;
      g.edges.push_back({k, row.cols[t]});
    }
  }
  g.incidence = Incidence::from_edges(n, m, g.edges);
  return g;
}

}  // namespace coco

#endif  // COCO_GRAPH_HPP
