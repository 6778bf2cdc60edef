#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "coco/generators.hpp"
#include "coco/lp.hpp"
#include "oracles.hpp"

namespace coco {
namespace {

MilpInstance box_lp(std::vector<double> c, std::vector<ConstraintRow> rows, double lo, double hi,
                    Sense sense = Sense::minimize) {
  MilpInstance inst;
  inst.name = "lp";
  inst.num_vars = c.size();
  inst.num_binary = 0;
  inst.objective = std::move(c);
  inst.sense = sense;
  inst.rows = std::move(rows);
  inst.lower.assign(inst.num_vars, lo);
  inst.upper.assign(inst.num_vars, hi);
  return inst;
}

// Best vertex of a bounded polytope: try every choice of n tight hyperplanes
// among rows and bounds.
std::optional<double> vertex_oracle(const MilpInstance& inst) {
  const std::size_t n = inst.num_vars;
  const testing::DenseRows rows(inst);
  std::vector<std::vector<double>> planes;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < rows.a.size(); ++i) {
    planes.push_back(rows.a[i]);
    rhs.push_back(rows.rhs[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back(e);
    rhs.push_back(inst.lower[j]);
    planes.push_back(e);
    rhs.push_back(inst.upper[j]);
  }
  std::optional<double> best;
  const std::size_t h = planes.size();
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < n; ++j) a(r, j) = planes[pick[r]][j];
        b(r) = rhs[pick[r]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < static_cast<Eigen::Index>(n)) return;
      const Eigen::VectorXd x = lu.solve(b);
      std::vector<double> xv(x.data(), x.data() + n);
      for (std::size_t j = 0; j < n; ++j)
        if (xv[j] < inst.lower[j] - 1e-9 || xv[j] > inst.upper[j] + 1e-9) return;
      if (!rows.satisfied(xv, 1e-9)) return;
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += inst.objective[j] * xv[j];
      if (!best || (inst.sense == Sense::minimize ? obj < *best : obj > *best)) best = obj;
      return;
    }
    for (std::size_t k = from; k < h; ++k) {
      pick[depth] = k;
      rec(depth + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

void expect_primal_feasible(const MilpInstance& inst, const LpResult& r) {
  ASSERT_EQ(r.x.size(), inst.num_vars);
  EXPECT_TRUE(testing::DenseRows(inst).satisfied(r.x, 1e-7));
  for (std::size_t j = 0; j < inst.num_vars; ++j) {
    EXPECT_GE(r.x[j], inst.lower[j] - 1e-7);
    EXPECT_LE(r.x[j], inst.upper[j] + 1e-7);
  }
}

TEST(Lp, TwoVariableGeometry) {
  const auto inst = box_lp({-1.0, -1.0}, {{{0, 1}, {1.0, 1.0}, Relation::less_equal, 1.0}}, 0.0, 1.0);
  const auto r = solve_lp(inst);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.objective, -1.0, 1e-12);
  expect_primal_feasible(inst, r);
}

TEST(Lp, ContradictoryRowIsInfeasible) {
  const auto inst = box_lp({1.0, 1.0}, {{{0, 1}, {1.0, 1.0}, Relation::less_equal, -1.0}}, 0.0, 1.0);
  EXPECT_EQ(solve_lp(inst).status, LpStatus::infeasible);
  const auto eq = box_lp({1.0}, {{{0}, {1.0}, Relation::equal, 2.0}}, 0.0, 1.0);
  EXPECT_EQ(solve_lp(eq).status, LpStatus::infeasible);
}

TEST(Lp, UnboundedDirection) {
  auto inst = box_lp({-1.0, 0.0}, {{{0, 1}, {1.0, -1.0}, Relation::less_equal, 1.0}}, 0.0, kInf);
  EXPECT_EQ(solve_lp(inst).status, LpStatus::unbounded);
}

TEST(Lp, EqualityAndFreeVariables) {
  // max x0 + 2 x1, x0 + x1 == 3, x0 - x1 >= -1, x free in [-inf, inf] except x1 <= 5
  auto inst = box_lp({1.0, 2.0},
                     {{{0, 1}, {1.0, 1.0}, Relation::equal, 3.0}, {{0, 1}, {1.0, -1.0}, Relation::greater_equal, -1.0}},
                     -kInf, kInf, Sense::maximize);
  inst.upper[1] = 5.0;
  const auto r = solve_lp(inst);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.x[0], 1.0, 1e-9);
  EXPECT_NEAR(r.x[1], 2.0, 1e-9);
  EXPECT_NEAR(r.objective, 5.0, 1e-9);
}

TEST(Lp, MatchesVertexEnumeration) {
  SplitMix64 rng(2024);
  int solved = 0;
  for (int t = 0; t < 150; ++t) {
    const std::size_t n = 2 + rng.below(3), m = 1 + rng.below(4);
    std::vector<double> c(n);
    for (auto& v : c) v = static_cast<double>(rng.uniform_int(-5, 5));
    std::vector<ConstraintRow> rows;
    for (std::size_t i = 0; i < m; ++i) {
      ConstraintRow row;
      for (std::size_t j = 0; j < n; ++j)
        if (rng.uniform01() < 0.7) {
          row.cols.push_back(j);
          row.coefs.push_back(static_cast<double>(rng.uniform_int(1, 6)) * (rng.below(2) ? 1.0 : -1.0));
        }
      if (row.cols.empty()) {
        row.cols.push_back(0);
        row.coefs.push_back(1.0);
      }
      row.relation = static_cast<Relation>(rng.below(3));
      row.rhs = static_cast<double>(rng.uniform_int(-3, 6));
      rows.push_back(row);
    }
    const auto inst = box_lp(c, rows, -2.0, 3.0, rng.below(2) ? Sense::minimize : Sense::maximize);
    const auto expected = vertex_oracle(inst);
    const auto r = solve_lp(inst);
    if (!expected) {
      EXPECT_EQ(r.status, LpStatus::infeasible) << "trial " << t;
      continue;
    }
    ASSERT_EQ(r.status, LpStatus::optimal) << "trial " << t;
    EXPECT_NEAR(r.objective, *expected, 1e-7) << "trial " << t;
    expect_primal_feasible(inst, r);
    ++solved;
  }
  EXPECT_GT(solved, 50);
}

TEST(Lp, RelaxationBoundsTheIntegerOptimum) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = testing::random_binary_instance(seed, 6 + seed % 7, 3 + seed % 5);
    const auto e = testing::enumerate_binary(inst);
    const auto r = solve_lp(inst);
    if (!e.any_feasible) continue;
    ASSERT_EQ(r.status, LpStatus::optimal) << seed;
    if (inst.sense == Sense::minimize)
      EXPECT_LE(r.objective, e.best + 1e-7) << seed;
    else
      EXPECT_GE(r.objective, e.best - 1e-7) << seed;
  }
}

TEST(Lp, DegenerateSetCoverRelaxations) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = generate_set_cover(40, 80, 0.1, 1, 100, seed);
    const auto r = solve_lp(inst);
    ASSERT_EQ(r.status, LpStatus::optimal) << r.diagnostics;
    expect_primal_feasible(inst, r);
    EXPECT_GT(r.objective, 0.0);
    const auto a = solve_lp(inst);
    EXPECT_EQ(a.x, r.x);
  }
}

TEST(Lp, IterationLimitReported) {
  const auto inst = generate_set_cover(40, 80, 0.1, 1, 100, 1);
  LpOptions opt;
  opt.max_iterations = 2;
  EXPECT_EQ(solve_lp(inst, opt).status, LpStatus::iteration_limit);
}

}  // namespace
}  // namespace coco
