#ifndef COCO_INSTANCE_HPP
#define COCO_INSTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coco {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class InstanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Relation { less_equal, greater_equal, equal };
enum class Sense { minimize, maximize };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "==";
  }
  return "?";
}

inline const char* to_string(Sense s) {
  return s == Sense::minimize ? "minimize" : "maximize";
}

// One sparse row  sum_j coefs[k] * x[cols[k]]  (relation)  rhs.
struct ConstraintRow {
  std::vector<std::size_t> cols;
  std::vector<double> coefs;
  Relation relation = Relation::less_equal;
  double rhs = 0.0;

  double activity(std::span<const double> x) const {
    double lhs = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) lhs += coefs[k] * x[cols[k]];
    return lhs;
  }

  bool operator==(const ConstraintRow&) const = default;
};

// A MILP whose first num_binary variables are binary; the rest are continuous.
struct MilpInstance {
  std::string name;
  std::size_t num_vars = 0;
  std::size_t num_binary = 0;
  std::vector<double> objective;
  Sense sense = Sense::minimize;
  std::vector<ConstraintRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows) nnz += r.cols.size();
    return nnz;
  }

  // Throws InstanceError describing the first broken invariant.
  void validate() const {
    auto fail = [&](const std::string& what) {
      throw InstanceError("instance '" + name + "': " + what);
    };
    if (num_binary > num_vars) fail("num_binary exceeds num_vars");
    if (objective.size() != num_vars) fail("objective length differs from num_vars");
    if (lower.size() != num_vars || upper.size() != num_vars) fail("bound vectors differ from num_vars");
    for (std::size_t j = 0; j < num_vars; ++j) {
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j]))
        fail("non-finite data at variable " + std::to_string(j));
      if (lower[j] > upper[j]) fail("lower > upper at variable " + std::to_string(j));
      if (j < num_binary && (lower[j] != 0.0 || upper[j] != 1.0))
        fail("binary variable " + std::to_string(j) + " must have bounds [0, 1]");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const std::string where = "row " + std::to_string(i) + ": ";
      if (r.cols.empty()) fail(where + "empty row");
      if (r.cols.size() != r.coefs.size()) fail(where + "cols/coefs length mismatch");
      if (!std::isfinite(r.rhs)) fail(where + "non-finite rhs");
      for (std::size_t k = 0; k < r.cols.size(); ++k) {
        if (r.cols[k] >= num_vars) fail(where + "column index out of range");
        if (k > 0 && r.cols[k] == r.cols[k - 1]) fail(where + "duplicate column index " + std::to_string(r.cols[k]));
        if (k > 0 && r.cols[k] < r.cols[k - 1]) fail(where + "column indices not sorted");
        if (r.coefs[k] == 0.0 || !std::isfinite(r.coefs[k])) fail(where + "zero or non-finite coefficient");
      }
    }
  }

  bool operator==(const MilpInstance&) const = default;
};

struct Assignment {
  std::vector<double> values;
  double objective = 0.0;
};

inline void check_dimension(const MilpInstance& inst, std::size_t size) {
  if (size != inst.num_vars)
    throw InstanceError("dimension mismatch: instance '" + inst.name + "' has " +
                        std::to_string(inst.num_vars) + " variables, got vector of length " +
                        std::to_string(size));
}

// c . x summed in index order.
inline double evaluate_objective(const MilpInstance& inst, std::span<const double> x) {
  check_dimension(inst, x.size());
  double value = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) value += inst.objective[j] * x[j];
  return value;
}

inline Assignment make_assignment(const MilpInstance& inst, std::vector<double> x) {
  const double obj = evaluate_objective(inst, x);
  return {std::move(x), obj};
}

struct RowViolation {
  std::size_t row = 0;
  double amount = 0.0;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<RowViolation> violations;
  std::vector<std::size_t> integrality_violations;
  std::vector<std::size_t> bound_violations;
};

inline double row_violation(const ConstraintRow& row, double lhs) {
  switch (row.relation) {
    case Relation::less_equal: return lhs - row.rhs;
    case Relation::greater_equal: return row.rhs - lhs;
    case Relation::equal: return std::abs(lhs - row.rhs);
  }
  return 0.0;
}

inline FeasibilityReport check_feasibility(const MilpInstance& inst, std::span<const double> x,
                                           double tol = 1e-6) {
  check_dimension(inst, x.size());
  if (!(tol >= 0.0)) throw std::invalid_argument("check_feasibility: tol must be >= 0");
  FeasibilityReport report;
  for (std::size_t i = 0; i < inst.rows.size(); ++i) {
    const double v = row_violation(inst.rows[i], inst.rows[i].activity(x));
    if (v > tol) report.violations.push_back({i, v});
  }
  for (std::size_t j = 0; j < inst.num_vars; ++j) {
    if (x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol) report.bound_violations.push_back(j);
    if (j < inst.num_binary && std::min(std::abs(x[j]), std::abs(x[j] - 1.0)) > tol)
      report.integrality_violations.push_back(j);
  }
  report.feasible = report.violations.empty() && report.integrality_violations.empty() &&
                    report.bound_violations.empty();
  return report;
}

inline bool is_feasible(const MilpInstance& inst, std::span<const double> x, double tol = 1e-6) {
  return check_feasibility(inst, x, tol).feasible;
}

// True when a is strictly better than b under the instance's sense.
inline bool better(Sense sense, double a, double b) {
  return sense == Sense::minimize ? a < b : a > b;
}

}  // namespace coco

#endif  // COCO_INSTANCE_HPP
