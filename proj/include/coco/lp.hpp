#ifndef COCO_LP_HPP
#define COCO_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coco/instance.hpp"

namespace coco {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit, numerical_error };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    case LpStatus::numerical_error: return "numerical_error";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::numerical_error;
  std::vector<double> x;   // structural values (meaningful when optimal)
  double objective = 0.0;  // c . x in the instance's own sense
  std::size_t iterations = 0;
  std::string diagnostics;
};

struct LpOptions {
  std::size_t max_iterations = 0;  // 0: 100 * (rows + cols) + 1000
  std::size_t bland_after = 1000;  // degenerate pivots before switching to Bland's rule
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  double check_tol = 1e-7;  // final row/bound verification
};

// Dense bounded-variable primal simplex over the LP relaxation of an
// instance. The constraint matrix is densified once; each solve() starts
// from scratch with the given variable bounds (no warm start).
//
// Internal form: A x + s = b with one slack per row, slack bounds
//   <= : s in [0, inf)    >= : s in (-inf, 0]    == : s in [0, 0]
// and an artificial column for every row whose slack cannot absorb the
// initial residual. Phase 1 minimizes the sum of artificials, phase 2 the
// objective (negated for maximization).
class DenseLp {
 public:
  explicit DenseLp(const MilpInstance& inst)
      : n_(inst.num_vars), m_(inst.rows.size()), sense_(inst.sense), objective_(inst.objective),
        a_(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_)), rhs_(m_), relation_(m_), rows_(inst.rows) {
    a_.setZero();
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& r = inst.rows[i];
      for (std::size_t k = 0; k < r.cols.size(); ++k)
        a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r.cols[k])) = r.coefs[k];
      rhs_[i] = r.rhs;
      relation_[i] = r.relation;
    }
  }

  std::size_t num_vars() const { return n_; }
  std::size_t num_rows() const { return m_; }

  LpResult solve(std::span<const double> lower, std::span<const double> upper, const LpOptions& opt = {}) const {
    Solver s(*this, lower, upper, opt);
    return s.run();
  }

 private:
  enum class State : unsigned char { basic, at_lower, at_upper, free_zero };

  class Solver {
   public:
    Solver(const DenseLp& lp, std::span<const double> lower, std::span<const double> upper, const LpOptions& opt)
        : lp_(lp), opt_(opt) {
      const std::size_t n = lp.n_, m = lp.m_;
      if (lower.size() != n || upper.size() != n) throw std::invalid_argument("DenseLp::solve: bound length mismatch");
      lo_.assign(lower.begin(), lower.end());
      up_.assign(upper.begin(), upper.end());
      for (std::size_t i = 0; i < m; ++i) {
        switch (lp.relation_[i]) {
          case Relation::less_equal: lo_.push_back(0.0); up_.push_back(kInf); break;
          case Relation::greater_equal: lo_.push_back(-kInf); up_.push_back(0.0); break;
          case Relation::equal: lo_.push_back(0.0); up_.push_back(0.0); break;
        }
      }
      cols_ = n + m;
      val_.assign(cols_, 0.0);
      state_.assign(cols_, State::at_lower);
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lo_[j])) {
          val_[j] = lo_[j];
          state_[j] = State::at_lower;
        } else if (std::isfinite(up_[j])) {
          val_[j] = up_[j];
          state_[j] = State::at_upper;
        } else {
          val_[j] = 0.0;
          state_[j] = State::free_zero;
        }
      }
      // residuals and initial basis
      std::vector<double> resid(m);
      for (std::size_t i = 0; i < m; ++i) {
        double r = lp.rhs_[i];
        for (std::size_t j = 0; j < n; ++j) r -= lp.a_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * val_[j];
        resid[i] = r;
      }
      std::vector<double> art_sign(m, 0.0);
      basis_.assign(m, 0);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t s = n + i;
        if (resid[i] >= lo_[s] && resid[i] <= up_[s]) {
          basis_[i] = s;
          state_[s] = State::basic;
          val_[s] = resid[i];
        } else {
          const double at = std::clamp(resid[i], lo_[s], up_[s]);
          val_[s] = at;
          state_[s] = at == lo_[s] ? State::at_lower : State::at_upper;
          art_sign[i] = resid[i] - at > 0 ? 1.0 : -1.0;
          const std::size_t a = cols_++;
          lo_.push_back(0.0);
          up_.push_back(kInf);
          val_.push_back(std::abs(resid[i] - at));
          state_.push_back(State::basic);
          art_row_.push_back(i);
          basis_[i] = a;
        }
      }
      first_art_ = n + m;
      tab_ = RowMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols_));
      for (std::size_t i = 0; i < m; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        tab_.row(r).head(static_cast<Eigen::Index>(n)) = lp.a_.row(r);
        tab_(r, static_cast<Eigen::Index>(n + i)) = 1.0;
        if (art_sign[i] != 0.0) tab_.row(r) *= art_sign[i];  // art column coefficient is sign, row / sign
      }
      for (std::size_t k = 0; k < art_row_.size(); ++k)
        tab_(static_cast<Eigen::Index>(art_row_[k]), static_cast<Eigen::Index>(first_art_ + k)) = 1.0;
      art_sign_ = std::move(art_sign);
      max_iter_ = opt.max_iterations ? opt.max_iterations : 100 * (m + n) + 1000;
    }

    LpResult run() {
      LpResult res;
      const std::size_t n = lp_.n_;
      if (cols_ > first_art_) {
        std::vector<double> cost(cols_, 0.0);
        for (std::size_t j = first_art_; j < cols_; ++j) cost[j] = 1.0;
        const auto st = iterate(cost);
        if (st != LpStatus::optimal) return finish(res, st == LpStatus::unbounded ? LpStatus::numerical_error : st,
                                                   "phase 1 did not terminate normally");
        double infeas = 0.0;
        for (std::size_t j = first_art_; j < cols_; ++j) infeas += val_[j];
        if (infeas > opt_.check_tol) return finish(res, LpStatus::infeasible, "");
        for (std::size_t j = first_art_; j < cols_; ++j) {
          up_[j] = 0.0;
          if (state_[j] != State::basic) {
            val_[j] = 0.0;
            state_[j] = State::at_lower;
          }
        }
      }
      std::vector<double> cost(cols_, 0.0);
      const double sign = lp_.sense_ == Sense::minimize ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n; ++j) cost[j] = sign * lp_.objective_[j];
      const auto st = iterate(cost);
      if (st != LpStatus::optimal) return finish(res, st, "");
      return finish(res, LpStatus::optimal, "");
    }

   private:
    LpStatus iterate(const std::vector<double>& cost) {
      const std::size_t m = lp_.m_;
      // reduced costs d = c - c_B T
      Eigen::RowVectorXd d(static_cast<Eigen::Index>(cols_));
      for (std::size_t j = 0; j < cols_; ++j) d(static_cast<Eigen::Index>(j)) = cost[j];
      for (std::size_t i = 0; i < m; ++i) {
        const double cb = cost[basis_[i]];
        if (cb != 0.0) d -= cb * tab_.row(static_cast<Eigen::Index>(i));
      }
      while (true) {
        if (iterations_ >= max_iter_) return LpStatus::iteration_limit;
        // pricing
        std::size_t enter = cols_;
        double enter_dir = 0.0;
        double best_score = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
          const State s = state_[j];
          if (s == State::basic || lo_[j] == up_[j]) continue;
          const double dj = d(static_cast<Eigen::Index>(j));
          double dir = 0.0;
          if ((s == State::at_lower || s == State::free_zero) && dj < -opt_.dual_tol) dir = 1.0;
          else if ((s == State::at_upper || s == State::free_zero) && dj > opt_.dual_tol) dir = -1.0;
          if (dir == 0.0) continue;
          if (bland_) {
            enter = j;
            enter_dir = dir;
            break;
          }
          if (std::abs(dj) > best_score) {
            best_score = std::abs(dj);
            enter = j;
            enter_dir = dir;
          }
        }
        if (enter == cols_) return LpStatus::optimal;

        // ratio test
        const auto ej = static_cast<Eigen::Index>(enter);
        double step = (std::isfinite(lo_[enter]) && std::isfinite(up_[enter])) ? up_[enter] - lo_[enter] : kInf;
        std::size_t leave_row = m;  // m: bound flip of the entering column
        double leave_alpha = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double alpha = tab_(static_cast<Eigen::Index>(i), ej);
          if (std::abs(alpha) <= opt_.pivot_tol) continue;
          const double rate = -enter_dir * alpha;
          const std::size_t b = basis_[i];
          double ratio;
          if (rate < 0.0) {
            if (!std::isfinite(lo_[b])) continue;
            ratio = (val_[b] - lo_[b]) / -rate;
          } else {
            if (!std::isfinite(up_[b])) continue;
            ratio = (up_[b] - val_[b]) / rate;
          }
          ratio = std::max(ratio, 0.0);
          bool take = ratio < step - 1e-12;
          if (!take && std::abs(ratio - step) <= 1e-12 && leave_row != m) {
            take = bland_ ? b < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
          }
          if (take) {
            step = ratio;
            leave_row = i;
            leave_alpha = alpha;
          }
        }
        if (!std::isfinite(step)) return LpStatus::unbounded;

        ++iterations_;
        if (step <= 1e-12) {
          if (++degenerate_ >= opt_.bland_after) bland_ = true;
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double alpha = tab_(static_cast<Eigen::Index>(i), ej);
          if (alpha != 0.0) val_[basis_[i]] -= enter_dir * alpha * step;
        }
        val_[enter] += enter_dir * step;

        if (leave_row == m) {
          state_[enter] = enter_dir > 0 ? State::at_upper : State::at_lower;
          val_[enter] = enter_dir > 0 ? up_[enter] : lo_[enter];
          continue;
        }

        const std::size_t leave = basis_[leave_row];
        const double rate = -enter_dir * leave_alpha;
        if (rate < 0.0) {
          val_[leave] = lo_[leave];
          state_[leave] = State::at_lower;
        } else {
          val_[leave] = up_[leave];
          state_[leave] = State::at_upper;
        }
        basis_[leave_row] = enter;
        state_[enter] = State::basic;

        const auto r = static_cast<Eigen::Index>(leave_row);
        tab_.row(r) /= tab_(r, ej);
        for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
          if (i == r) continue;
          const double f = tab_(i, ej);
          if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
        }
        const double f = d(ej);
        if (f != 0.0) d -= f * tab_.row(r);
      }
    }

    // Recomputes basic values from a fresh factorization and verifies the
    // point against the original rows before reporting optimality.
    LpResult& finish(LpResult& res, LpStatus status, std::string diag) {
      const std::size_t n = lp_.n_, m = lp_.m_;
      res.iterations = iterations_;
      res.status = status;
      res.diagnostics = std::move(diag);
      if (status != LpStatus::optimal) return res;
      if (m > 0) {
        RowMatrix basis_matrix = RowMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i) rhs(static_cast<Eigen::Index>(i)) = lp_.rhs_[i];
        auto column = [&](std::size_t j, Eigen::VectorXd& out) {
          out.setZero(static_cast<Eigen::Index>(m));
          if (j < n) out = lp_.a_.col(static_cast<Eigen::Index>(j));
          else if (j < n + m) out(static_cast<Eigen::Index>(j - n)) = 1.0;
          else {
            const std::size_t row = art_row_[j - first_art_];
            out(static_cast<Eigen::Index>(row)) = art_sign_[row];
          }
        };
        Eigen::VectorXd col;
        for (std::size_t j = 0; j < cols_; ++j) {
          if (state_[j] == State::basic || val_[j] == 0.0) continue;
          column(j, col);
          rhs -= val_[j] * col;
        }
        for (std::size_t i = 0; i < m; ++i) {
          column(basis_[i], col);
          basis_matrix.col(static_cast<Eigen::Index>(i)) = col;
        }
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
        const Eigen::VectorXd xb = lu.solve(rhs);
        for (std::size_t i = 0; i < m; ++i) val_[basis_[i]] = xb(static_cast<Eigen::Index>(i));
      }
      res.x.assign(val_.begin(), val_.begin() + static_cast<std::ptrdiff_t>(n));
      // snap structural values that sit within tolerance of a bound
      for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lp_lower(j)) && std::abs(res.x[j] - lp_lower(j)) <= opt_.check_tol) res.x[j] = lp_lower(j);
        if (std::isfinite(lp_upper(j)) && std::abs(res.x[j] - lp_upper(j)) <= opt_.check_tol) res.x[j] = lp_upper(j);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (res.x[j] < lp_lower(j) - opt_.check_tol || res.x[j] > lp_upper(j) + opt_.check_tol) {
          res.status = LpStatus::numerical_error;
          res.diagnostics = "bound of variable " + std::to_string(j) + " violated after refactorization";
          return res;
        }
      }
      for (std::size_t i = 0; i < m; ++i) {
        const auto& row = lp_.rows_[i];
        const double v = row_violation(row, row.activity(res.x));
        if (v > opt_.check_tol * (1.0 + std::abs(row.rhs))) {
          res.status = LpStatus::numerical_error;
          res.diagnostics = "row " + std::to_string(i) + " violated by " + std::to_string(v) + " after refactorization";
          return res;
        }
      }
      res.objective = 0.0;
      for (std::size_t j = 0; j < n; ++j) res.objective += lp_.objective_[j] * res.x[j];
      return res;
    }

    double lp_lower(std::size_t j) const { return lo_[j]; }
    double lp_upper(std::size_t j) const { return up_[j]; }

    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    const DenseLp& lp_;
    const LpOptions& opt_;
    std::vector<double> lo_, up_, val_;
    std::vector<State> state_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> art_row_;
    std::vector<double> art_sign_;
    std::size_t cols_ = 0;
    std::size_t first_art_ = 0;
    RowMatrix tab_;
    std::size_t iterations_ = 0;
    std::size_t max_iter_ = 0;
    std::size_t degenerate_ = 0;
    bool bland_ = false;
  };

  std::size_t n_, m_;
  Sense sense_;
  std::vector<double> objective_;
  Eigen::MatrixXd a_;
  std::vector<double> rhs_;
  std::vector<Relation> relation_;
  std::vector<ConstraintRow> rows_;
};

// LP relaxation of the instance with its own bounds (binaries in [0, 1]).
inline LpResult solve_lp(const MilpInstance& inst, const LpOptions& opt = {}) {
  const DenseLp lp(inst);
  return lp.solve(inst.lower, inst.upper, opt);
}

}  // namespace coco

#endif  // COCO_LP_HPP
