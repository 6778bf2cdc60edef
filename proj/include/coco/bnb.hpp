#ifndef COCO_BNB_HPP
#define COCO_BNB_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coco/instance.hpp"
#include "coco/lp.hpp"

namespace coco {

struct PoolEntry {
  std::vector<double> values;
  double objective = 0.0;
};

// Best-first list of distinct feasible solutions (distinct on the binary part).
class SolutionPool {
 public:
  SolutionPool() = default;
  SolutionPool(Sense sense, std::size_t capacity, std::size_t num_binary)
      : sense_(sense), capacity_(capacity), num_binary_(num_binary) {}

  // Returns true when the pool changed.
  bool offer(std::vector<double> values, double objective) {
    if (capacity_ == 0) return false;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      if (same_binaries(entries_[k].values, values)) {
        if (!better(sense_, objective, entries_[k].objective)) return false;
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(k));
        break;
      }
    }
    if (full() && !better(sense_, objective, entries_.back().objective)) return false;
    auto pos = entries_.begin();
    while (pos != entries_.end() && !better(sense_, objective, pos->objective)) ++pos;
    entries_.insert(pos, PoolEntry{std::move(values), objective});
    if (entries_.size() > capacity_) entries_.pop_back();
    return true;
  }

  bool full() const { return entries_.size() >= capacity_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  Sense sense() const { return sense_; }
  std::size_t num_binary() const { return num_binary_; }
  const std::vector<PoolEntry>& entries() const { return entries_; }
  const PoolEntry& best() const { return entries_.front(); }
  const PoolEntry& operator[](std::size_t k) const { return entries_[k]; }

 private:
  bool same_binaries(const std::vector<double>& a, const std::vector<double>& b) const {
    for (std::size_t j = 0; j < num_binary_; ++j)
      if (std::lround(a[j]) != std::lround(b[j])) return false;
    return true;
  }

  Sense sense_ = Sense::minimize;
  std::size_t capacity_ = 0;
  std::size_t num_binary_ = 0;
  std::vector<PoolEntry> entries_;
};

struct BnbConfig {
  std::size_t node_limit = 100000;
  double time_limit = 3600.0;  // seconds
  double abs_gap_tol = 1e-6;
  double integrality_tol = 1e-6;
  std::size_t pool_size = 1;
  bool record_trace = false;

  void validate() const {
    if (node_limit < 1) throw std::invalid_argument("BnbConfig: node_limit must be >= 1");
    if (!(time_limit > 0.0)) throw std::invalid_argument("BnbConfig: time_limit must be > 0");
    if (!(abs_gap_tol >= 0.0)) throw std::invalid_argument("BnbConfig: abs_gap_tol must be >= 0");
    if (!(integrality_tol >= 0.0)) throw std::invalid_argument("BnbConfig: integrality_tol must be >= 0");
    if (pool_size < 1) throw std::invalid_argument("BnbConfig: pool_size must be >= 1");
  }
  bool operator==(const BnbConfig&) const = default;
};

enum class BnbStatus { optimal, feasible, infeasible, limit };

inline const char* to_string(BnbStatus s) {
  switch (s) {
    case BnbStatus::optimal: return "optimal";
    case BnbStatus::feasible: return "feasible";
    case BnbStatus::infeasible: return "infeasible";
    case BnbStatus::limit: return "limit";
  }
  return "?";
}

struct TraceEvent {
  std::size_t node = 0;
  double bound = 0.0;
  std::optional<double> incumbent;
  double seconds = 0.0;
};

struct BnbResult {
  BnbStatus status = BnbStatus::infeasible;
  std::optional<Assignment> incumbent;
  double bound = 0.0;  // in the instance's sense: a lower bound when minimizing
  SolutionPool pool;
  std::size_t nodes_explored = 0;
  std::size_t lp_failures = 0;
  std::vector<TraceEvent> trace;

  bool has_solution() const { return incumbent.has_value(); }
};

// "node,bound,incumbent,time" lines; an absent incumbent is written as "nan".
inline std::string format_trace(const std::vector<TraceEvent>& trace) {
  std::ostringstream os;
  os.precision(17);
  os << "node,bound,incumbent,time\n";
  for (const auto& ev : trace) {
    os << ev.node << ',' << ev.bound << ',';
    if (ev.incumbent) os << *ev.incumbent;
    else os << "nan";
    os << ',' << ev.seconds << '\n';
  }
  return os.str();
}

// LP-based branch-and-bound for instances whose integer variables are all
// binary. Best-bound node selection, most-fractional branching (ties to the
// lowest index).
//
// With pool_size N > 1 the search keeps the N best distinct solutions: a
// node is pruned only against the N-th pool objective once the pool is full,
// and nodes with integral LP points keep branching so that the other
// integral points of their subtree are still reachable.
inline BnbResult branch_and_bound(const MilpInstance& inst, const BnbConfig& cfg) {
  cfg.validate();
  inst.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const std::size_t p = inst.num_binary;
  // Everything below is in minimization form.
  const double sign = inst.sense == Sense::minimize ? 1.0 : -1.0;
  const DenseLp lp(inst);

  struct Node {
    double key;
    std::uint64_t id;
    std::vector<std::int8_t> fixing;  // -1 free, 0/1 fixed
  };
  struct Later {
    bool operator()(const Node& a, const Node& b) const {
      return a.key != b.key ? a.key > b.key : a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, Later> open;
  std::uint64_t next_id = 0;
  open.push(Node{-kInf, next_id++, std::vector<std::int8_t>(p, -1)});

  BnbResult res;
  res.pool = SolutionPool(inst.sense, cfg.pool_size, p);
  std::optional<double> incumbent;  // min form
  auto cutoff = [&] {
    if (!res.pool.full()) return kInf;
    return sign * res.pool.entries().back().objective;
  };
  auto global_bound = [&] {
    double b = open.empty() ? kInf : open.top().key;
    if (incumbent) b = std::min(b, *incumbent);
    return b;
  };
  auto record = [&](std::optional<double> bound = std::nullopt) {
    if (!cfg.record_trace) return;
    TraceEvent ev;
    ev.node = res.nodes_explored;
    ev.bound = bound ? *bound : sign * global_bound();
    if (incumbent) ev.incumbent = sign * *incumbent;
    ev.seconds = elapsed();
    res.trace.push_back(ev);
  };

  std::vector<double> lower(inst.lower), upper(inst.upper);
  bool hit_limit = false;
  while (!open.empty()) {
    if (open.top().key >= cutoff() - cfg.abs_gap_tol) break;  // everything left is dominated
    if (res.nodes_explored >= cfg.node_limit || elapsed() >= cfg.time_limit) {
      hit_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    for (std::size_t j = 0; j < p; ++j) {
      lower[j] = node.fixing[j] == 1 ? 1.0 : 0.0;
      upper[j] = node.fixing[j] == 0 ? 0.0 : 1.0;
    }
    const LpResult relax = lp.solve(lower, upper);
    ++res.nodes_explored;

    auto push_children = [&](std::size_t var, double key) {
      for (std::int8_t v : {std::int8_t{0}, std::int8_t{1}}) {
        Node child{key, next_id++, node.fixing};
        child.fixing[var] = v;
        open.push(std::move(child));
      }
    };

    if (relax.status == LpStatus::infeasible) {
      if (res.nodes_explored % 256 == 0) record();
      continue;
    }
    if (relax.status != LpStatus::optimal) {
      // Unreliable relaxation: no bound, no pruning; keep splitting.
      ++res.lp_failures;
      std::size_t var = p;
      for (std::size_t j = 0; j < p; ++j)
        if (node.fixing[j] < 0) {
          var = j;
          break;
        }
      if (var < p) push_children(var, node.key);
      continue;
    }
    const double value = sign * relax.objective;
    if (value >= cutoff() - cfg.abs_gap_tol) continue;

    std::size_t branch_var = p;
    double most = cfg.integrality_tol;
    for (std::size_t j = 0; j < p; ++j) {
      const double frac = std::abs(relax.x[j] - std::round(relax.x[j]));
      if (frac > most) {
        most = frac;
        branch_var = j;
      }
    }

    if (branch_var == p) {
      std::vector<double> x = relax.x;
      for (std::size_t j = 0; j < p; ++j) x[j] = std::round(x[j]);
      if (is_feasible(inst, x, cfg.integrality_tol)) {
        const double obj = evaluate_objective(inst, x);
        const bool improved = !incumbent || sign * obj < *incumbent;
        res.pool.offer(x, obj);
        if (improved) {
          incumbent = sign * obj;
          res.incumbent = Assignment{x, obj};
          record();
        }
      }
      if (cfg.pool_size > 1) {
        std::size_t var = p;
        for (std::size_t j = 0; j < p; ++j)
          if (node.fixing[j] < 0) {
            var = j;
            break;
          }
        if (var < p) push_children(var, value);
      }
    } else {
      push_children(branch_var, value);
    }
    if (res.nodes_explored % 256 == 0) record();
  }

  if (hit_limit) {
    res.status = BnbStatus::limit;
    res.bound = sign * global_bound();
  } else if (res.incumbent) {
    res.status = res.lp_failures ? BnbStatus::feasible : BnbStatus::optimal;
    res.bound = res.incumbent->objective;
  } else {
    res.status = res.lp_failures ? BnbStatus::limit : BnbStatus::infeasible;
    res.bound = sign * kInf;
  }
  record(res.bound);
  return res;
}

}  // namespace coco

#endif  // COCO_BNB_HPP
