#ifndef COCO_PIPELINE_HPP
#define COCO_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "coco/bnb.hpp"
#include "coco/generators.hpp"
#include "coco/graph.hpp"
#include "coco/instance_io.hpp"
#include "coco/loss.hpp"
#include "coco/nn.hpp"
#include "coco/search.hpp"

namespace coco {

enum class LossKind { bce, vcl, vcl_no_rank, vcl_no_mscl };

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::bce: return "bce";
    case LossKind::vcl: return "vcl";
    case LossKind::vcl_no_rank: return "vcl_no_rank";
    case LossKind::vcl_no_mscl: return "vcl_no_mscl";
  }
  return "?";
}

inline std::optional<LossKind> parse_loss_kind(std::string_view s) {
  for (auto k : {LossKind::bce, LossKind::vcl, LossKind::vcl_no_rank, LossKind::vcl_no_mscl})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

struct TrainConfig {
  std::size_t epochs = 200;
  double lr = 1e-4;
  LossKind loss_kind = LossKind::vcl;
  bool icc_enabled = true;
  std::size_t pool_size = 10;
  double weight_temperature = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (pool_size < 1) throw std::invalid_argument("TrainConfig: pool_size must be >= 1");
    if (!(weight_temperature > 0.0)) throw std::invalid_argument("TrainConfig: weight_temperature must be > 0");
  }
  bool operator==(const TrainConfig&) const = default;
};

class LabelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- labels

// Best-N distinct feasible solutions of the instance (N = cfg.pool_size).
inline SolutionPool collect_pool(const MilpInstance& inst, const BnbConfig& cfg) {
  auto res = branch_and_bound(inst, cfg);
  if (res.pool.empty())
    throw LabelError("collect_pool: no feasible solution for '" + inst.name + "' (status " + to_string(res.status) +
                     ")");
  return std::move(res.pool);
}

inline std::vector<double> compute_weights(std::span<const double> objectives, Sense sense, double temperature) {
  if (objectives.empty()) throw std::invalid_argument("compute_weights: empty pool");
  if (!(temperature > 0.0)) throw std::invalid_argument("compute_weights: temperature must be > 0");
  const double s = sense == Sense::minimize ? 1.0 : -1.0;
  double best = s * objectives[0];
  for (double o : objectives) best = std::min(best, s * o);
  std::vector<double> w(objectives.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-(s * objectives[i] - best) / temperature);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

inline std::vector<double> compute_weights(const SolutionPool& pool, double temperature) {
  std::vector<double> obj;
  for (const auto& e : pool.entries()) obj.push_back(e.objective);
  return compute_weights(obj, pool.sense(), temperature);
}

inline LabeledSolutionSet make_labels(const SolutionPool& pool, double temperature) {
  LabeledSolutionSet out;
  out.weights = compute_weights(pool, temperature);
  for (const auto& e : pool.entries()) {
    std::vector<std::uint8_t> x(pool.num_binary());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = e.values[j] > 0.5 ? 1 : 0;
    out.solutions.push_back(std::move(x));
    out.objectives.push_back(e.objective);
  }
  return out;
}

// Pool file: {"format": "coco-pool", "sense", "num_binary", "solutions": [{"objective", "values"}]}
inline std::string write_pool(const SolutionPool& pool) {
  nlohmann::json doc;
  doc["format"] = "coco-pool";
  doc["version"] = 1;
  doc["sense"] = pool.sense() == Sense::minimize ? "minimize" : "maximize";
  doc["capacity"] = pool.capacity();
  doc["num_binary"] = pool.num_binary();
  doc["solutions"] = nlohmann::json::array();
  for (const auto& e : pool.entries()) doc["solutions"].push_back({{"objective", e.objective}, {"values", e.values}});
  return doc.dump(1) + "\n";
}

inline SolutionPool read_pool(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("pool: ") + e.what());
  }
  try {
    if (doc.at("format") != "coco-pool") throw ParseError("pool: 'format' must be \"coco-pool\"");
    const auto sense_name = doc.at("sense").get<std::string>();
    if (sense_name != "minimize" && sense_name != "maximize") throw ParseError("pool: bad 'sense'");
    SolutionPool pool(sense_name == "minimize" ? Sense::minimize : Sense::maximize,
                      doc.at("capacity").get<std::size_t>(), doc.at("num_binary").get<std::size_t>());
    for (const auto& s : doc.at("solutions"))
      pool.offer(s.at("values").get<std::vector<double>>(), s.at("objective").get<double>());
    return pool;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("pool: ") + e.what());
  }
}

// ---------------------------------------------------------------- dataset

enum class Split { train, valid, test };

inline const char* to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::valid: return "valid";
    case Split::test: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view s) {
  for (auto v : {Split::train, Split::valid, Split::test})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

struct DataConfig {
  std::string family = "sc";  // sc | ca
  std::size_t num_train = 60;
  std::size_t num_valid = 15;
  std::size_t num_test = 25;
  std::size_t sc_rows = 40;
  std::size_t sc_cols = 80;
  double sc_density = 0.1;
  std::int64_t sc_cost_lo = 1;
  std::int64_t sc_cost_hi = 100;
  std::size_t ca_items = 8;
  std::size_t ca_bids = 20;
  std::size_t ca_max_bundle = 3;

  void validate() const {
    if (family != "sc" && family != "ca") throw std::invalid_argument("DataConfig: family must be \"sc\" or \"ca\"");
    if (num_train < 1 || num_valid < 1) throw std::invalid_argument("DataConfig: train and valid splits need >= 1");
  }
  bool operator==(const DataConfig&) const = default;
};

inline MilpInstance generate_instance(const DataConfig& dc, std::uint64_t seed) {
  if (dc.family == "sc")
    return generate_set_cover(dc.sc_rows, dc.sc_cols, dc.sc_density, dc.sc_cost_lo, dc.sc_cost_hi, seed);
  return generate_comb_auction(dc.ca_items, dc.ca_bids, dc.ca_max_bundle, seed);
}

struct ManifestEntry {
  std::string name;
  Split split = Split::train;
  std::string instance_path;
  std::string pool_path;      // empty until labeled
  std::optional<double> bks;  // best pool objective
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry*> split(Split s) const {
    std::vector<const ManifestEntry*> out;
    for (const auto& e : entries)
      if (e.split == s) out.push_back(&e);
    return out;
  }
  bool operator==(const Manifest&) const = default;
};

inline std::string write_manifest(const Manifest& m) {
  nlohmann::json doc;
  doc["format"] = "coco-manifest";
  doc["version"] = 1;
  doc["entries"] = nlohmann::json::array();
  for (const auto& e : m.entries) {
    nlohmann::json j{{"name", e.name}, {"split", to_string(e.split)}, {"instance", e.instance_path}};
    if (!e.pool_path.empty()) j["pool"] = e.pool_path;
    if (e.bks) j["bks"] = *e.bks;
    doc["entries"].push_back(std::move(j));
  }
  return doc.dump(1) + "\n";
}

inline Manifest read_manifest(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  Manifest m;
  try {
    if (doc.at("format") != "coco-manifest") throw ParseError("manifest: 'format' must be \"coco-manifest\"");
    const auto& entries = doc.at("entries");
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& j = entries[k];
      ManifestEntry e;
      e.name = j.at("name").get<std::string>();
      const auto split = parse_split(j.at("split").get<std::string>());
      if (!split) throw ParseError("manifest: entries[" + std::to_string(k) + "].split is not train/valid/test");
      e.split = *split;
      e.instance_path = j.at("instance").get<std::string>();
      if (j.contains("pool")) e.pool_path = j.at("pool").get<std::string>();
      if (j.contains("bks")) e.bks = j.at("bks").get<double>();
      m.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return m;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to per-index slots; the first exception is rethrown after all workers stop.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < jobs; ++t)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

// Instances for all three splits, seeded per split and index.
inline std::vector<std::pair<Split, MilpInstance>> generate_dataset(const DataConfig& dc, std::uint64_t seed) {
  dc.validate();
  std::vector<std::pair<Split, MilpInstance>> out;
  for (auto [split, count] : {std::pair{Split::train, dc.num_train}, std::pair{Split::valid, dc.num_valid},
                              std::pair{Split::test, dc.num_test}}) {
    for (std::size_t i = 0; i < count; ++i) {
      auto inst = generate_instance(dc, derive_seed(seed, std::string(to_string(split)) + "/" + std::to_string(i)));
      inst.name = std::string(to_string(split)) + "_" + std::to_string(i) + "_" + inst.name;
      out.emplace_back(split, std::move(inst));
    }
  }
  return out;
}

// In-memory training example.
struct Example {
  std::string name;
  MilpInstance instance;
  BipartiteGraph graph;
  LabeledSolutionSet labels;
  double bks = 0.0;
};

inline Example make_example(MilpInstance inst, const SolutionPool& pool, double temperature) {
  Example ex;
  ex.name = inst.name;
  ex.graph = encode(inst);
  ex.labels = make_labels(pool, temperature);
  ex.bks = pool.best().objective;
  ex.instance = std::move(inst);
  return ex;
}

// Labels every instance; instances without a feasible solution are skipped
// with a warning.
inline std::vector<Example> label_instances(std::vector<MilpInstance> insts, const BnbConfig& cfg, double temperature,
                                            std::size_t jobs = 1) {
  std::vector<std::optional<SolutionPool>> pools(insts.size());
  parallel_for(insts.size(), jobs, [&](std::size_t i) {
    try {
      pools[i] = collect_pool(insts[i], cfg);
    } catch (const LabelError& e) {
      spdlog::warn("{}; skipped", e.what());
    }
  });
  std::vector<Example> out;
  for (std::size_t i = 0; i < insts.size(); ++i)
    if (pools[i]) out.push_back(make_example(std::move(insts[i]), *pools[i], temperature));
  return out;
}

// ---------------------------------------------------------------- training

inline LossValue training_loss(LossKind kind, std::span<const double> logits, const LabeledSolutionSet& labels,
                               const LossConfig& lcfg) {
  switch (kind) {
    case LossKind::bce: return bce_weighted(logits, labels);
    case LossKind::vcl: return vcl(logits, labels, lcfg, ContrastiveMix{1.0, 1.0});
    case LossKind::vcl_no_rank: return vcl(logits, labels, lcfg, ContrastiveMix{1.0, 0.0});
    case LossKind::vcl_no_mscl: return vcl(logits, labels, lcfg, ContrastiveMix{0.0, 1.0});
  }
  throw std::logic_error("training_loss: unknown kind");
}

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
};

struct TrainResult {
  GnnModel model;
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
};

inline double mean_loss(const GnnModel& model, const std::vector<Example>& data, LossKind kind,
                        const LossConfig& lcfg) {
  double total = 0.0;
  for (const auto& ex : data) total += training_loss(kind, forward(model, ex.graph).logits, ex.labels, lcfg).loss;
  return total / static_cast<double>(data.size());
}

// Batch size 1, seeded shuffle per epoch, best-validation snapshot.
inline TrainResult train_model(const std::vector<Example>& train, const std::vector<Example>& valid, GnnConfig gcfg,
                               const TrainConfig& tcfg, const LossConfig& lcfg) {
  tcfg.validate();
  lcfg.validate();
  if (train.empty() || valid.empty()) throw std::invalid_argument("train_model: train and valid splits must be nonempty");
  gcfg.icc_enabled = tcfg.icc_enabled;
  GnnModel model(gcfg);
  AdamState state(model.num_parameters());
  AdamOptions adam;
  adam.lr = tcfg.lr;

  TrainResult out{model, {}, 0};
  double best = kInf;
  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(tcfg.seed, "shuffle/" + std::to_string(epoch)));
    rng.shuffle(std::span<std::size_t>(order));
    double train_total = 0.0;
    for (auto idx : order) {
      const auto& ex = train[idx];
      ForwardTape tape;
      const auto pred = forward(model, ex.graph, &tape);
      const auto lv = training_loss(tcfg.loss_kind, pred.logits, ex.labels, lcfg);
      if (!std::isfinite(lv.loss))
        throw TrainingError("train_model: non-finite loss on '" + ex.name + "' in epoch " + std::to_string(epoch));
      train_total += lv.loss;
      adam_step(model, backward(model, ex.graph, tape, lv.grad), state, adam);
    }
    EpochRecord rec{epoch, train_total / static_cast<double>(train.size()),
                    mean_loss(model, valid, tcfg.loss_kind, lcfg)};
    if (!std::isfinite(rec.valid_loss))
      throw TrainingError("train_model: non-finite validation loss in epoch " + std::to_string(epoch));
    spdlog::debug("epoch {} train {:.6f} valid {:.6f}", epoch, rec.train_loss, rec.valid_loss);
    out.log.push_back(rec);
    if (rec.valid_loss < best) {
      best = rec.valid_loss;
      out.best_epoch = epoch;
      out.model = model;
    }
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string training_log_csv(const std::vector<EpochRecord>& log) {
  std::string out = "epoch,train_loss,valid_loss\n";
  for (const auto& r : log)
    out += std::to_string(r.epoch) + "," + format_double(r.train_loss) + "," + format_double(r.valid_loss) + "\n";
  return out;
}

// ---------------------------------------------------------------- evaluation

inline double gap_abs(double obj, double bks) { return std::abs(obj - bks); }

enum class Outcome { win, tie, loss };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
  }
  return "?";
}

struct ResultRow {
  std::string name;
  double bks = 0.0;
  std::optional<double> ps_obj;
  std::optional<double> plain_obj;
  double ps_gap = kInf;  // no solution: infinite gap
  double plain_gap = kInf;
  BnbStatus ps_status = BnbStatus::infeasible;
  BnbStatus plain_status = BnbStatus::infeasible;
  std::size_t ps_nodes = 0;
  std::size_t plain_nodes = 0;
  Outcome outcome = Outcome::tie;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  double mean_ps_obj = 0.0;  // over instances where PS found a solution
  double mean_ps_gap = 0.0;
  double mean_plain_gap = 0.0;
  std::size_t wins = 0, ties = 0, losses = 0;
};

inline constexpr double kTieTolerance = 1e-9;

inline Outcome compare_gaps(double ps, double plain) {
  if (ps == plain || std::abs(ps - plain) <= kTieTolerance) return Outcome::tie;
  return ps < plain ? Outcome::win : Outcome::loss;
}

inline ResultTable summarize(std::vector<ResultRow> rows) {
  ResultTable t;
  t.rows = std::move(rows);
  std::size_t with_obj = 0;
  for (const auto& r : t.rows) {
    if (r.ps_obj) {
      t.mean_ps_obj += *r.ps_obj;
      ++with_obj;
    }
    t.mean_ps_gap += r.ps_gap;
    t.mean_plain_gap += r.plain_gap;
    (r.outcome == Outcome::win ? t.wins : r.outcome == Outcome::tie ? t.ties : t.losses)++;
  }
  if (with_obj) t.mean_ps_obj /= static_cast<double>(with_obj);
  if (!t.rows.empty()) {
    t.mean_ps_gap /= static_cast<double>(t.rows.size());
    t.mean_plain_gap /= static_cast<double>(t.rows.size());
  }
  return t;
}

// Predict-and-search against the plain solver, both under the same budget.
inline ResultTable evaluate_suite(const std::vector<Example>& test, const GnnModel& model, const SearchConfig& sc,
                                  const BnbConfig& cfg, std::size_t jobs = 1) {
  std::vector<ResultRow> rows(test.size());
  parallel_for(test.size(), jobs, [&](std::size_t i) {
    const auto& ex = test[i];
    ResultRow row;
    row.name = ex.name;
    row.bks = ex.bks;
    const auto ps = search_around(ex.instance, forward(model, ex.graph).marginals, sc, cfg);
    const auto plain = branch_and_bound(ex.instance, cfg);
    row.ps_status = ps.status;
    row.plain_status = plain.status;
    row.ps_nodes = ps.nodes_explored;
    row.plain_nodes = plain.nodes_explored;
    if (ps.incumbent) {
      row.ps_obj = ps.incumbent->objective;
      row.ps_gap = gap_abs(*row.ps_obj, ex.bks);
    }
    if (plain.incumbent) {
      row.plain_obj = plain.incumbent->objective;
      row.plain_gap = gap_abs(*row.plain_obj, ex.bks);
    }
    row.outcome = compare_gaps(row.ps_gap, row.plain_gap);
    rows[i] = std::move(row);
  });
  return summarize(std::move(rows));
}

inline std::string result_table_csv(const ResultTable& t) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
  std::string out = "instance,bks,ps_obj,ps_gap,ps_status,ps_nodes,plain_obj,plain_gap,plain_status,plain_nodes,outcome\n";
  for (const auto& r : t.rows)
    out += r.name + "," + format_double(r.bks) + "," + opt(r.ps_obj) + "," + format_double(r.ps_gap) + "," +
           to_string(r.ps_status) + "," + std::to_string(r.ps_nodes) + "," + opt(r.plain_obj) + "," +
           format_double(r.plain_gap) + "," + to_string(r.plain_status) + "," + std::to_string(r.plain_nodes) + "," +
           to_string(r.outcome) + "\n";
  out += "mean,,," + format_double(t.mean_ps_gap) + ",,,," + format_double(t.mean_plain_gap) + ",,," +
         std::to_string(t.wins) + "/" + std::to_string(t.ties) + "/" + std::to_string(t.losses) + "\n";
  return out;
}

}  // namespace coco

#endif  // COCO_PIPELINE_HPP
