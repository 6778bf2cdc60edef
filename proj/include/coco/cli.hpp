#ifndef COCO_CLI_HPP
#define COCO_CLI_HPP

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "coco/config.hpp"
#include "coco/diagnostics.hpp"
#include "coco/instance_io.hpp"
#include "coco/pipeline.hpp"

namespace coco {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

// Missing or unreadable inputs; reported like configuration errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cli {

namespace fs = std::filesystem;

inline std::string require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw InputError(what + " not found: '" + path + "'");
  return read_text_file(path);
}

inline std::string resolve(const fs::path& base, const std::string& p) {
  return fs::path(p).is_absolute() ? p : (base / p).string();
}

inline void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text_file(path.string(), text);
}

inline void configure_logging() {
  auto logger = spdlog::stderr_color_mt("coco");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("COCO_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else spdlog::warn("COCO_LOG='{}' not recognized; using info", level);
  }
}

struct Loaded {
  Manifest manifest;
  fs::path dir;  // manifest paths are relative to this
};

inline Loaded load_manifest(const ExperimentConfig& cfg) {
  const auto path = cfg.manifest_path();
  Loaded l{read_manifest(require_file(path, "manifest")), fs::path(path).parent_path()};
  return l;
}

// Labeled examples of one split; unlabeled entries are skipped with a warning.
inline std::vector<Example> load_split(const Loaded& l, Split split, double temperature) {
  std::vector<Example> out;
  for (const auto* e : l.manifest.split(split)) {
    if (e->pool_path.empty()) {
      spdlog::warn("'{}' has no solution pool; skipped", e->name);
      continue;
    }
    auto inst = read_instance(require_file(resolve(l.dir, e->instance_path), "instance"));
    const auto pool = read_pool(require_file(resolve(l.dir, e->pool_path), "pool"));
    out.push_back(make_example(std::move(inst), pool, temperature));
  }
  if (out.empty()) throw InputError(std::string("no labeled instances in the ") + to_string(split) + " split");
  return out;
}

inline GnnModel load_model(const ExperimentConfig& cfg) {
  return load_checkpoint(require_file(cfg.checkpoint_path(), "checkpoint"));
}

inline void check_search_fits(const ExperimentConfig& cfg, const std::vector<Example>& data) {
  for (const auto& ex : data) {
    try {
      cfg.search.validate(ex.instance.num_binary);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(e.what()) + " (instance '" + ex.name + "')");
    }
  }
}

// ---------------------------------------------------------------- subcommands

inline void cmd_generate(const ExperimentConfig& cfg) {
  const fs::path manifest_path = cfg.manifest_path();
  const auto dir = manifest_path.parent_path();
  Manifest m;
  for (auto& [split, inst] : generate_dataset(cfg.data, cfg.data_seed())) {
    const auto file = inst.name + ".milp.json";
    write_file(dir / file, write_instance(inst));
    m.entries.push_back({inst.name, split, file, "", std::nullopt});
  }
  write_file(manifest_path, write_manifest(m));
  spdlog::info("generated {} instances into {}", m.entries.size(), dir.string());
}

inline void cmd_label(const ExperimentConfig& cfg) {
  auto l = load_manifest(cfg);
  const auto bnb = cfg.resolved_label();
  std::vector<std::optional<SolutionPool>> pools(l.manifest.entries.size());
  std::vector<MilpInstance> insts;
  for (const auto& e : l.manifest.entries)
    insts.push_back(read_instance(require_file(resolve(l.dir, e.instance_path), "instance")));
  parallel_for(insts.size(), cfg.jobs, [&](std::size_t i) {
    try {
      pools[i] = collect_pool(insts[i], bnb);
    } catch (const LabelError& e) {
      spdlog::warn("{}; skipped", e.what());
    }
  });
  for (std::size_t i = 0; i < insts.size(); ++i) {
    auto& e = l.manifest.entries[i];
    if (!pools[i]) {
      e.pool_path.clear();
      e.bks.reset();
      continue;
    }
    e.pool_path = e.name + ".pool.json";
    e.bks = pools[i]->best().objective;
    write_file(l.dir / e.pool_path, write_pool(*pools[i]));
  }
  write_file(cfg.manifest_path(), write_manifest(l.manifest));
  spdlog::info("labeled {} instances", insts.size());
}

inline void cmd_train(const ExperimentConfig& cfg) {
  const auto l = load_manifest(cfg);
  const auto train = load_split(l, Split::train, cfg.train.weight_temperature);
  const auto valid = load_split(l, Split::valid, cfg.train.weight_temperature);
  const auto res = train_model(train, valid, cfg.resolved_gnn(), cfg.resolved_train(), cfg.resolved_loss());
  write_file(cfg.checkpoint_path(), save_checkpoint(res.model));
  write_file(fs::path(cfg.out) / "train_log.csv", training_log_csv(res.log));
  spdlog::info("trained {} epochs; best epoch {} (valid loss {:.6f})", res.log.size(), res.best_epoch,
               res.log[res.best_epoch - 1].valid_loss);
}

inline void cmd_search(const ExperimentConfig& cfg) {
  const auto l = load_manifest(cfg);
  const auto test = load_split(l, Split::test, cfg.train.weight_temperature);
  check_search_fits(cfg, test);
  const auto model = load_model(cfg);
  std::vector<std::string> docs(test.size());
  parallel_for(test.size(), cfg.jobs, [&](std::size_t i) {
    const auto& ex = test[i];
    const auto r = predict_and_search(ex.instance, model, cfg.search, cfg.bnb);
    nlohmann::json j{{"instance", ex.name},         {"status", to_string(r.status)}, {"bks", ex.bks},
                     {"nodes", r.nodes_explored}};
    if (std::isfinite(r.bound)) j["bound"] = r.bound;
    else j["bound"] = nullptr;
    if (r.incumbent) {
      j["objective"] = r.incumbent->objective;
      j["gap_abs"] = gap_abs(r.incumbent->objective, ex.bks);
      j["values"] = r.incumbent->values;
    } else {
      j["objective"] = nullptr;
    }
    docs[i] = j.dump(1) + "\n";
  });
  for (std::size_t i = 0; i < test.size(); ++i)
    write_file(fs::path(cfg.out) / "search" / (test[i].name + ".json"), docs[i]);
  spdlog::info("searched {} test instances", test.size());
}

inline void cmd_eval(const ExperimentConfig& cfg) {
  const auto l = load_manifest(cfg);
  const auto test = load_split(l, Split::test, cfg.train.weight_temperature);
  check_search_fits(cfg, test);
  const auto table = evaluate_suite(test, load_model(cfg), cfg.search, cfg.bnb, cfg.jobs);
  write_file(fs::path(cfg.out) / "eval.csv", result_table_csv(table));
  spdlog::info("mean gap: predict-and-search {} / plain {}; win/tie/loss {}/{}/{}", table.mean_ps_gap,
               table.mean_plain_gap, table.wins, table.ties, table.losses);
}

struct Diagnosis {
  std::vector<SeparabilityReport> separability;
  std::vector<VarianceReport> variance;
  std::vector<ActivationReport> activation;
};

inline Diagnosis diagnose(const GnnModel& model, const std::vector<Example>& data, std::size_t num_pairs,
                          std::uint64_t seed) {
  Diagnosis d;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ex = data[i];
    const auto pred = forward(model, ex.graph);
    const auto& truth = ex.labels.solutions.front();
    d.separability.push_back(
        pairwise_ranking_stats(pred.marginals, truth, num_pairs, derive_seed(seed, "pairs/" + ex.name)));
    d.variance.push_back(intra_constraint_variance(pred.logits, ex.instance));
    std::vector<double> best(ex.instance.num_vars, 0.0);
    for (std::size_t j = 0; j < truth.size(); ++j) best[j] = truth[j];
    d.activation.push_back(activation_ratios(ex.instance, best));
  }
  return d;
}

inline void cmd_analyze(const ExperimentConfig& cfg) {
  const auto l = load_manifest(cfg);
  const auto test = load_split(l, Split::test, cfg.train.weight_temperature);
  check_search_fits(cfg, test);
  const auto model = load_model(cfg);
  const auto d = diagnose(model, test, cfg.analyze_pairs, cfg.analyze_seed());
  const fs::path dir = fs::path(cfg.out) / "analyze";

  std::string summary = "instance,sampled_pairs,fraction_positive,mean_delta_marginal,intra_var_mean_logit,"
                        "inter_var_logit,variance_ratio\n";
  Histogram deltas(-1.0, 1.0, 50), activation(0.0, 1.0, 20);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto& s = d.separability[i];
    const auto& v = d.variance[i];
    summary += test[i].name + "," + std::to_string(s.sampled_pairs) + "," + format_double(s.fraction_positive) + "," +
               format_double(s.mean_delta) + "," + format_double(v.intra_var_mean) + "," +
               format_double(v.inter_var) + "," + format_double(v.ratio) + "\n";
    for (std::size_t k = 0; k < deltas.counts.size(); ++k) deltas.counts[k] += s.delta_histogram.counts[k];
    for (std::size_t k = 0; k < activation.counts.size(); ++k)
      activation.counts[k] += d.activation[i].histogram.counts[k];
  }
  write_file(dir / "summary.csv", summary);
  write_file(dir / "delta_histogram.csv", histogram_csv(deltas));
  write_file(dir / "activation_histogram.csv", histogram_csv(activation));

  BnbConfig traced = cfg.bnb;
  traced.record_trace = true;
  std::vector<std::string> curves(test.size());
  parallel_for(test.size(), cfg.jobs, [&](std::size_t i) {
    const auto r = predict_and_search(test[i].instance, model, cfg.search, traced);
    curves[i] = primal_curve_csv(primal_curve(r.trace, test[i].bks), true);
  });
  for (std::size_t i = 0; i < test.size(); ++i) write_file(dir / "curves" / (test[i].name + ".csv"), curves[i]);
  spdlog::info("wrote diagnostics for {} test instances", test.size());
}

struct AblationCell {
  std::string label;
  LossKind loss;
  bool icc;
};

inline const std::vector<AblationCell>& ablation_grid() {
  static const std::vector<AblationCell> grid{
      {"full", LossKind::vcl, true},
      {"no-ICC", LossKind::vcl, false},
      {"BCE", LossKind::bce, true},
      {"BCE no-ICC", LossKind::bce, false},
      {"no-rank", LossKind::vcl_no_rank, true},
      {"no-rank no-ICC", LossKind::vcl_no_rank, false},
      {"no-MSCL", LossKind::vcl_no_mscl, true},
      {"no-MSCL no-ICC", LossKind::vcl_no_mscl, false},
  };
  return grid;
}

inline void cmd_ablate(const ExperimentConfig& cfg) {
  const auto l = load_manifest(cfg);
  const double t = cfg.train.weight_temperature;
  const auto train = load_split(l, Split::train, t);
  const auto valid = load_split(l, Split::valid, t);
  const auto test = load_split(l, Split::test, t);
  check_search_fits(cfg, test);
  std::string csv =
      "variant,loss_kind,icc,best_epoch,best_valid_loss,mean_ps_obj,mean_ps_gap,mean_plain_gap,wins,ties,losses,"
      "fraction_positive,variance_ratio\n";
  for (const auto& cell : ablation_grid()) {
    ExperimentConfig c = cfg;
    c.train.loss_kind = cell.loss;
    c.train.icc_enabled = cell.icc;
    const auto res = train_model(train, valid, c.resolved_gnn(), c.resolved_train(), c.resolved_loss());
    const auto table = evaluate_suite(test, res.model, c.search, c.bnb, c.jobs);
    const auto d = diagnose(res.model, test, c.analyze_pairs, c.analyze_seed());
    double frac = 0.0, ratio = 0.0;
    for (const auto& s : d.separability) frac += s.fraction_positive;
    for (const auto& v : d.variance) ratio += v.ratio;
    frac /= static_cast<double>(test.size());
    ratio /= static_cast<double>(test.size());
    csv += cell.label + "," + to_string(cell.loss) + "," + (cell.icc ? "on" : "off") + "," +
           std::to_string(res.best_epoch) + "," + format_double(res.log[res.best_epoch - 1].valid_loss) + "," +
           format_double(table.mean_ps_obj) + "," + format_double(table.mean_ps_gap) + "," +
           format_double(table.mean_plain_gap) + "," + std::to_string(table.wins) + "," + std::to_string(table.ties) +
           "," + std::to_string(table.losses) + "," + format_double(frac) + "," + format_double(ratio) + "\n";
    spdlog::info("ablation cell '{}' done", cell.label);
  }
  write_file(fs::path(cfg.out) / "ablation.csv", csv);
}

}  // namespace cli

// Entry point shared by the tool and the tests.
inline int run_cli(int argc, const char* const* argv) {
  using namespace cli;
  if (!spdlog::get("coco")) configure_logging();

  CLI::App app{"coco: predict-and-search laboratory for binary MILPs"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> jobs;
  app.add_option("--config", config_path, "TOML-style experiment config")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--seed", seed, "top-level seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--out", out, "output directory")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--jobs", jobs, "worker threads for per-instance work")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::map<std::string, std::string> overrides;
  for (const auto& key : config_keys()) {
    if (key == "seed" || key == "out" || key == "jobs") continue;
    app.add_option_function<std::string>(
           "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; }, "override " + key)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)
        ->group("Config overrides");
  }

  const std::map<std::string, void (*)(const ExperimentConfig&)> commands{
      {"generate", cmd_generate}, {"label", cmd_label}, {"train", cmd_train},    {"search", cmd_search},
      {"eval", cmd_eval},         {"analyze", cmd_analyze}, {"ablate", cmd_ablate}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config(require_file(config_path, "config file"));
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (jobs) cfg.jobs = *jobs;
    for (const auto& [key, value] : overrides) apply_override(cfg, key, value);
    cfg.validate();
    write_file(fs::path(cfg.out) / (sub + ".config.toml"), to_toml(cfg));
    commands.at(sub)(cfg);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kExitConfig;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    spdlog::error("{} failed: {}", sub, e.what());
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace coco

#endif  // COCO_CLI_HPP
