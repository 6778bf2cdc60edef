#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "coco/cli.hpp"

namespace coco {
namespace {

namespace fs = std::filesystem;

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "coco");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("coco_test_" + name);
  fs::remove_all(p);
  return p;
}

// Small enough that the whole pipeline runs in a few seconds.
std::vector<std::string> tiny(const fs::path& out) {
  return {"--out",           out.string(), "--seed",         "11",  "--data.sc_rows",   "8",
          "--data.sc_cols",  "16",         "--data.sc_density", "0.25", "--data.num_train", "3",
          "--data.num_valid", "2",         "--data.num_test",  "2",   "--gnn.embed_size", "6",
          "--gnn.mlp_hidden", "6",         "--train.epochs",   "2",   "--train.lr",       "0.01",
          "--search.k0",     "4",          "--search.k1",      "1",   "--search.delta",   "2",
          "--bnb.node_limit", "5",         "--analyze.num_pairs", "50"};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST(Config, DefaultsMatchTheDeskTable) {
  const ExperimentConfig cfg;
  EXPECT_EQ(cfg.gnn.embed_size, 64u);
  EXPECT_EQ(cfg.train.lr, 1e-4);
  EXPECT_EQ(cfg.loss.tau, 0.1);
  EXPECT_EQ(cfg.loss.lambda_rank, 0.01);
  EXPECT_EQ(cfg.loss.gamma, 0.9);
  EXPECT_EQ(parse_config(to_toml(cfg)), cfg);
  EXPECT_EQ(to_toml(parse_config(to_toml(cfg))), to_toml(cfg));
}

TEST(Config, ExplicitFileLoadsExactly) {
  const auto cfg = parse_config(
      "# desk table\n"
      "[gnn]\nembed_size = 64\n"
      "[train]\nlr = 1e-4  # adam\n"
      "[loss]\ntau = 0.1\nlambda_rank = 0.01\ngamma = 0.9\n");
  EXPECT_EQ(cfg, ExperimentConfig{});
}

TEST(Config, EveryKeyRoundTrips) {
  ExperimentConfig cfg;
  cfg.seed = 77;
  cfg.out = "some dir/\"q\"";
  cfg.jobs = 3;
  cfg.data.family = "ca";
  cfg.data.sc_density = 0.123456789012345;
  cfg.gnn.embed_size = 17;
  cfg.train.loss_kind = LossKind::vcl_no_mscl;
  cfg.train.icc_enabled = false;
  cfg.train.weight_temperature = 2.5e-7;
  cfg.loss.tau = 1.0 / 3.0;
  cfg.label.time_limit = 12.0;
  cfg.bnb.abs_gap_tol = 1e-9;
  cfg.search = SearchConfig{7, 2, 1};
  cfg.analyze_pairs = 5;
  cfg.paths.checkpoint = "m.ckpt";
  const auto back = parse_config(to_toml(cfg));
  EXPECT_EQ(back, cfg);
  for (const auto& key : config_keys()) EXPECT_NE(to_toml(cfg).find(key.substr(key.find('.') + 1)), std::string::npos);
}

TEST(Config, ErrorsNameTheField) {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error("[gnn]\nembed_sise = 3\n", "gnn.embed_sise");
  expect_error("[gnn]\nembed_size = -3\n", "gnn.embed_size");
  expect_error("[train]\nlr = fast\n", "train.lr");
  expect_error("[train]\nloss_kind = \"mse\"\n", "train.loss_kind");
  expect_error("[loss]\ntau = 0.1\ntau = 0.2\n", "loss.tau");
  expect_error("[nope]\nx = 1\n", "nope");
  expect_error("seed = 1\njunk\n", "line 2");
  EXPECT_THROW(apply_override(*std::make_unique<ExperimentConfig>(), "train.epochs", "1.5"), ConfigError);
  ExperimentConfig bad;
  bad.search = SearchConfig{70, 20, 1};
  try {
    bad.validate();
    ADD_FAILURE();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("SearchConfig"), std::string::npos);
  }
}

TEST(Cli, ExitCodes) {
  const auto out = scratch("exit");
  EXPECT_EQ(run({"generate", "--out", out.string(), "--gnn.embed_sise", "3"}), kExitConfig);
  EXPECT_EQ(run({"generate", "--out", out.string(), "--train.lr", "fast"}), kExitConfig);
  EXPECT_EQ(run({"generate", "--config", (out / "missing.toml").string()}), kExitConfig);
  EXPECT_EQ(run({"train", "--out", out.string()}), kExitConfig);  // no manifest yet
  EXPECT_EQ(run({"frobnicate"}), kExitConfig);

  ASSERT_EQ(run(with({"generate"}, tiny(out))), kExitOk);
  ASSERT_EQ(run(with({"label"}, tiny(out))), kExitOk);
  ASSERT_EQ(run(with({"train"}, tiny(out))), kExitOk);
  EXPECT_EQ(run(with(with({"search"}, tiny(out)), {"--search.k0", "14", "--search.k1", "3"})), kExitConfig);
  {
    std::ofstream(out / "model.ckpt") << "not a checkpoint";
  }
  EXPECT_EQ(run(with({"search"}, tiny(out))), kExitRuntime);
  fs::remove_all(out);
}

TEST(Cli, EverySubcommandIsReproducible) {
  const auto out = scratch("repro");
  std::map<std::string, std::string> first;
  for (const std::string sub : {"generate", "label", "train", "search", "eval", "analyze"}) {
    ASSERT_EQ(run(with({sub}, tiny(out))), kExitOk) << sub;
    const auto before = snapshot(out);
    ASSERT_EQ(run(with({sub}, tiny(out))), kExitOk) << sub;
    EXPECT_EQ(snapshot(out), before) << sub;
  }
  const auto files = snapshot(out);
  EXPECT_TRUE(files.count("eval.csv"));
  EXPECT_TRUE(files.count("train_log.csv"));
  EXPECT_TRUE(files.count("analyze/summary.csv"));
  EXPECT_TRUE(files.count("generate.config.toml"));
  EXPECT_EQ(parse_config(files.at("train.config.toml")).train.epochs, 2u);
  fs::remove_all(out);
}

TEST(Cli, AblationGridHasEightCells) {
  const auto out = scratch("ablate");
  ASSERT_EQ(run(with({"generate"}, tiny(out))), kExitOk);
  ASSERT_EQ(run(with({"label"}, tiny(out))), kExitOk);
  ASSERT_EQ(run(with({"ablate"}, tiny(out))), kExitOk);
  const auto a = snapshot(out).at("ablation.csv");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 9);
  ASSERT_EQ(run(with({"ablate"}, tiny(out))), kExitOk);
  EXPECT_EQ(snapshot(out).at("ablation.csv"), a);
  fs::remove_all(out);
}

}  // namespace
}  // namespace coco
