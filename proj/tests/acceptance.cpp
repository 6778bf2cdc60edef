// Prints one PASS/FAIL line per acceptance criterion.
// Exit status is 0 once every check has run; the lines carry the verdicts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "coco/coco.hpp"
#include "nn_fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace coco;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// tolerances
constexpr double kSolverTol = 1e-6;
constexpr double kSolverSeconds = 60.0;
constexpr double kModelGradTol = 1e-4;
constexpr double kLossGradTol = 1e-6;
constexpr double kClosedFormTol = 1e-12;
constexpr double kCancelTol = 1e-12;
constexpr double kDeskMinutes = 30.0;
constexpr double kIccShare = 0.70;
constexpr double kWinTieShare = 0.60;
constexpr std::uint64_t kDeskSeed = 12345;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("AC%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------- AC1

void solver_vs_enumeration() {
  const auto t0 = Clock::now();
  std::size_t bad = 0;
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    MilpInstance inst;
    if (k % 2 == 0) {
      const std::size_t n = 6 + k % 10;
      inst = generate_set_cover(3 + k % 8, n, 0.35 + 0.05 * static_cast<double>(k % 5), 1, 100, 1000 + k);
    } else {
      inst = generate_comb_auction(4 + k % 6, 6 + k % 10, 2 + k % 3, 2000 + k);
    }
    const auto en = testing::enumerate_binary(inst);
    BnbConfig cfg;
    const auto res = branch_and_bound(inst, cfg);
    if (!en.any_feasible) {
      bad += res.status != BnbStatus::infeasible;
      continue;
    }
    if (res.status != BnbStatus::optimal || !res.has_solution()) {
      ++bad;
      continue;
    }
    const double err = std::abs(res.incumbent->objective - en.best);
    worst = std::max(worst, err);
    bad += err > kSolverTol;
  }
  const double secs = seconds_since(t0);
  report(1, bad == 0 && secs < kSolverSeconds,
         "200 instances vs enumeration: mismatches " + std::to_string(bad) + ", max |diff| " + fmt(worst) + ", " +
             fmt(secs, 3) + " s");
}

// ---------------------------------------------------------------- AC2

template <class F>
double loss_gradient_error(F&& f, std::vector<double> z, const std::vector<double>& grad) {
  double worst = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double keep = z[j];
    const double fd = testing::central_difference(
        [&](double t) {
          z[j] = keep + t;
          const double v = f(z);
          z[j] = keep;
          return v;
        },
        1e-6);
    worst = std::max(worst, std::abs(fd - grad[j]) / std::max({std::abs(fd), std::abs(grad[j]), 1e-3}));
  }
  return worst;
}

// logits with every hinge at least `margin` away from its kink
std::vector<double> kink_free_logits(std::uint64_t seed, std::size_t p, const std::vector<std::uint8_t>& x,
                                     double gamma, double margin) {
  for (std::uint64_t s = seed;; s += 1000) {
    SplitMix64 rng(s);
    std::vector<double> z(p);
    for (auto& v : z) v = 4.0 * rng.uniform01() - 2.0;
    bool ok = true;
    for (std::size_t i = 0; i < p && ok; ++i)
      for (std::size_t j = 0; j < p && ok; ++j)
        if (x[i] && !x[j]) ok = std::abs(gamma - (z[i] - z[j])) > margin;
    if (ok) return z;
  }
}

void gradient_fidelity() {
  double model_worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t n = 4 + k % 4, m = 2 + k % 4;
    const auto g = encode(testing::random_graph_instance(500 + k, n, m));
    GnnConfig cfg;
    cfg.embed_size = 4;
    cfg.mlp_hidden = 5;
    cfg.seed = 900 + k;
    GnnModel model(cfg);
    model.set_beta(0, 0.3 - 0.02 * static_cast<double>(k));
    model.set_beta(1, 0.1 + 0.01 * static_cast<double>(k));
    const auto r = testing::random_upstream(700 + k, n);
    ForwardTape tape;
    forward(model, g, &tape);
    const auto grads = backward(model, g, tape, r);
    for (std::size_t i = 0; i < model.num_parameters(); ++i) {
      const double fd = testing::central_difference(
          [&](double t) {
            GnnModel probe = model;
            probe.mutable_parameters()[i] += t;
            return testing::linear_readout(probe, g, r);
          },
          1e-6);
      model_worst = std::max(model_worst, std::abs(grads[i] - fd) / std::max({std::abs(grads[i]), std::abs(fd), 1e-5}));
    }
  }

  double loss_worst = 0.0;
  LossConfig lc;
  lc.tau = 0.5;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const std::size_t p = 6 + k % 5;
    SplitMix64 rng(40 + k);
    LabeledSolutionSet labels;
    for (int s = 0; s < 3; ++s) {
      std::vector<std::uint8_t> x(p);
      for (auto& b : x) b = rng.uniform01() < 0.4;
      x[0] = 1;
      x[1] = 0;
      labels.solutions.push_back(x);
      labels.objectives.push_back(static_cast<double>(s));
    }
    labels.weights = compute_weights(labels.objectives, Sense::minimize, 1.0);
    // a logit vector must be kink-free for every solution at once
    std::vector<double> z;
    for (std::uint64_t s = 60 + k;; s += 7) {
      z = kink_free_logits(s, p, labels.solutions[0], lc.gamma, 1e-3);
      bool ok = true;
      for (const auto& x : labels.solutions)
        for (std::size_t i = 0; i < p && ok; ++i)
          for (std::size_t j = 0; j < p && ok; ++j)
            if (x[i] && !x[j]) ok = std::abs(lc.gamma - (z[i] - z[j])) > 1e-3;
      if (ok) break;
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t j = 0; j < p; ++j) (labels.solutions[0][j] ? pos : neg).push_back(j);

    const auto b = bce_weighted(z, labels);
    loss_worst = std::max(loss_worst, loss_gradient_error([&](const auto& zz) { return bce_weighted(zz, labels).loss; }, z, b.grad));
    const auto ms = mscl(z, pos, lc.tau);
    loss_worst = std::max(loss_worst, loss_gradient_error([&](const auto& zz) { return mscl(zz, pos, lc.tau).loss; }, z, ms.grad));
    const auto rk = rank_loss(z, pos, neg, lc.gamma, lc.pair_cap, 0);
    loss_worst = std::max(loss_worst, loss_gradient_error(
                                          [&](const auto& zz) { return rank_loss(zz, pos, neg, lc.gamma, lc.pair_cap, 0).loss; },
                                          z, rk.grad));
    const auto v = vcl(z, labels, lc);
    loss_worst = std::max(loss_worst, loss_gradient_error([&](const auto& zz) { return vcl(zz, labels, lc).loss; }, z, v.grad));
  }
  report(2, model_worst < kModelGradTol && loss_worst < kLossGradTol,
         "model grad max rel err " + fmt(model_worst) + " (20 graphs, beta != 0); loss grad max rel err " +
             fmt(loss_worst));
}

// ---------------------------------------------------------------- AC3

void loss_closed_forms() {
  const std::vector<double> z6{0.3, -1.0, 2.0, 0.0, 5.0, -0.5};
  const std::vector<std::size_t> all{0, 1, 2, 3, 4, 5};
  const double zero = mscl(z6, all, 0.1).loss;
  const std::vector<double> z2{2.0, 0.0};
  const std::vector<std::size_t> first{0}, second{1};
  const double m2 = mscl(z2, first, 1.0).loss;
  const double want = std::log1p(std::exp(-2.0));
  const double r04 = rank_loss(std::vector<double>{0.5, 0.0}, first, second, 0.9, 50000, 0).loss;
  const double r09 = rank_loss(std::vector<double>{0.0, 0.0}, first, second, 0.9, 50000, 0).loss;
  const bool ok = zero == 0.0 && std::abs(m2 - want) <= kClosedFormTol && r04 == 0.4 && r09 == 0.9;
  report(3, ok,
         "MSCL(V+=V0) " + fmt(zero) + ", MSCL([2,0]) - log(1+e^-2) = " + fmt(m2 - want) + ", rank " + fmt(r04, 17) +
             " / " + fmt(r09, 17));
}

// ---------------------------------------------------------------- AC4

void icc_algebra() {
  const auto g = encode(testing::random_graph_instance(3, 7, 4));
  RowMatrix h = RowMatrix::Random(7, 4);
  const auto same = icc_apply(h, g.incidence, 0.0);
  bool bitwise = true;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    bitwise &= std::bit_cast<std::uint64_t>(same.data()[i]) == std::bit_cast<std::uint64_t>(h.data()[i]);

  std::vector<Edge> edges{{0, 0}, {0, 1}};
  const auto one_row = Incidence::from_edges(2, 1, edges);
  RowMatrix sym(2, 3);
  sym << 0.3, -1.2, 4.0, 0.3, -1.2, 4.0;
  const double cancel = icc_apply(sym, one_row, 1.0).cwiseAbs().maxCoeff();

  RowMatrix eye(2, 2);
  eye << 1.0, 0.0, 0.0, 1.0;
  const auto hand = icc_apply(eye, one_row, 1.0);
  const bool exact = hand(0, 0) == 0.5 && hand(0, 1) == -0.5 && hand(1, 0) == -0.5 && hand(1, 1) == 0.5;
  report(4, bitwise && cancel <= kCancelTol && exact,
         std::string("beta=0 bitwise ") + (bitwise ? "yes" : "no") + ", symmetric max |h| " + fmt(cancel) +
             ", two-variable case " + (exact ? "exact" : "differs"));
}

// ---------------------------------------------------------------- AC5

void trust_region_semantics() {
  std::size_t cases = 0, mismatches = 0, plain_diff = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    SplitMix64 rng(seed + 4242);
    const std::size_t p = 1 + seed % 12;
    const auto inst = testing::random_binary_instance(seed + 77, p, 1 + seed % 4);
    std::vector<double> m(p);
    for (auto& v : m) v = std::round(rng.uniform01() * 8.0) / 8.0;  // ties on purpose
    const std::size_t k0 = rng.below(p + 1);
    const std::size_t k1 = rng.below(p - k0 + 1);
    const std::size_t delta = rng.below(k0 + k1 + 2);
    const SearchConfig sc{k0, k1, delta};
    const auto tr = build_trust_region(inst, m, sc);

    // independent selection: stable order by (marginal, index)
    std::vector<std::size_t> idx(p);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<std::size_t> asc = idx;
    std::sort(asc.begin(), asc.end(), [&](auto a, auto b) { return m[a] != m[b] ? m[a] < m[b] : a < b; });
    std::vector<bool> in_low(p, false), in_high(p, false);
    for (std::size_t i = 0; i < k0; ++i) in_low[asc[i]] = true;
    std::vector<std::size_t> rest;
    for (auto j : idx)
      if (!in_low[j]) rest.push_back(j);
    std::sort(rest.begin(), rest.end(), [&](auto a, auto b) { return m[a] != m[b] ? m[a] > m[b] : a < b; });
    for (std::size_t i = 0; i < k1; ++i) in_high[rest[i]] = true;

    const testing::DenseRows base(inst), aug(tr);
    std::vector<double> x(p);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
      std::size_t dist = 0;
      for (std::size_t j = 0; j < p; ++j) {
        x[j] = (mask >> j) & 1;
        dist += (in_low[j] && x[j] == 1.0) || (in_high[j] && x[j] == 0.0);
      }
      mismatches += aug.satisfied(x) != (base.satisfied(x) && dist <= delta);
    }
    ++cases;

    BnbConfig cfg;
    const auto a = search_around(inst, m, SearchConfig{0, 0, delta}, cfg);
    const auto b = branch_and_bound(inst, cfg);
    const bool same = a.status == b.status && a.nodes_explored == b.nodes_explored &&
                      a.has_solution() == b.has_solution() &&
                      (!a.has_solution() || (a.incumbent->values == b.incumbent->values &&
                                             a.incumbent->objective == b.incumbent->objective));
    plain_diff += !same;
  }
  report(5, mismatches == 0 && plain_diff == 0,
         std::to_string(cases) + " instances (p <= 12): feasible-set mismatches " + std::to_string(mismatches) +
             ", k0=k1=0 runs differing from plain " + std::to_string(plain_diff));
}

// ---------------------------------------------------------------- AC6-8

struct DeskModel {
  TrainResult train;
  cli::Diagnosis diag;
  double frac = 0.0;
};

void desk_experiments() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.seed = kDeskSeed;
  cfg.validate();
  std::vector<MilpInstance> all;
  std::vector<Split> splits;
  for (auto& [split, inst] : generate_dataset(cfg.data, cfg.data_seed())) {
    splits.push_back(split);
    all.push_back(std::move(inst));
  }
  std::vector<Example> train, valid, test;
  {
    auto labeled = label_instances(all, cfg.resolved_label(), cfg.train.weight_temperature, cfg.jobs);
    // label_instances keeps order and drops nothing on this set
    if (labeled.size() != all.size()) throw std::runtime_error("desk instance without a feasible solution");
    for (std::size_t i = 0; i < labeled.size(); ++i)
      (splits[i] == Split::train ? train : splits[i] == Split::valid ? valid : test).push_back(std::move(labeled[i]));
  }
  std::printf("     desk set: %zu train / %zu valid / %zu test SC %zux%zu, labeled in %.1f s\n", train.size(),
              valid.size(), test.size(), cfg.data.sc_rows, cfg.data.sc_cols, seconds_since(t0));

  auto fit = [&](LossKind kind, bool icc) {
    const auto t1 = Clock::now();
    ExperimentConfig c = cfg;
    c.train.loss_kind = kind;
    c.train.icc_enabled = icc;
    DeskModel dm{train_model(train, valid, c.resolved_gnn(), c.resolved_train(), c.resolved_loss()), {}, 0.0};
    dm.diag = cli::diagnose(dm.train.model, test, c.analyze_pairs, c.analyze_seed());
    for (const auto& s : dm.diag.separability) dm.frac += s.fraction_positive;
    dm.frac /= static_cast<double>(test.size());
    std::printf("     %-4s icc=%-3s best epoch %zu, mean fraction_positive %.4f, %.0f s\n", to_string(kind),
                icc ? "on" : "off", dm.train.best_epoch, dm.frac, seconds_since(t1));
    std::fflush(stdout);
    return dm;
  };

  const auto vcl_on = fit(LossKind::vcl, true);
  const auto bce_on = fit(LossKind::bce, true);
  const double minutes = seconds_since(t0) / 60.0;
  report(6, vcl_on.frac > bce_on.frac && minutes < kDeskMinutes,
         "mean fraction_positive VCL " + fmt(vcl_on.frac) + " vs BCE " + fmt(bce_on.frac) + " (" + fmt(minutes, 3) +
             " min)");

  const auto vcl_off = fit(LossKind::vcl, false);
  std::size_t higher = 0;
  for (std::size_t i = 0; i < test.size(); ++i) higher += vcl_on.diag.variance[i].ratio > vcl_off.diag.variance[i].ratio;
  const double share = static_cast<double>(higher) / static_cast<double>(test.size());
  report(7, share >= kIccShare,
         "ICC ratio higher on " + std::to_string(higher) + "/" + std::to_string(test.size()) + " test instances");

  const auto table = evaluate_suite(test, vcl_on.train.model, cfg.search, cfg.bnb, cfg.jobs);
  std::size_t ps_missing = 0, plain_missing = 0;
  for (const auto& r : table.rows) {
    ps_missing += !r.ps_obj;
    plain_missing += !r.plain_obj;
  }
  const double wt = static_cast<double>(table.wins + table.ties) / static_cast<double>(table.rows.size());
  // inf <= inf does not count
  report(8, std::isfinite(table.mean_ps_gap) && table.mean_ps_gap <= table.mean_plain_gap && wt >= kWinTieShare,
         "node budget " + std::to_string(cfg.bnb.node_limit) + ", region " + std::to_string(cfg.search.k0) + "/" +
             std::to_string(cfg.search.k1) + "/" + std::to_string(cfg.search.delta) + ": mean gap PS " +
             fmt(table.mean_ps_gap) + " vs plain " + fmt(table.mean_plain_gap) + " (no solution " +
             std::to_string(ps_missing) + " / " + std::to_string(plain_missing) + "), w/t/l " +
             std::to_string(table.wins) + "/" + std::to_string(table.ties) + "/" + std::to_string(table.losses));
}

// ---------------------------------------------------------------- AC9

void gap_spot_values() {
  auto two_dp = [](double v) { return std::round(v * 100.0) / 100.0; };
  const double a = gap_abs(11.43, 11.16);
  const double b = gap_abs(97228.93, 97524.37);
  report(9, two_dp(a) == 0.27 && two_dp(b) == 295.44,
         "gap_abs(11.43, 11.16) = " + fmt(a, 17) + ", gap_abs(97228.93, 97524.37) = " + fmt(b, 17) +
             " (compared at 2 decimals)");
}

// ---------------------------------------------------------------- AC10

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

int cli(const std::string& sub, const fs::path& out) {
  std::vector<std::string> args{"coco",         sub,         "--out",           out.string(), "--seed",
                                "5",            "--jobs",    "2",               "--data.sc_rows", "10",
                                "--data.sc_cols", "20",      "--data.num_train", "4",           "--data.num_valid",
                                "2",            "--data.num_test", "3",         "--gnn.embed_size", "8",
                                "--gnn.mlp_hidden", "8",     "--train.epochs",  "3",           "--train.lr",
                                "0.01",         "--search.k0", "6",             "--search.k1", "2",
                                "--search.delta", "3",       "--bnb.node_limit", "6",          "--analyze.num_pairs",
                                "40"};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

void cli_determinism() {
  const auto out = fs::temp_directory_path() / "coco_acceptance_cli";
  fs::remove_all(out);
  std::size_t identical = 0;
  std::string bad;
  const std::vector<std::string> subs{"generate", "label", "train", "search", "eval", "analyze", "ablate"};
  for (const auto& sub : subs) {
    const int a = cli(sub, out);
    const auto before = snapshot(out);
    const int b = cli(sub, out);
    if (a == 0 && b == 0 && snapshot(out) == before)
      ++identical;
    else
      bad += " " + sub;
  }
  const std::size_t files = snapshot(out).size();
  fs::remove_all(out);
  report(10, identical == subs.size(),
         std::to_string(identical) + "/" + std::to_string(subs.size()) + " subcommands byte-identical on re-run (" +
             std::to_string(files) + " artifacts)" + (bad.empty() ? "" : "; differing:" + bad));
}

// ---------------------------------------------------------------- AC11

void config_fidelity() {
  const ExperimentConfig d;
  const bool defaults = d.gnn.embed_size == 64 && d.train.lr == 1e-4 && d.loss.tau == 0.1 &&
                        d.loss.lambda_rank == 0.01 && d.loss.gamma == 0.9;
  const auto text = to_toml(d);
  const auto back = parse_config(text);
  const auto file = parse_config("[gnn]\nembed_size = 64\n[train]\nlr = 1e-4\n[loss]\ntau = 0.1\nlambda_rank = 0.01\n"
                                 "gamma = 0.9\n");
  report(11, defaults && back == d && to_toml(back) == text && file == d,
         std::string("defaults ") + (defaults ? "match" : "differ") + ", round trip " + (back == d ? "exact" : "lossy") +
             ", explicit file " + (file == d ? "exact" : "differs"));
}

}  // namespace

int main() {
  if (!spdlog::get("coco")) cli::configure_logging();
  spdlog::get("coco")->set_level(spdlog::level::err);
  try {
    solver_vs_enumeration();
    gradient_fidelity();
    loss_closed_forms();
    icc_algebra();
    trust_region_semantics();
    desk_experiments();
    gap_spot_values();
    cli_determinism();
    config_fidelity();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 11 criteria failed\n", failures);
  return 0;
}
