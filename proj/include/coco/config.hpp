#ifndef COCO_CONFIG_HPP
#define COCO_CONFIG_HPP

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coco/bnb.hpp"
#include "coco/loss.hpp"
#include "coco/nn.hpp"
#include "coco/pipeline.hpp"
#include "coco/rng.hpp"
#include "coco/search.hpp"

namespace coco {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathsConfig {
  std::string manifest;    // empty: <out>/data/manifest.json
  std::string checkpoint;  // empty: <out>/model.ckpt
  bool operator==(const PathsConfig&) const = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::size_t jobs = 1;
  DataConfig data;
  GnnConfig gnn;
  TrainConfig train;
  LossConfig loss;
  BnbConfig label;  // exact solves for pools and BKS
  BnbConfig bnb;    // budget shared by predict-and-search and the plain baseline
  SearchConfig search;
  std::size_t analyze_pairs = 10000;
  PathsConfig paths;

  ExperimentConfig() {
    bnb.node_limit = 10;
    search = SearchConfig{30, 0, 3};
  }
  bool operator==(const ExperimentConfig&) const = default;

  std::size_t num_binary() const { return data.family == "sc" ? data.sc_cols : data.ca_bids; }
  std::string manifest_path() const { return paths.manifest.empty() ? out + "/data/manifest.json" : paths.manifest; }
  std::string checkpoint_path() const { return paths.checkpoint.empty() ? out + "/model.ckpt" : paths.checkpoint; }

  // Component configs with seeds fanned out from the top-level seed.
  GnnConfig resolved_gnn() const {
    GnnConfig g = gnn;
    g.icc_enabled = train.icc_enabled;
    g.seed = derive_seed(seed, "gnn");
    return g;
  }
  TrainConfig resolved_train() const {
    TrainConfig t = train;
    t.seed = derive_seed(seed, "train");
    return t;
  }
  LossConfig resolved_loss() const {
    LossConfig l = loss;
    l.seed = derive_seed(seed, "loss");
    return l;
  }
  BnbConfig resolved_label() const {
    BnbConfig b = label;
    b.pool_size = train.pool_size;
    return b;
  }
  std::uint64_t data_seed() const { return derive_seed(seed, "data"); }
  std::uint64_t analyze_seed() const { return derive_seed(seed, "analyze"); }

  // Component invariants; every failure names the owning config.
  void validate() const {
    auto wrap = [](auto&& fn) {
      try {
        fn();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    };
    if (jobs < 1) throw ConfigError("ExperimentConfig: jobs must be >= 1");
    if (out.empty()) throw ConfigError("ExperimentConfig: out must not be empty");
    if (analyze_pairs < 1) throw ConfigError("analyze.num_pairs must be >= 1");
    wrap([&] { data.validate(); });
    wrap([&] { gnn.validate(); });
    wrap([&] { train.validate(); });
    wrap([&] { loss.validate(); });
    wrap([&] { label.validate(); });
    wrap([&] { bnb.validate(); });
    wrap([&] { search.validate(num_binary()); });
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string toml_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s == "inf") return "inf";
  if (s == "-inf") return "-inf";
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

inline std::string toml_string(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// Accepts a quoted string or, when bare is allowed, the raw text.
inline std::string unquote(const std::string& key, const std::string& raw, bool bare) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
      if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
      out += raw[i];
    }
    return out;
  }
  if (bare) return raw;
  throw ConfigError(key + ": expected a quoted string, got '" + raw + "'");
}

template <class T>
T parse_integer(const std::string& key, const std::string& raw) {
  T v{};
  auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || end != raw.data() + raw.size())
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return v;
}

inline double parse_real(const std::string& key, const std::string& raw) {
  if (raw == "inf" || raw == "+inf") return kInf;
  if (raw == "-inf") return -kInf;
  double v = 0.0;
  auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || end != raw.data() + raw.size() || std::isnan(v))
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + raw + "'");
}

struct Field {
  std::string key;  // "section.name" or "name" at top level
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, bool bare)> set;
};

template <class M>
Field size_field(std::string key, M member) {
  return {key, [member](const ExperimentConfig& c) { return std::to_string(member(const_cast<ExperimentConfig&>(c))); },
          [key, member](ExperimentConfig& c, const std::string& raw, bool) {
            member(c) = parse_integer<std::size_t>(key, raw);
          }};
}

template <class M>
Field int_field(std::string key, M member) {
  return {key, [member](const ExperimentConfig& c) { return std::to_string(member(const_cast<ExperimentConfig&>(c))); },
          [key, member](ExperimentConfig& c, const std::string& raw, bool) {
            member(c) = parse_integer<std::int64_t>(key, raw);
          }};
}

template <class M>
Field real_field(std::string key, M member) {
  return {key, [member](const ExperimentConfig& c) { return toml_double(member(const_cast<ExperimentConfig&>(c))); },
          [key, member](ExperimentConfig& c, const std::string& raw, bool) { member(c) = parse_real(key, raw); }};
}

template <class M>
Field bool_field(std::string key, M member) {
  return {key,
          [member](const ExperimentConfig& c) {
            return std::string(member(const_cast<ExperimentConfig&>(c)) ? "true" : "false");
          },
          [key, member](ExperimentConfig& c, const std::string& raw, bool) { member(c) = parse_bool(key, raw); }};
}

template <class M>
Field string_field(std::string key, M member) {
  return {key, [member](const ExperimentConfig& c) { return toml_string(member(const_cast<ExperimentConfig&>(c))); },
          [key, member](ExperimentConfig& c, const std::string& raw, bool bare) {
            member(c) = unquote(key, raw, bare);
          }};
}

#define COCO_M(expr) [](ExperimentConfig & c) -> auto& { return c.expr; }

inline const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                 [](ExperimentConfig& c, const std::string& raw, bool) {
                   c.seed = parse_integer<std::uint64_t>("seed", raw);
                 }});
    f.push_back(string_field("out", COCO_M(out)));
    f.push_back(size_field("jobs", COCO_M(jobs)));

    f.push_back(string_field("data.family", COCO_M(data.family)));
    f.push_back(size_field("data.num_train", COCO_M(data.num_train)));
    f.push_back(size_field("data.num_valid", COCO_M(data.num_valid)));
    f.push_back(size_field("data.num_test", COCO_M(data.num_test)));
    f.push_back(size_field("data.sc_rows", COCO_M(data.sc_rows)));
    f.push_back(size_field("data.sc_cols", COCO_M(data.sc_cols)));
    f.push_back(real_field("data.sc_density", COCO_M(data.sc_density)));
    f.push_back(int_field("data.sc_cost_lo", COCO_M(data.sc_cost_lo)));
    f.push_back(int_field("data.sc_cost_hi", COCO_M(data.sc_cost_hi)));
    f.push_back(size_field("data.ca_items", COCO_M(data.ca_items)));
    f.push_back(size_field("data.ca_bids", COCO_M(data.ca_bids)));
    f.push_back(size_field("data.ca_max_bundle", COCO_M(data.ca_max_bundle)));

    f.push_back(size_field("gnn.embed_size", COCO_M(gnn.embed_size)));
    f.push_back(size_field("gnn.num_rounds", COCO_M(gnn.num_rounds)));
    f.push_back(size_field("gnn.mlp_hidden", COCO_M(gnn.mlp_hidden)));

    f.push_back(size_field("train.epochs", COCO_M(train.epochs)));
    f.push_back(real_field("train.lr", COCO_M(train.lr)));
    f.push_back({"train.loss_kind", [](const ExperimentConfig& c) { return toml_string(to_string(c.train.loss_kind)); },
                 [](ExperimentConfig& c, const std::string& raw, bool bare) {
                   const auto name = unquote("train.loss_kind", raw, bare);
                   const auto k = parse_loss_kind(name);
                   if (!k)
                     throw ConfigError("train.loss_kind: expected one of bce, vcl, vcl_no_rank, vcl_no_mscl, got '" +
                                       name + "'");
                   c.train.loss_kind = *k;
                 }});
    f.push_back(bool_field("train.icc_enabled", COCO_M(train.icc_enabled)));
    f.push_back(size_field("train.pool_size", COCO_M(train.pool_size)));
    f.push_back(real_field("train.weight_temperature", COCO_M(train.weight_temperature)));

    f.push_back(real_field("loss.tau", COCO_M(loss.tau)));
    f.push_back(real_field("loss.gamma", COCO_M(loss.gamma)));
    f.push_back(real_field("loss.lambda_rank", COCO_M(loss.lambda_rank)));
    f.push_back(size_field("loss.pair_cap", COCO_M(loss.pair_cap)));

    for (std::string s : {"label", "bnb"}) {
      const bool is_label = s == "label";
      auto pick = [is_label](ExperimentConfig& c) -> BnbConfig& { return is_label ? c.label : c.bnb; };
      f.push_back(size_field(s + ".node_limit", [pick](ExperimentConfig& c) -> auto& { return pick(c).node_limit; }));
      f.push_back(real_field(s + ".time_limit", [pick](ExperimentConfig& c) -> auto& { return pick(c).time_limit; }));
      f.push_back(real_field(s + ".abs_gap_tol", [pick](ExperimentConfig& c) -> auto& { return pick(c).abs_gap_tol; }));
      f.push_back(
          real_field(s + ".integrality_tol", [pick](ExperimentConfig& c) -> auto& { return pick(c).integrality_tol; }));
    }

    f.push_back(size_field("search.k0", COCO_M(search.k0)));
    f.push_back(size_field("search.k1", COCO_M(search.k1)));
    f.push_back(size_field("search.delta", COCO_M(search.delta)));

    f.push_back(size_field("analyze.num_pairs", COCO_M(analyze_pairs)));

    f.push_back(string_field("paths.manifest", COCO_M(paths.manifest)));
    f.push_back(string_field("paths.checkpoint", COCO_M(paths.checkpoint)));
    return f;
  }();
  return table;
}

#undef COCO_M

inline const Field* find_field(std::string_view key) {
  for (const auto& f : fields())
    if (f.key == key) return &f;
  return nullptr;
}

}  // namespace detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : detail::fields()) out.push_back(f.key);
  return out;
}

// Sets one key from command-line text; strings may be given bare.
inline void apply_override(ExperimentConfig& cfg, std::string_view key, const std::string& value) {
  const auto* f = detail::find_field(key);
  if (!f) throw ConfigError("unknown config key '" + std::string(key) + "'");
  f->set(cfg, detail::trim(value), true);
}

// Strips a '#' comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && quoted) {
      ++i;
      continue;
    }
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

// TOML subset: [section] headers, key = value, '#' comments. Values are
// integers, reals, true/false and double-quoted strings.
inline ExperimentConfig parse_config(const std::string& text, ExperimentConfig cfg = {}) {
  std::istringstream in(text);
  std::string line, section;
  std::set<std::string> seen;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto body = detail::trim(strip_comment(line));
    const auto where = " (line " + std::to_string(lineno) + ")";
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("malformed section header '" + body + "'" + where);
      section = detail::trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + body + "'" + where);
    const auto name = detail::trim(std::string_view(body).substr(0, eq));
    const auto value = detail::trim(std::string_view(body).substr(eq + 1));
    const auto key = section.empty() ? name : section + "." + name;
    const auto* f = detail::find_field(key);
    if (!f) throw ConfigError("unknown config key '" + key + "'" + where);
    if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'" + where);
    if (value.empty()) throw ConfigError(key + ": missing value" + where);
    try {
      f->set(cfg, value, false);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what() + where);
    }
  }
  return cfg;
}

inline std::string to_toml(const ExperimentConfig& cfg) {
  std::string out, section;
  for (const auto& f : detail::fields()) {
    const auto dot = f.key.find('.');
    const auto sec = dot == std::string::npos ? std::string{} : f.key.substr(0, dot);
    const auto name = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (sec != section) {
      out += "\n[" + sec + "]\n";
      section = sec;
    }
    out += name + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace coco

#endif  // COCO_CONFIG_HPP
