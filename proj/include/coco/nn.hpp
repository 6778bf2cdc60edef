#ifndef COCO_NN_HPP
#define COCO_NN_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "coco/graph.hpp"
#include "coco/rng.hpp"

namespace coco {

struct GnnConfig {
  std::size_t embed_size = 64;
  std::size_t num_rounds = 2;
  std::size_t mlp_hidden = 64;
  bool icc_enabled = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (embed_size < 1) throw std::invalid_argument("GnnConfig: embed_size must be >= 1");
    if (num_rounds < 1) throw std::invalid_argument("GnnConfig: num_rounds must be >= 1");
    if (mlp_hidden < 1) throw std::invalid_argument("GnnConfig: mlp_hidden must be >= 1");
  }
  bool operator==(const GnnConfig&) const = default;
};

// Location of one affine map  y = x W + b  inside the flat parameter buffer.
// W is stored row-major as in x out, followed by b.
struct DenseSlot {
  std::size_t offset = 0;
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t size() const { return in * out + out; }
};

// Two affine maps with a ReLU in between.
struct MlpSlot {
  DenseSlot first;
  DenseSlot second;
};

struct RoundSlots {
  MlpSlot con_message;
  MlpSlot con_update;
  MlpSlot var_message;
  MlpSlot var_update;
  std::size_t beta = 0;
};

// Eigen-aligned parameter storage
using ParamBuffer = std::vector<double, Eigen::aligned_allocator<double>>;

class GnnModel {
 public:
  explicit GnnModel(const GnnConfig& cfg) : config_(cfg) {
    cfg.validate();
    const std::size_t d = cfg.embed_size;
    const std::size_t h = cfg.mlp_hidden;
    var_input_ = add_mlp(kVarFeatures, h, d);
    con_input_ = add_mlp(kConFeatures, h, d);
    edge_input_ = add_mlp(kEdgeFeatures, h, d);
    for (std::size_t r = 0; r < cfg.num_rounds; ++r) {
      RoundSlots s;
      s.con_message = add_mlp(3 * d, h, d);
      s.con_update = add_mlp(2 * d, h, d);
      s.var_message = add_mlp(3 * d, h, d);
      s.var_update = add_mlp(2 * d, h, d);
      s.beta = size_++;
      rounds_.push_back(s);
    }
    jk_ = add_mlp((cfg.num_rounds + 1) * d, h, d);
    head_ = add_mlp(d, h, 1);

    params_.assign(size_, 0.0);
    SplitMix64 rng(cfg.seed);
    for (const auto& slot : dense_slots_) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(slot.in));
      for (std::size_t k = 0; k < slot.size(); ++k)
        params_[slot.offset + k] = (2.0 * rng.uniform01() - 1.0) * bound;
    }
    // betas stay at zero
  }

  GnnModel(const GnnModel& other)
      : config_(other.config_), var_input_(other.var_input_), con_input_(other.con_input_),
        edge_input_(other.edge_input_), rounds_(other.rounds_), jk_(other.jk_), head_(other.head_),
        dense_slots_(other.dense_slots_), size_(other.size_), params_(other.params_) {}
  GnnModel& operator=(const GnnModel& other) {
    if (this != &other) {
      config_ = other.config_;
      var_input_ = other.var_input_;
      con_input_ = other.con_input_;
      edge_input_ = other.edge_input_;
      rounds_ = other.rounds_;
      jk_ = other.jk_;
      head_ = other.head_;
      dense_slots_ = other.dense_slots_;
      size_ = other.size_;
      params_ = other.params_;
      ++version_;
    }
    return *this;
  }

  const GnnConfig& config() const { return config_; }
  std::size_t num_parameters() const { return size_; }
  std::span<const double> parameters() const { return params_; }
  // Any write access invalidates recorded forward tapes.
  std::span<double> mutable_parameters() {
    ++version_;
    return params_;
  }
  std::uint64_t version() const { return version_; }

  double beta(std::size_t round) const { return params_.at(rounds_.at(round).beta); }
  void set_beta(std::size_t round, double value) {
    ++version_;
    params_.at(rounds_.at(round).beta) = value;
  }
  std::size_t beta_index(std::size_t round) const { return rounds_.at(round).beta; }

  const MlpSlot& var_input() const { return var_input_; }
  const MlpSlot& con_input() const { return con_input_; }
  const MlpSlot& edge_input() const { return edge_input_; }
  const RoundSlots& round(std::size_t r) const { return rounds_.at(r); }
  const MlpSlot& jk() const { return jk_; }
  const MlpSlot& head() const { return head_; }

 private:
  DenseSlot add_dense(std::size_t in, std::size_t out) {
    DenseSlot s{size_, in, out};
    size_ += s.size();
    dense_slots_.push_back(s);
    return s;
  }
  MlpSlot add_mlp(std::size_t in, std::size_t hidden, std::size_t out) {
    MlpSlot s;
    s.first = add_dense(in, hidden);
    s.second = add_dense(hidden, out);
    return s;
  }

  GnnConfig config_;
  MlpSlot var_input_, con_input_, edge_input_;
  std::vector<RoundSlots> rounds_;
  MlpSlot jk_, head_;
  std::vector<DenseSlot> dense_slots_;
  std::size_t size_ = 0;
  ParamBuffer params_;
  std::uint64_t version_ = 0;
};

// Logits and marginals for the binaries (indices 0..p-1) plus the variable
// embeddings after each round (index 0 is the input embedding).
struct Prediction {
  std::vector<double> logits;
  std::vector<double> marginals;
  std::vector<RowMatrix> layer_var_embeddings;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace detail {

using ConstMap = Eigen::Map<const RowMatrix>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;
using GradMap = Eigen::Map<RowMatrix>;
using GradRowMap = Eigen::Map<Eigen::RowVectorXd>;

inline ConstMap weight(const double* p, const DenseSlot& s) {
  return ConstMap(p + s.offset, static_cast<Eigen::Index>(s.in), static_cast<Eigen::Index>(s.out));
}
inline ConstRowMap bias(const double* p, const DenseSlot& s) {
  return ConstRowMap(p + s.offset + s.in * s.out, static_cast<Eigen::Index>(s.out));
}

struct MlpTrace {
  RowMatrix input;
  RowMatrix pre;
  RowMatrix hidden;
};

inline RowMatrix mlp_forward(const double* p, const MlpSlot& s, RowMatrix input, MlpTrace* trace) {
  RowMatrix pre = input * weight(p, s.first);
  pre.rowwise() += bias(p, s.first);
  RowMatrix hidden = pre.cwiseMax(0.0);
  RowMatrix out = hidden * weight(p, s.second);
  out.rowwise() += bias(p, s.second);
  if (trace) {
    trace->input = std::move(input);
    trace->pre = std::move(pre);
    trace->hidden = std::move(hidden);
  }
  return out;
}

// Accumulates parameter gradients into `g` and returns d(loss)/d(input).
inline RowMatrix mlp_backward(const double* p, double* g, const MlpSlot& s, const MlpTrace& t,
                              const RowMatrix& dout) {
  const auto& a = s.first;
  const auto& b = s.second;
  GradMap(g + b.offset, static_cast<Eigen::Index>(b.in), static_cast<Eigen::Index>(b.out)).noalias() +=
      t.hidden.transpose() * dout;
  GradRowMap(g + b.offset + b.in * b.out, static_cast<Eigen::Index>(b.out)) += dout.colwise().sum();
  RowMatrix dpre = dout * weight(p, b).transpose();
  dpre = dpre.cwiseProduct((t.pre.array() > 0.0).cast<double>().matrix());
  GradMap(g + a.offset, static_cast<Eigen::Index>(a.in), static_cast<Eigen::Index>(a.out)).noalias() +=
      t.input.transpose() * dpre;
  GradRowMap(g + a.offset + a.in * a.out, static_cast<Eigen::Index>(a.out)) += dpre.colwise().sum();
  return dpre * weight(p, a).transpose();
}

// Row e of the result is [con_emb[con(e)], edge_emb[e], var_emb[var(e)]].
inline RowMatrix gather_edges(const std::vector<Edge>& edges, const RowMatrix& con_emb, const RowMatrix& edge_emb,
                              const RowMatrix& var_emb) {
  const auto d = con_emb.cols();
  RowMatrix x(static_cast<Eigen::Index>(edges.size()), 3 * d);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto r = static_cast<Eigen::Index>(e);
    x.row(r).segment(0, d) = con_emb.row(static_cast<Eigen::Index>(edges[e].con));
    x.row(r).segment(d, d) = edge_emb.row(r);
    x.row(r).segment(2 * d, d) = var_emb.row(static_cast<Eigen::Index>(edges[e].var));
  }
  return x;
}

inline RowMatrix hconcat(const RowMatrix& a, const RowMatrix& b) {
  RowMatrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace detail

// Mean of incident-variable embeddings per constraint, then mean of those
// over each variable's constraints. Variables without constraints get 0.
inline RowMatrix competitor_context(const RowMatrix& var_emb, const Incidence& inc) {
  const auto d = var_emb.cols();
  RowMatrix con_mean = RowMatrix::Zero(static_cast<Eigen::Index>(inc.num_cons), d);
  for (std::size_t k = 0; k < inc.num_cons; ++k) {
    const auto& members = inc.con_vars[k];
    if (members.empty()) throw std::invalid_argument("competitor_context: constraint without variables");
    auto row = con_mean.row(static_cast<Eigen::Index>(k));
    for (auto j : members) row += var_emb.row(static_cast<Eigen::Index>(j));
    row /= static_cast<double>(members.size());
  }
  RowMatrix ctx = RowMatrix::Zero(var_emb.rows(), d);
  for (std::size_t j = 0; j < inc.num_vars; ++j) {
    const auto& cons = inc.var_cons[j];
    if (cons.empty()) continue;
    auto row = ctx.row(static_cast<Eigen::Index>(j));
    for (auto k : cons) row += con_mean.row(static_cast<Eigen::Index>(k));
    row /= static_cast<double>(cons.size());
  }
  return ctx;
}

// Adjoint of competitor_context.
inline RowMatrix competitor_context_adjoint(const RowMatrix& grad, const Incidence& inc) {
  const auto d = grad.cols();
  RowMatrix con_grad = RowMatrix::Zero(static_cast<Eigen::Index>(inc.num_cons), d);
  for (std::size_t j = 0; j < inc.num_vars; ++j) {
    const auto& cons = inc.var_cons[j];
    if (cons.empty()) continue;
    const double share = 1.0 / static_cast<double>(cons.size());
    for (auto k : cons) con_grad.row(static_cast<Eigen::Index>(k)) += share * grad.row(static_cast<Eigen::Index>(j));
  }
  RowMatrix out = RowMatrix::Zero(grad.rows(), d);
  for (std::size_t k = 0; k < inc.num_cons; ++k) {
    const auto& members = inc.con_vars[k];
    const double share = 1.0 / static_cast<double>(members.size());
    for (auto j : members) out.row(static_cast<Eigen::Index>(j)) += share * con_grad.row(static_cast<Eigen::Index>(k));
  }
  return out;
}

// Intra-constraint competitive update: h_j - beta * hbar_j.
inline RowMatrix icc_apply(const RowMatrix& var_emb, const Incidence& inc, double beta) {
  return var_emb - beta * competitor_context(var_emb, inc);
}

// Intermediate values of one forward pass, consumed by backward().
struct ForwardTape {
  const GnnModel* model = nullptr;
  std::uint64_t model_version = 0;
  const BipartiteGraph* graph = nullptr;

  struct Round {
    detail::MlpTrace con_message, con_update, var_message, var_update;
    RowMatrix context;  // competitor context, when ICC is on
  };
  detail::MlpTrace var_input, con_input, edge_input, jk, head;
  std::vector<Round> rounds;
};

namespace detail {

inline void check_graph(const GnnModel& model, const BipartiteGraph& g) {
  (void)model;
  if (static_cast<std::size_t>(g.var_features.cols()) != kVarFeatures ||
      static_cast<std::size_t>(g.con_features.cols()) != kConFeatures ||
      static_cast<std::size_t>(g.edge_features.cols()) != kEdgeFeatures)
    throw std::invalid_argument("forward: graph feature dimensions do not match the model");
  if (static_cast<std::size_t>(g.var_features.rows()) != g.num_var_nodes ||
      static_cast<std::size_t>(g.con_features.rows()) != g.num_con_nodes ||
      static_cast<std::size_t>(g.edge_features.rows()) != g.edges.size())
    throw std::invalid_argument("forward: graph feature rows do not match node/edge counts");
  if (g.num_binary > g.num_var_nodes) throw std::invalid_argument("forward: more binaries than variables");
}

}  // namespace detail

inline Prediction forward(const GnnModel& model, const BipartiteGraph& g, ForwardTape* tape = nullptr) {
  using detail::mlp_forward;
  detail::check_graph(model, g);
  const double* p = model.parameters().data();
  const auto& cfg = model.config();
  if (tape) {
    *tape = ForwardTape{};
    tape->model = &model;
    tape->model_version = model.version();
    tape->graph = &g;
    tape->rounds.resize(cfg.num_rounds);
  }
  auto tr = [&](detail::MlpTrace ForwardTape::*member) { return tape ? &(tape->*member) : nullptr; };

  Prediction pred;
  RowMatrix var_emb = mlp_forward(p, model.var_input(), g.var_features, tr(&ForwardTape::var_input));
  RowMatrix con_emb = mlp_forward(p, model.con_input(), g.con_features, tr(&ForwardTape::con_input));
  const RowMatrix edge_emb = mlp_forward(p, model.edge_input(), g.edge_features, tr(&ForwardTape::edge_input));
  pred.layer_var_embeddings.push_back(var_emb);

  const auto d = static_cast<Eigen::Index>(cfg.embed_size);
  const auto n = static_cast<Eigen::Index>(g.num_var_nodes);
  const auto m = static_cast<Eigen::Index>(g.num_con_nodes);
  for (std::size_t r = 0; r < cfg.num_rounds; ++r) {
    const auto& slots = model.round(r);
    ForwardTape::Round* rt = tape ? &tape->rounds[r] : nullptr;

    // constraints <- variables
    RowMatrix messages = mlp_forward(p, slots.con_message, detail::gather_edges(g.edges, con_emb, edge_emb, var_emb),
                                     rt ? &rt->con_message : nullptr);
    RowMatrix con_sum = RowMatrix::Zero(m, d);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      con_sum.row(static_cast<Eigen::Index>(g.edges[e].con)) += messages.row(static_cast<Eigen::Index>(e));
    RowMatrix con_next = mlp_forward(p, slots.con_update, detail::hconcat(con_emb, con_sum),
                                     rt ? &rt->con_update : nullptr);

    // variables <- constraints
    messages = mlp_forward(p, slots.var_message, detail::gather_edges(g.edges, con_next, edge_emb, var_emb),
                           rt ? &rt->var_message : nullptr);
    RowMatrix var_sum = RowMatrix::Zero(n, d);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      var_sum.row(static_cast<Eigen::Index>(g.edges[e].var)) += messages.row(static_cast<Eigen::Index>(e));
    RowMatrix var_next = mlp_forward(p, slots.var_update, detail::hconcat(var_emb, var_sum),
                                     rt ? &rt->var_update : nullptr);

    if (cfg.icc_enabled) {
      RowMatrix context = competitor_context(var_next, g.incidence);
      var_next -= p[slots.beta] * context;
      if (rt) rt->context = std::move(context);
    }
    var_emb = std::move(var_next);
    con_emb = std::move(con_next);
    pred.layer_var_embeddings.push_back(var_emb);
  }

  RowMatrix stacked(n, d * static_cast<Eigen::Index>(cfg.num_rounds + 1));
  for (std::size_t k = 0; k <= cfg.num_rounds; ++k)
    stacked.middleCols(static_cast<Eigen::Index>(k) * d, d) = pred.layer_var_embeddings[k];
  const RowMatrix joined = mlp_forward(p, model.jk(), std::move(stacked), tr(&ForwardTape::jk));
  const RowMatrix z = mlp_forward(p, model.head(), joined, tr(&ForwardTape::head));

  pred.logits.resize(g.num_binary);
  pred.marginals.resize(g.num_binary);
  for (std::size_t j = 0; j < g.num_binary; ++j) {
    pred.logits[j] = z(static_cast<Eigen::Index>(j), 0);
    pred.marginals[j] = sigmoid(pred.logits[j]);
  }
  return pred;
}

// Gradient of a scalar loss with respect to every model parameter (same
// layout as GnnModel::parameters()), given d(loss)/d(logits).
inline std::vector<double> backward(const GnnModel& model, const BipartiteGraph& g, const ForwardTape& tape,
                                    std::span<const double> dlogits) {
  using detail::mlp_backward;
  if (tape.model != &model || tape.model_version != model.version() || tape.graph != &g)
    throw std::logic_error("backward: no recorded forward pass for this model/graph pair");
  if (dlogits.size() != g.num_binary) throw std::invalid_argument("backward: gradient length differs from p");

  const auto& cfg = model.config();
  const double* p = model.parameters().data();
  ParamBuffer grads(model.num_parameters(), 0.0);
  double* gp = grads.data();
  const auto d = static_cast<Eigen::Index>(cfg.embed_size);
  const auto n = static_cast<Eigen::Index>(g.num_var_nodes);
  const auto m = static_cast<Eigen::Index>(g.num_con_nodes);
  const auto num_edges = static_cast<Eigen::Index>(g.edges.size());

  RowMatrix dz = RowMatrix::Zero(n, 1);
  for (std::size_t j = 0; j < dlogits.size(); ++j) dz(static_cast<Eigen::Index>(j), 0) = dlogits[j];
  const RowMatrix djoined = mlp_backward(p, gp, model.head(), tape.head, dz);
  const RowMatrix dstacked = mlp_backward(p, gp, model.jk(), tape.jk, djoined);

  std::vector<RowMatrix> dvar(cfg.num_rounds + 1);
  for (std::size_t k = 0; k <= cfg.num_rounds; ++k) dvar[k] = dstacked.middleCols(static_cast<Eigen::Index>(k) * d, d);
  RowMatrix dedge = RowMatrix::Zero(num_edges, d);
  RowMatrix dcon = RowMatrix::Zero(m, d);  // gradient on the constraint embedding leaving the round

  for (std::size_t r = cfg.num_rounds; r-- > 0;) {
    const auto& slots = model.round(r);
    const auto& rt = tape.rounds[r];

    RowMatrix dvar_next = dvar[r + 1];
    if (cfg.icc_enabled) {
      gp[slots.beta] -= rt.context.cwiseProduct(dvar[r + 1]).sum();
      dvar_next -= p[slots.beta] * competitor_context_adjoint(dvar[r + 1], g.incidence);
    }
    RowMatrix dupdate = mlp_backward(p, gp, slots.var_update, rt.var_update, dvar_next);
    dvar[r] += dupdate.leftCols(d);
    RowMatrix dmsg(num_edges, d);
    for (Eigen::Index e = 0; e < num_edges; ++e)
      dmsg.row(e) = dupdate.row(static_cast<Eigen::Index>(g.edges[static_cast<std::size_t>(e)].var)).tail(d);
    RowMatrix dx = mlp_backward(p, gp, slots.var_message, rt.var_message, dmsg);
    RowMatrix dcon_next = dcon;
    for (Eigen::Index e = 0; e < num_edges; ++e) {
      const auto& edge = g.edges[static_cast<std::size_t>(e)];
      dcon_next.row(static_cast<Eigen::Index>(edge.con)) += dx.row(e).segment(0, d);
      dedge.row(e) += dx.row(e).segment(d, d);
      dvar[r].row(static_cast<Eigen::Index>(edge.var)) += dx.row(e).segment(2 * d, d);
    }

    dupdate = mlp_backward(p, gp, slots.con_update, rt.con_update, dcon_next);
    dcon = dupdate.leftCols(d);
    for (Eigen::Index e = 0; e < num_edges; ++e)
      dmsg.row(e) = dupdate.row(static_cast<Eigen::Index>(g.edges[static_cast<std::size_t>(e)].con)).tail(d);
    dx = mlp_backward(p, gp, slots.con_message, rt.con_message, dmsg);
    for (Eigen::Index e = 0; e < num_edges; ++e) {
      const auto& edge = g.edges[static_cast<std::size_t>(e)];
      dcon.row(static_cast<Eigen::Index>(edge.con)) += dx.row(e).segment(0, d);
      dedge.row(e) += dx.row(e).segment(d, d);
      dvar[r].row(static_cast<Eigen::Index>(edge.var)) += dx.row(e).segment(2 * d, d);
    }
  }

  mlp_backward(p, gp, model.var_input(), tape.var_input, dvar[0]);
  mlp_backward(p, gp, model.con_input(), tape.con_input, dcon);
  mlp_backward(p, gp, model.edge_input(), tape.edge_input, dedge);
  return std::vector<double>(grads.begin(), grads.end());
}

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t size = 0) : m(size, 0.0), v(size, 0.0) {}
};

// Adam with bias correction.
inline void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                        const AdamOptions& opt) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size())
    throw std::invalid_argument("adam_update: parameter, gradient and state sizes differ");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(opt.beta1, t);
  const double c2 = 1.0 - std::pow(opt.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = opt.beta1 * state.m[i] + (1.0 - opt.beta1) * grads[i];
    state.v[i] = opt.beta2 * state.v[i] + (1.0 - opt.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= opt.lr * mhat / (std::sqrt(vhat) + opt.eps);
  }
}

inline void adam_step(GnnModel& model, std::span<const double> grads, AdamState& state, const AdamOptions& opt) {
  adam_update(model.mutable_parameters(), grads, state, opt);
}

// Checkpoint layout (little-endian):
//   "COCOGNN\0" | u32 format version | u64 embed | u64 rounds | u64 hidden |
//   u8 icc | u64 seed | u64 count | count x f64
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string save_checkpoint(const GnnModel& model) {
  static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");
  std::string out("COCOGNN\0", 8);
  auto put = [&](const auto& v) { out.append(reinterpret_cast<const char*>(&v), sizeof(v)); };
  const auto& cfg = model.config();
  put(std::uint32_t{1});
  put(static_cast<std::uint64_t>(cfg.embed_size));
  put(static_cast<std::uint64_t>(cfg.num_rounds));
  put(static_cast<std::uint64_t>(cfg.mlp_hidden));
  put(static_cast<std::uint8_t>(cfg.icc_enabled ? 1 : 0));
  put(cfg.seed);
  put(static_cast<std::uint64_t>(model.num_parameters()));
  for (double v : model.parameters()) put(v);
  return out;
}

inline GnnModel load_checkpoint(std::string_view bytes) {
  std::size_t pos = 0;
  auto get = [&](auto& v) {
    if (pos + sizeof(v) > bytes.size()) throw CheckpointError("checkpoint truncated");
    std::memcpy(&v, bytes.data() + pos, sizeof(v));
    pos += sizeof(v);
  };
  if (bytes.substr(0, 8) != std::string_view("COCOGNN\0", 8)) throw CheckpointError("not a model checkpoint");
  pos = 8;
  std::uint32_t version = 0;
  get(version);
  if (version != 1) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  std::uint64_t embed = 0, rounds = 0, hidden = 0, count = 0;
  std::uint8_t icc = 0;
  GnnConfig cfg;
  get(embed);
  get(rounds);
  get(hidden);
  get(icc);
  get(cfg.seed);
  get(count);
  cfg.embed_size = embed;
  cfg.num_rounds = rounds;
  cfg.mlp_hidden = hidden;
  cfg.icc_enabled = icc != 0;
  GnnModel model(cfg);
  if (count != model.num_parameters()) throw CheckpointError("checkpoint parameter count does not match its config");
  auto params = model.mutable_parameters();
  for (auto& v : params) get(v);
  if (pos != bytes.size()) throw CheckpointError("trailing bytes after checkpoint payload");
  return model;
}

}  // namespace coco

#endif  // COCO_NN_HPP
