#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hydra/encoder.hpp"
#include "hydra/features.hpp"
#include "hydra/toy_encoder.hpp"

namespace hydra {

inline constexpr int kModelFormatVersion = 1;
inline constexpr const char* kModelFormatName = "hydra-linear-encoder";

/// Feature-name interning table. Indices are assigned in first-encounter
/// order, which makes training runs reproducible.
struct FeatureVocab {
  std::unordered_map<std::string, int> index;
  std::vector<std::string> names;

  int intern(const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(names.size());
    index.emplace(name, id);
    names.push_back(name);
    return id;
  }
  int lookup(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? -1 : it->second;
  }
  std::size_t size() const { return names.size(); }
};

struct BinaryHead {
  std::vector<double> weights;
  double bias = 0.0;
};

struct SoftmaxHead {
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;                  // [class]
};

/// Span heads score each question position with a shared weight vector over
/// per-token features; the no-answer sentinel (position 0) has its own bias.
struct SpanHead {
  std::vector<double> weights;
  double sentinel_bias = 0.0;
};

struct LinearHeads {
  BinaryHead select_head, where_head, relevant_head;
  SoftmaxHead agg_head, op_head, ns_head, nw_head;
  SpanHead start_head, end_head;
};

struct TaskWeights {
  double select = 1.0, where = 1.0, relevant = 1.0;
  double agg = 1.0, op = 1.0, ns = 1.0, nw = 1.0;
  double start = 1.0, end = 1.0;
};

struct TrainConfig {
  int epochs = 12;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;
  int ns_max = kDefaultNsMax;
  TaskWeights task_weights;
};

struct TrainSample {
  Column column;
  Question question;
  TaskLabels labels;
};

struct TrainTrace {
  std::vector<double> epoch_loss;  // mean dataset loss after each epoch
};

namespace detail {

using IndexedFeatures = std::vector<std::pair<int, double>>;

struct ResolvedSample {
  IndexedFeatures pair;
  std::vector<IndexedFeatures> token;
  TaskLabels labels;
};

inline IndexedFeatures resolve(const SparseFeatures& f, const FeatureVocab& vocab) {
  IndexedFeatures out;
  out.reserve(f.size());
  for (const auto& [name, value] : f) {
    int id = vocab.lookup(name);
    if (id >= 0) out.emplace_back(id, value);
  }
  return out;
}

inline double dot(const std::vector<double>& w, const IndexedFeatures& f) {
  double z = 0.0;
  for (const auto& [i, v] : f) z += w[static_cast<std::size_t>(i)] * v;
  return z;
}

// ln(1 + e^z), overflow-safe.
inline double softplus(double z) {
  if (z > 0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

template <typename Fn>
void for_each_parameter(LinearHeads& heads, Fn&& fn) {
  auto binary = [&fn](BinaryHead& h) {
    for (double& w : h.weights) fn(w);
    fn(h.bias);
  };
  auto soft = [&fn](SoftmaxHead& h) {
    for (auto& row : h.weights)
      for (double& w : row) fn(w);
    for (double& b : h.bias) fn(b);
  };
  auto span = [&fn](SpanHead& h) {
    for (double& w : h.weights) fn(w);
    fn(h.sentinel_bias);
  };
  binary(heads.select_head);
  binary(heads.where_head);
  binary(heads.relevant_head);
  soft(heads.agg_head);
  soft(heads.op_head);
  soft(heads.ns_head);
  soft(heads.nw_head);
  span(heads.start_head);
  span(heads.end_head);
}

inline void for_each_parameter_pair(LinearHeads& a, const LinearHeads& b,
                                    const std::function<void(double&, double)>& fn) {
  std::vector<const double*> src;
  for_each_parameter(const_cast<LinearHeads&>(b), [&src](double& w) { src.push_back(&w); });
  std::size_t k = 0;
  for_each_parameter(a, [&](double& w) { fn(w, *src[k++]); });
}

// Deterministic Fisher-Yates; avoids std::shuffle's unspecified draw order.
inline void deterministic_shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace detail

/// Trainable encoder: logistic/softmax heads over the deterministic sparse
/// features of features.hpp, optimized with mini-batch gradient descent on the
/// summed per-task cross-entropy.
///
/// Model file schema (JSON, versioned): format, format_version, config
/// (ns_max, epochs, learning_rate, batch_size, seed, task_weights),
/// pair_features and token_features (names in index order), and heads —
/// select/where/relevant as {weights, bias}, agg/op/ns/nw as
/// {weights[class][feature], bias[class]}, start/end as
/// {weights, sentinel_bias}.
class LinearEncoder : public Encoder {
 public:
  LinearEncoder() { reset_heads(); }
  explicit LinearEncoder(TrainConfig config) : config_(std::move(config)) { reset_heads(); }

  ColumnScores score(const Column& column, const Question& question) const override {
    detail::require_nonempty_question(question);
    const PairFeatures raw = extract_features(column, question);
    detail::ResolvedSample sample;
    sample.pair = detail::resolve(raw.pair, pair_vocab_);
    sample.token.reserve(raw.token.size());
    for (const SparseFeatures& tf : raw.token) sample.token.push_back(detail::resolve(tf, token_vocab_));
    return score_resolved(sample);
  }

  /// Builds the feature vocabulary from `samples` and zero-initializes all
  /// heads. Called by fit(); exposed so tests can probe the raw objective.
  void initialize(const std::vector<TrainSample>& samples, const TrainConfig& config) {
    if (samples.empty()) throw std::invalid_argument("no training samples");
    config_ = config;
    pair_vocab_ = FeatureVocab();
    token_vocab_ = FeatureVocab();
    resolved_.clear();
    resolved_.reserve(samples.size());
    for (const TrainSample& s : samples) {
      const PairFeatures f = extract_features(s.column, s.question);
      detail::ResolvedSample r;
      for (const auto& [name, value] : f.pair) pair_vocab_.intern(name);
      for (const SparseFeatures& tf : f.token)
        for (const auto& [name, value] : tf) token_vocab_.intern(name);
      r.pair = detail::resolve(f.pair, pair_vocab_);
      for (const SparseFeatures& tf : f.token) r.token.push_back(detail::resolve(tf, token_vocab_));
      r.labels = s.labels;
      validate_labels(r);
      resolved_.push_back(std::move(r));
    }
    reset_heads();
  }

  /// Full training run. Returns the loss trace (mean dataset loss evaluated
  /// after each epoch). epochs = 0 leaves the zero initialization in place.
  TrainTrace fit(const std::vector<TrainSample>& samples, const TrainConfig& config) {
    initialize(samples, config);
    TrainTrace trace;
    std::mt19937_64 rng(config_.seed);
    std::vector<std::size_t> order(resolved_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = std::max(1, config_.batch_size);

    for (int epoch = 1; epoch <= config_.epochs; ++epoch) {
      detail::deterministic_shuffle(order, rng);
      const double lr = config_.learning_rate / std::sqrt(static_cast<double>(epoch));
      for (std::size_t begin = 0; begin < order.size(); begin += batch) {
        const std::size_t end = std::min(order.size(), begin + batch);
        LinearHeads grads = zero_heads();
        for (std::size_t k = begin; k < end; ++k)
          accumulate_gradient(resolved_[order[k]], grads);
        const double scale = lr / static_cast<double>(end - begin);
        bool finite = true;
        detail::for_each_parameter(grads, [&finite](double& g) {
          if (!std::isfinite(g)) finite = false;
        });
        if (!finite)
          throw std::runtime_error("non-finite gradient in epoch " + std::to_string(epoch));
        detail::for_each_parameter_pair(heads_, grads,
                                        [scale](double& w, double g) { w -= scale * g; });
      }
      const double loss = mean_resolved_loss();
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite loss after epoch " + std::to_string(epoch));
      trace.epoch_loss.push_back(loss);
    }
    return trace;
  }

  /// Mean per-sample total loss of `samples` under the current weights.
  double dataset_loss(const std::vector<TrainSample>& samples) const {
    if (samples.empty()) throw std::invalid_argument("no samples");
    double total = 0.0;
    for (const TrainSample& s : samples) total += sample_loss(resolve_sample(s));
    return total / static_cast<double>(samples.size());
  }

  /// Gradient of dataset_loss with respect to every parameter, in a
  /// LinearHeads-shaped container matching for-each-parameter order.
  LinearHeads loss_gradient(const std::vector<TrainSample>& samples) const {
    if (samples.empty()) throw std::invalid_argument("no samples");
    LinearHeads grads = zero_heads();
    for (const TrainSample& s : samples) accumulate_gradient(resolve_sample(s), grads);
    const double inv = 1.0 / static_cast<double>(samples.size());
    detail::for_each_parameter(grads, [inv](double& g) { g *= inv; });
    return grads;
  }

  LinearHeads& heads() { return heads_; }
  const LinearHeads& heads() const { return heads_; }
  const TrainConfig& config() const { return config_; }
  const FeatureVocab& pair_vocab() const { return pair_vocab_; }
  const FeatureVocab& token_vocab() const { return token_vocab_; }

  nlohmann::json to_json() const {
    auto binary = [](const BinaryHead& h) {
      return nlohmann::json{{"weights", h.weights}, {"bias", h.bias}};
    };
    auto soft = [](const SoftmaxHead& h) {
      return nlohmann::json{{"weights", h.weights}, {"bias", h.bias}};
    };
    auto span = [](const SpanHead& h) {
      return nlohmann::json{{"weights", h.weights}, {"sentinel_bias", h.sentinel_bias}};
    };
    return nlohmann::json{
        {"format", kModelFormatName},
        {"format_version", kModelFormatVersion},
        {"config",
         {{"ns_max", config_.ns_max},
          {"epochs", config_.epochs},
          {"learning_rate", config_.learning_rate},
          {"batch_size", config_.batch_size},
          {"seed", config_.seed},
          {"task_weights",
           {{"select", config_.task_weights.select},
            {"where", config_.task_weights.where},
            {"relevant", config_.task_weights.relevant},
            {"agg", config_.task_weights.agg},
            {"op", config_.task_weights.op},
            {"ns", config_.task_weights.ns},
            {"nw", config_.task_weights.nw},
            {"start", config_.task_weights.start},
            {"end", config_.task_weights.end}}}}},
        {"pair_features", pair_vocab_.names},
        {"token_features", token_vocab_.names},
        {"heads",
         {{"select", binary(heads_.select_head)},
          {"where", binary(heads_.where_head)},
          {"relevant", binary(heads_.relevant_head)},
          {"agg", soft(heads_.agg_head)},
          {"op", soft(heads_.op_head)},
          {"ns", soft(heads_.ns_head)},
          {"nw", soft(heads_.nw_head)},
          {"start", span(heads_.start_head)},
          {"end", span(heads_.end_head)}}}};
  }

  static LinearEncoder from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", "") != kModelFormatName)
      throw std::runtime_error("not a model file (bad format field)");
    if (j.value("format_version", -1) != kModelFormatVersion)
      throw std::runtime_error("model format version mismatch: expected " +
                               std::to_string(kModelFormatVersion) + ", got " +
                               j.value("format_version", nlohmann::json()).dump());
    LinearEncoder enc;
    const nlohmann::json& cfg = j.at("config");
    enc.config_.ns_max = cfg.at("ns_max").get<int>();
    enc.config_.epochs = cfg.at("epochs").get<int>();
    enc.config_.learning_rate = cfg.at("learning_rate").get<double>();
    enc.config_.batch_size = cfg.at("batch_size").get<int>();
    enc.config_.seed = cfg.at("seed").get<std::uint64_t>();
    const nlohmann::json& tw = cfg.at("task_weights");
    enc.config_.task_weights = TaskWeights{
        tw.at("select").get<double>(), tw.at("where").get<double>(),
        tw.at("relevant").get<double>(), tw.at("agg").get<double>(),
        tw.at("op").get<double>(),      tw.at("ns").get<double>(),
        tw.at("nw").get<double>(),      tw.at("start").get<double>(),
        tw.at("end").get<double>()};
    for (const auto& name : j.at("pair_features").get<std::vector<std::string>>())
      enc.pair_vocab_.intern(name);
    for (const auto& name : j.at("token_features").get<std::vector<std::string>>())
      enc.token_vocab_.intern(name);
    const nlohmann::json& heads = j.at("heads");
    auto binary = [](const nlohmann::json& h) {
      return BinaryHead{h.at("weights").get<std::vector<double>>(), h.at("bias").get<double>()};
    };
    auto soft = [](const nlohmann::json& h) {
      return SoftmaxHead{h.at("weights").get<std::vector<std::vector<double>>>(),
                         h.at("bias").get<std::vector<double>>()};
    };
    auto span = [](const nlohmann::json& h) {
      return SpanHead{h.at("weights").get<std::vector<double>>(),
                      h.at("sentinel_bias").get<double>()};
    };
    enc.heads_.select_head = binary(heads.at("select"));
    enc.heads_.where_head = binary(heads.at("where"));
    enc.heads_.relevant_head = binary(heads.at("relevant"));
    enc.heads_.agg_head = soft(heads.at("agg"));
    enc.heads_.op_head = soft(heads.at("op"));
    enc.heads_.ns_head = soft(heads.at("ns"));
    enc.heads_.nw_head = soft(heads.at("nw"));
    enc.heads_.start_head = span(heads.at("start"));
    enc.heads_.end_head = span(heads.at("end"));
    enc.check_shapes();
    return enc;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
    out << to_json().dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing model file: " + path);
  }

  static LinearEncoder load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("malformed model file " + path + ": " + e.what());
    }
    return from_json(j);
  }

 private:
  void reset_heads() {
    const std::size_t np = pair_vocab_.size();
    const std::size_t nt = token_vocab_.size();
    auto binary = [np]() { return BinaryHead{std::vector<double>(np, 0.0), 0.0}; };
    auto soft = [np](int classes) {
      return SoftmaxHead{
          std::vector<std::vector<double>>(static_cast<std::size_t>(classes),
                                           std::vector<double>(np, 0.0)),
          std::vector<double>(static_cast<std::size_t>(classes), 0.0)};
    };
    heads_.select_head = binary();
    heads_.where_head = binary();
    heads_.relevant_head = binary();
    heads_.agg_head = soft(kAggOpCount);
    heads_.op_head = soft(kCondOpCount);
    heads_.ns_head = soft(config_.ns_max);
    heads_.nw_head = soft(kNwMax + 1);
    heads_.start_head = SpanHead{std::vector<double>(nt, 0.0), 0.0};
    heads_.end_head = SpanHead{std::vector<double>(nt, 0.0), 0.0};
  }

  LinearHeads zero_heads() const {
    LinearEncoder tmp;
    tmp.config_ = config_;
    tmp.pair_vocab_ = pair_vocab_;
    tmp.token_vocab_ = token_vocab_;
    tmp.reset_heads();
    return tmp.heads_;
  }

  void check_shapes() const {
    const std::size_t np = pair_vocab_.size();
    const std::size_t nt = token_vocab_.size();
    auto expect = [](bool ok, const char* what) {
      if (!ok) throw std::runtime_error(std::string("model head shape mismatch: ") + what);
    };
    expect(heads_.select_head.weights.size() == np, "select");
    expect(heads_.where_head.weights.size() == np, "where");
    expect(heads_.relevant_head.weights.size() == np, "relevant");
    auto soft_ok = [np](const SoftmaxHead& h, std::size_t classes) {
      if (h.weights.size() != classes || h.bias.size() != classes) return false;
      for (const auto& row : h.weights)
        if (row.size() != np) return false;
      return true;
    };
    expect(soft_ok(heads_.agg_head, kAggOpCount), "agg");
    expect(soft_ok(heads_.op_head, kCondOpCount), "op");
    expect(soft_ok(heads_.ns_head, static_cast<std::size_t>(config_.ns_max)), "ns");
    expect(soft_ok(heads_.nw_head, kNwMax + 1), "nw");
    expect(heads_.start_head.weights.size() == nt, "start");
    expect(heads_.end_head.weights.size() == nt, "end");
  }

  detail::ResolvedSample resolve_sample(const TrainSample& s) const {
    const PairFeatures f = extract_features(s.column, s.question);
    detail::ResolvedSample r;
    r.pair = detail::resolve(f.pair, pair_vocab_);
    for (const SparseFeatures& tf : f.token) r.token.push_back(detail::resolve(tf, token_vocab_));
    r.labels = s.labels;
    validate_labels(r);
    return r;
  }

  void validate_labels(const detail::ResolvedSample& r) const {
    const int n = static_cast<int>(r.token.size());
    const TaskLabels& l = r.labels;
    if (l.start < 0 || l.end < l.start || l.end > n)
      throw std::invalid_argument("label span out of range");
    if (l.ns < 1 || l.ns > config_.ns_max) throw std::invalid_argument("label ns out of range");
    if (l.nw < 0 || l.nw > kNwMax) throw std::invalid_argument("label nw out of range");
  }

  std::vector<double> softmax_logits(const SoftmaxHead& h,
                                     const detail::IndexedFeatures& f) const {
    std::vector<double> z(h.bias);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += detail::dot(h.weights[k], f);
    return z;
  }

  std::vector<double> span_logits(const SpanHead& h,
                                  const std::vector<detail::IndexedFeatures>& token) const {
    std::vector<double> z(token.size() + 1);
    z[0] = h.sentinel_bias;
    for (std::size_t j = 0; j < token.size(); ++j) z[j + 1] = detail::dot(h.weights, token[j]);
    return z;
  }

  ColumnScores score_resolved(const detail::ResolvedSample& s) const {
    ColumnScores out;
    out.p_select = detail::sigmoid(detail::dot(heads_.select_head.weights, s.pair) +
                                   heads_.select_head.bias);
    out.p_where =
        detail::sigmoid(detail::dot(heads_.where_head.weights, s.pair) + heads_.where_head.bias);
    out.p_relevant = detail::sigmoid(detail::dot(heads_.relevant_head.weights, s.pair) +
                                     heads_.relevant_head.bias);
    out.agg_dist = detail::softmax(softmax_logits(heads_.agg_head, s.pair));
    out.op_dist = detail::softmax(softmax_logits(heads_.op_head, s.pair));
    out.ns_dist = detail::softmax(softmax_logits(heads_.ns_head, s.pair));
    out.nw_dist = detail::softmax(softmax_logits(heads_.nw_head, s.pair));
    out.start_dist = detail::softmax(span_logits(heads_.start_head, s.token));
    out.end_dist = detail::softmax(span_logits(heads_.end_head, s.token));
    return out;
  }

  // Cross-entropy pieces. Losses and gradients are weighted per task; masked
  // tasks contribute exactly zero.
  static double binary_loss(double z, bool y) {
    return y ? detail::softplus(-z) : detail::softplus(z);
  }

  static double softmax_loss(const std::vector<double>& z, int y) {
    double m = z[0];
    for (double v : z) m = std::max(m, v);
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    return m + std::log(sum) - z[static_cast<std::size_t>(y)];
  }

  double sample_loss(const detail::ResolvedSample& s) const {
    const TaskWeights& tw = config_.task_weights;
    const TaskLabels& l = s.labels;
    double loss = 0.0;
    loss += tw.select * binary_loss(detail::dot(heads_.select_head.weights, s.pair) +
                                        heads_.select_head.bias,
                                    l.is_select);
    loss += tw.where * binary_loss(detail::dot(heads_.where_head.weights, s.pair) +
                                       heads_.where_head.bias,
                                   l.is_where);
    loss += tw.relevant * binary_loss(detail::dot(heads_.relevant_head.weights, s.pair) +
                                          heads_.relevant_head.bias,
                                      l.is_relevant);
    if (l.is_select && l.agg)
      loss += tw.agg * softmax_loss(softmax_logits(heads_.agg_head, s.pair), code(*l.agg));
    if (l.is_where && l.op)
      loss += tw.op * softmax_loss(softmax_logits(heads_.op_head, s.pair), code(*l.op));
    loss += tw.ns * softmax_loss(softmax_logits(heads_.ns_head, s.pair), l.ns - 1);
    loss += tw.nw * softmax_loss(softmax_logits(heads_.nw_head, s.pair), l.nw);
    if (!l.span_masked) {
      loss += tw.start * softmax_loss(span_logits(heads_.start_head, s.token), l.start);
      loss += tw.end * softmax_loss(span_logits(heads_.end_head, s.token), l.end);
    }
    return loss;
  }

  static void add_scaled(std::vector<double>& dst, const detail::IndexedFeatures& f,
                         double scale) {
    for (const auto& [i, v] : f) dst[static_cast<std::size_t>(i)] += scale * v;
  }

  void binary_gradient(const BinaryHead& head, const detail::IndexedFeatures& f, bool y,
                       double weight, BinaryHead& grad) const {
    const double p = detail::sigmoid(detail::dot(head.weights, f) + head.bias);
    const double delta = weight * (p - (y ? 1.0 : 0.0));
    add_scaled(grad.weights, f, delta);
    grad.bias += delta;
  }

  void softmax_gradient(const SoftmaxHead& head, const detail::IndexedFeatures& f, int y,
                        double weight, SoftmaxHead& grad) const {
    const std::vector<double> p = detail::softmax(softmax_logits(head, f));
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double delta = weight * (p[k] - (static_cast<int>(k) == y ? 1.0 : 0.0));
      add_scaled(grad.weights[k], f, delta);
      grad.bias[k] += delta;
    }
  }

  void span_gradient(const SpanHead& head, const std::vector<detail::IndexedFeatures>& token,
                     int target, double weight, SpanHead& grad) const {
    const std::vector<double> p = detail::softmax(span_logits(head, token));
    for (std::size_t pos = 0; pos < p.size(); ++pos) {
      const double delta = weight * (p[pos] - (static_cast<int>(pos) == target ? 1.0 : 0.0));
      if (pos == 0) {
        grad.sentinel_bias += delta;
      } else {
        add_scaled(grad.weights, token[pos - 1], delta);
      }
    }
  }

  void accumulate_gradient(const detail::ResolvedSample& s, LinearHeads& grads) const {
    const TaskWeights& tw = config_.task_weights;
    const TaskLabels& l = s.labels;
    binary_gradient(heads_.select_head, s.pair, l.is_select, tw.select, grads.select_head);
    binary_gradient(heads_.where_head, s.pair, l.is_where, tw.where, grads.where_head);
    binary_gradient(heads_.relevant_head, s.pair, l.is_relevant, tw.relevant,
                    grads.relevant_head);
    if (l.is_select && l.agg)
      softmax_gradient(heads_.agg_head, s.pair, code(*l.agg), tw.agg, grads.agg_head);
    if (l.is_where && l.op)
      softmax_gradient(heads_.op_head, s.pair, code(*l.op), tw.op, grads.op_head);
    softmax_gradient(heads_.ns_head, s.pair, l.ns - 1, tw.ns, grads.ns_head);
    softmax_gradient(heads_.nw_head, s.pair, l.nw, tw.nw, grads.nw_head);
    if (!l.span_masked) {
      span_gradient(heads_.start_head, s.token, l.start, tw.start, grads.start_head);
      span_gradient(heads_.end_head, s.token, l.end, tw.end, grads.end_head);
    }
  }

  double mean_resolved_loss() const {
    double total = 0.0;
    for (const detail::ResolvedSample& s : resolved_) total += sample_loss(s);
    return total / static_cast<double>(resolved_.size());
  }

  TrainConfig config_;
  FeatureVocab pair_vocab_;
  FeatureVocab token_vocab_;
  LinearHeads heads_;
  std::vector<detail::ResolvedSample> resolved_;  // training cache
};

}  // namespace hydra
