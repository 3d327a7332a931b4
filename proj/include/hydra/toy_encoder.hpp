#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "hydra/encoder.hpp"
#include "hydra/features.hpp"

namespace hydra {

namespace detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

}  // namespace detail

/// Keyword-matching encoder with no trainable state. It exists to exercise the
/// encoder contract and to give the pipeline a usable zero-training baseline:
/// columns mentioned in the question outrank unmentioned ones, aggregation and
/// operator keywords nudge the corresponding classes, and span scores favor
/// tokens that follow a copula near the column mention.
class ToyEncoder : public Encoder {
 public:
  explicit ToyEncoder(int ns_max = kDefaultNsMax) : ns_max_(ns_max) {}

  ColumnScores score(const Column& column, const Question& question) const override {
    detail::require_nonempty_question(question);
    const PairFeatures f = extract_features(column, question);
    const std::size_t n = question.tokens.size();
    auto pf = [&f](const std::string& name) {
      auto it = f.pair.find(name);
      return it == f.pair.end() ? 0.0 : it->second;
    };

    ColumnScores s;
    const double base = 2.0 * pf("col_coverage") + 1.5 * pf("char3_jaccard") + pf("exact_substr");
    const bool next_is_cue = pf("match_next1=is") > 0 || pf("match_next1=equals") > 0 ||
                             pf("match_next1=was") > 0 || pf("match_next1=of") > 0;
    s.p_select = detail::sigmoid(base - 1.2 - (next_is_cue ? 0.5 : 0.0));
    s.p_where = detail::sigmoid(base - 1.5 + (next_is_cue ? 1.0 : 0.0));
    s.p_relevant = detail::sigmoid(base - 1.0);

    std::vector<double> agg(kAggOpCount, 0.0);
    agg[code(AggOp::None)] = 1.0;
    if (pf("uni=how") > 0 && pf("uni=many") > 0) agg[code(AggOp::Count)] += 2.5;
    if (pf("uni=count") > 0) agg[code(AggOp::Count)] += 2.0;
    if (pf("uni=total") > 0 || pf("uni=sum") > 0) agg[code(AggOp::Sum)] += 2.5;
    if (pf("uni=average") > 0 || pf("uni=mean") > 0) agg[code(AggOp::Avg)] += 2.5;
    if (pf("uni=highest") > 0 || pf("uni=maximum") > 0 || pf("uni=most") > 0 ||
        pf("uni=largest") > 0)
      agg[code(AggOp::Max)] += 2.5;
    if (pf("uni=lowest") > 0 || pf("uni=minimum") > 0 || pf("uni=least") > 0 ||
        pf("uni=smallest") > 0)
      agg[code(AggOp::Min)] += 2.5;
    s.agg_dist = detail::softmax(agg);

    std::vector<double> op(kCondOpCount, 0.0);
    op[code(CondOp::Eq)] = 1.0;
    const bool local_gt = pf("match_next2=more") > 0 || pf("match_next2=greater") > 0 ||
                          pf("match_next2=over") > 0 || pf("match_next2=above") > 0;
    const bool local_lt = pf("match_next2=less") > 0 || pf("match_next2=fewer") > 0 ||
                          pf("match_next2=under") > 0 || pf("match_next2=below") > 0;
    if (local_gt) op[code(CondOp::Gt)] += 3.0;
    if (local_lt) op[code(CondOp::Lt)] += 3.0;
    s.op_dist = detail::softmax(op);

    std::vector<double> ns(static_cast<std::size_t>(ns_max_), 0.0);
    ns[0] = 2.0;
    s.ns_dist = detail::softmax(ns);

    int cond_cues = 0;
    if (pf("uni=when") > 0 || pf("uni=where") > 0 || pf("uni=with") > 0 ||
        pf("uni=for") > 0 || pf("uni=have") > 0 || pf("uni=has") > 0)
      cond_cues = 1;
    if (cond_cues > 0 && pf("uni=and") > 0) cond_cues = 2;
    std::vector<double> nw(kNwMax + 1, 0.0);
    nw[cond_cues] = 2.5;
    s.nw_dist = detail::softmax(nw);

    std::vector<double> start(n + 1, 0.0);
    std::vector<double> end(n + 1, 0.0);
    start[0] = 1.0;
    end[0] = 1.0;
    static const std::set<std::string> cues = {"is", "equals", "was", "of", "to", "than"};
    for (std::size_t j = 0; j < n; ++j) {
      auto tf = [&](const std::string& name) {
        auto it = f.token[j].find(name);
        return it == f.token[j].end() ? 0.0 : it->second;
      };
      double logit = 0.0;
      const std::string prev = j > 0 ? question.tokens[j - 1].lower : std::string();
      if (cues.count(prev)) logit += 2.0;
      if (tf("t_numeric_real_col") > 0) logit += 1.0;
      if (tf("t_after_col_d2") > 0) logit += 1.5;
      if (tf("t_in_col") > 0) logit -= 2.5;
      start[j + 1] = logit;
      double end_logit = logit;
      const std::string next = j + 1 < n ? question.tokens[j + 1].lower : std::string();
      if (next.empty() || next == "?" || next == "and" || next == ".") end_logit += 1.0;
      end[j + 1] = end_logit;
    }
    s.start_dist = detail::softmax(start);
    s.end_dist = detail::softmax(end);
    return s;
  }

 private:
  int ns_max_;
};

}  // namespace hydra
