#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydra/sql.hpp"

namespace hydra {

/// Largest select-clause size the count head distinguishes. The count classes
/// are {1..kDefaultNsMax}.
inline constexpr int kDefaultNsMax = 3;
/// Largest where-clause size; count classes are {0..kNwMax}.
inline constexpr int kNwMax = 4;
/// Default cap on value span length, in tokens.
inline constexpr int kDefaultMaxSpan = 12;

inline constexpr double kDistributionTolerance = 1e-6;

/// Per-(column, question) encoder output: three ranking scores, operator and
/// clause-count distributions, and value span distributions over question
/// positions {0..n} where position 0 is the no-answer sentinel.
struct ColumnScores {
  double p_select = 0.5;
  double p_where = 0.5;
  double p_relevant = 0.5;
  std::vector<double> agg_dist;    // kAggOpCount entries
  std::vector<double> op_dist;     // kCondOpCount entries
  std::vector<double> ns_dist;     // classes 1..ns_max
  std::vector<double> nw_dist;     // classes 0..kNwMax
  std::vector<double> start_dist;  // question token count + 1
  std::vector<double> end_dist;    // same length as start_dist
};

namespace detail {

inline void check_probability(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument(std::string(name) + " outside (0,1): " + std::to_string(p));
}

inline void check_distribution(const std::vector<double>& d, std::size_t len, const char* name) {
  if (d.size() != len)
    throw std::invalid_argument(std::string(name) + " has length " + std::to_string(d.size()) +
                                ", expected " + std::to_string(len));
  double sum = 0.0;
  for (double v : d) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " has a negative or non-finite entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kDistributionTolerance)
    throw std::invalid_argument(std::string(name) + " sums to " + std::to_string(sum));
}

}  // namespace detail

/// Throws std::invalid_argument when any ColumnScores invariant fails.
inline void validate(const ColumnScores& s, std::size_t question_tokens) {
  detail::check_probability(s.p_select, "p_select");
  detail::check_probability(s.p_where, "p_where");
  detail::check_probability(s.p_relevant, "p_relevant");
  detail::check_distribution(s.agg_dist, kAggOpCount, "agg_dist");
  detail::check_distribution(s.op_dist, kCondOpCount, "op_dist");
  if (s.ns_dist.empty()) throw std::invalid_argument("ns_dist is empty");
  detail::check_distribution(s.ns_dist, s.ns_dist.size(), "ns_dist");
  detail::check_distribution(s.nw_dist, kNwMax + 1, "nw_dist");
  detail::check_distribution(s.start_dist, question_tokens + 1, "start_dist");
  detail::check_distribution(s.end_dist, question_tokens + 1, "end_dist");
}

/// A 1-based inclusive token span; used for condition values.
struct SpanRef {
  int start = 0;
  int end = 0;
};

/// Training targets for one (column, question) sample, derived from a gold
/// query. `agg` is present only for select columns and `op` only for where
/// columns; other samples contribute no loss on those heads. `start`/`end`
/// are 1-based question positions with 0 as the no-answer sentinel.
/// `span_masked` marks where-columns whose gold value could not be aligned:
/// they keep start = end = 0 and are excluded from span loss.
struct TaskLabels {
  bool is_select = false;
  bool is_where = false;
  bool is_relevant = false;
  std::optional<AggOp> agg;
  std::optional<CondOp> op;
  int start = 0;
  int end = 0;
  bool span_masked = false;
  int ns = 1;
  int nw = 0;
};

}  // namespace hydra
