#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hydra/scores.hpp"

namespace hydra {

enum class RankTask { select, where, relevant };

struct CountFusion {
  int predicted = 0;
  std::vector<double> posterior;  // unnormalized, indexed by class
};

namespace detail {

inline int argmax_smallest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
  return best;
}

inline double task_score(const ColumnScores& s, RankTask task) {
  switch (task) {
    case RankTask::select: return s.p_select;
    case RankTask::where: return s.p_where;
    case RankTask::relevant: return s.p_relevant;
  }
  throw std::logic_error("unknown rank task");
}

}  // namespace detail

/// Column-wise count fusion: each per-column distribution over a global count
/// is weighted by that column's relevance probability and summed. The fused
/// count is the argmax of the pooled posterior; ties break toward the smaller
/// count. `first_class` maps posterior index 0 to a count (1 for the select
/// count, whose classes start at one condition; 0 for the where count).
inline CountFusion fuse_count(const std::vector<ColumnScores>& scores,
                              const std::vector<double> ColumnScores::*dist, int first_class) {
  if (scores.empty()) throw std::invalid_argument("fuse_count: no column scores");
  const std::size_t classes = (scores.front().*dist).size();
  CountFusion out;
  out.posterior.assign(classes, 0.0);
  for (const ColumnScores& s : scores) {
    const std::vector<double>& d = s.*dist;
    if (d.size() != classes)
      throw std::invalid_argument("fuse_count: inconsistent class counts across columns");
    for (std::size_t k = 0; k < classes; ++k) out.posterior[k] += s.p_relevant * d[k];
  }
  out.predicted = detail::argmax_smallest(out.posterior) + first_class;
  return out;
}

inline CountFusion fuse_select_count(const std::vector<ColumnScores>& scores) {
  return fuse_count(scores, &ColumnScores::ns_dist, 1);
}

inline CountFusion fuse_where_count(const std::vector<ColumnScores>& scores) {
  return fuse_count(scores, &ColumnScores::nw_dist, 0);
}

/// Ranks columns by the task probability, descending. Ties break toward the
/// smaller column index, so the result is a deterministic permutation.
/// `column_indices[i]` names the column that produced `scores[i]`; the
/// index-free overload uses positions 0..n-1.
inline std::vector<int> rank(const std::vector<ColumnScores>& scores,
                             const std::vector<int>& column_indices, RankTask task) {
  if (scores.size() != column_indices.size())
    throw std::invalid_argument("rank: scores and column indices differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = detail::task_score(scores[a], task);
    const double sb = detail::task_score(scores[b], task);
    if (sa != sb) return sa > sb;
    return column_indices[a] < column_indices[b];
  });
  std::vector<int> ranked(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) ranked[i] = column_indices[order[i]];
  return ranked;
}

inline std::vector<int> rank(const std::vector<ColumnScores>& scores, RankTask task) {
  std::vector<int> indices(scores.size());
  std::iota(indices.begin(), indices.end(), 0);
  return rank(scores, indices, task);
}

/// First k entries of the ranking (all of it when k exceeds the column count).
inline std::vector<int> top_k(const std::vector<ColumnScores>& scores,
                              const std::vector<int>& column_indices, RankTask task,
                              std::size_t k) {
  std::vector<int> ranked = rank(scores, column_indices, task);
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

inline std::vector<int> top_k(const std::vector<ColumnScores>& scores, RankTask task,
                              std::size_t k) {
  std::vector<int> indices(scores.size());
  std::iota(indices.begin(), indices.end(), 0);
  return top_k(scores, indices, task, k);
}

}  // namespace hydra
