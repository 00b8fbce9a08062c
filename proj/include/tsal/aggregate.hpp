#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsal/session.hpp"

namespace tsal::aggregate {

// Which rounds enter a temporal map and with what weight. Round numbers are
// 1-based, matching the C_1 .. C_5 naming.
struct AggregationSpec {
  std::vector<int> rounds_used{1, 2, 3, 4, 5};
  std::vector<double> weights{1.0, 0.8, 0.6, 0.4, 0.2};

  // "C1", "C1-2", "C1-5" (unit weights) and "C1-5W" (weights 1, 0.8, ... ).
  static AggregationSpec named(const std::string& name);
  // Unit weights over the first n rounds.
  static AggregationSpec first_rounds(int n);
  // Linearly decreasing weights 1, 1 - 1/n, ..., 1/n. For n == 5 this is
  // {1, 0.8, 0.6, 0.4, 0.2}.
  static AggregationSpec weighted_rounds(int n);

  std::string name() const;
  double weight_sum() const;

  friend bool operator==(const AggregationSpec&, const AggregationSpec&) = default;
};

// Throws Error(InvalidConfig) on mismatched lengths, non-positive weights or
// round numbers outside [1, max_round].
void validate(const AggregationSpec& spec, int max_round);

struct TemporalSaliencyMap {
  std::string video_id;
  std::vector<double> scores;
  int n_observers = 0;
  AggregationSpec spec;
  bool normalized = false;
};

using Cohort = std::span<const session::SessionLog>;

// C_n[f]: number of observers whose round-n log marks frame f deblurred.
// Throws InconsistentCohort when logs disagree on video or duration, or a
// log lacks round n.
std::vector<int> per_round_counts(Cohort logs, const std::string& video_id, int round_number);

// raw[f] = sum_n W_n C_n[f]; scores = raw / (n_observers * sum_n W_n).
// `counts` is aligned with spec.rounds_used. Throws EmptyCohort if
// n_observers == 0.
TemporalSaliencyMap combine_rounds(std::span<const std::vector<int>> counts,
                                   const AggregationSpec& spec, int n_observers);

// Convenience: per_round_counts for every used round followed by combine_rounds.
TemporalSaliencyMap temporal_map(Cohort logs, const std::string& video_id,
                                 const AggregationSpec& spec);

// Unnormalized weighted sums, for callers that need raw aggregate scores.
std::vector<double> raw_scores(std::span<const std::vector<int>> counts,
                               const AggregationSpec& spec);

}  // namespace tsal::aggregate
