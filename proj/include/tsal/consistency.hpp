#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsal/aggregate.hpp"

namespace tsal::consistency {

// Sample Pearson correlation. Throws DegenerateVector if either input is
// constant, InvalidConfig if lengths differ or are < 2.
double pearson(std::span<const double> a, std::span<const double> b);

struct KsResult {
  double statistic = 0.0;  // sup |ECDF_x - ECDF_y|
  double p_value = 1.0;
};

// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
// Both series are truncated once a term drops below 1e-10.
double kolmogorov_survival(double lambda);

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value at
// effective size n m / (n + m). Throws EmptySample.
KsResult ks_two_sample(std::span<const double> x, std::span<const double> y);

struct ConsistencyReport {
  std::string video_id;
  aggregate::AggregationSpec spec;
  int group_size = 0;
  int n_splits = 0;
  std::uint64_t seed = 0;
  double pcc_mean = 0.0;
  double pcc_std = 0.0;
  double ks_p_mean = 0.0;
  // Splits where a group map was constant; they contribute PCC = 0.
  int degenerate_pcc_splits = 0;
  // Splits where a group had no deblurred frames; p = 1 if both were empty, else 0.
  int degenerate_ks_splits = 0;
  std::vector<double> pcc_per_split;
  std::vector<double> ks_p_per_split;
};

// Observer order in which the cohort is shuffled: by observer id, ties broken
// by log content. Returned as indices into `logs`.
std::vector<std::size_t> canonical_order(aggregate::Cohort logs);

// The two disjoint groups of split `split_index`: a Fisher-Yates shuffle of
// canonical_order driven by Rng(derive_seed(seed, split_index)); group A is
// the first group_size entries, group B the next group_size.
struct Split {
  std::vector<std::size_t> group_a;
  std::vector<std::size_t> group_b;
};
Split draw_split(std::span<const std::size_t> canonical, int group_size, std::uint64_t seed,
                 int split_index);

// Split-half protocol: for every split, PCC between the groups' normalized
// temporal maps and KS between their pooled deblurred-frame indices.
// Throws InsufficientCohort if logs.size() < 2 * group_size.
ConsistencyReport split_consistency(aggregate::Cohort logs, const std::string& video_id,
                                    const aggregate::AggregationSpec& spec, int group_size,
                                    int n_splits, std::uint64_t seed);

}  // namespace tsal::consistency
