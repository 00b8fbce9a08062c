#include "doctest.h"

#include <algorithm>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tsal/aggregate.hpp"
#include "tsal/simulate.hpp"

using namespace tsal;
using namespace tsal::aggregate;
using session::SessionLog;
using testing::log_with;
using testing::round_with;

namespace {

std::vector<SessionLog> random_cohort(Rng& rng, int n, const session::ProtocolParams& p) {
  std::vector<SessionLog> logs;
  for (int i = 0; i < n; ++i) {
    auto log = session::replay(p, testing::random_events(p, rng, 0.02 + 0.1 * rng.uniform()),
                               "o" + std::to_string(i), "vid");
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace

TEST_CASE("named specs") {
  CHECK(AggregationSpec::named("C1") == AggregationSpec{{1}, {1.0}});
  CHECK(AggregationSpec::named("C1-2") == AggregationSpec{{1, 2}, {1.0, 1.0}});
  CHECK(AggregationSpec::named("C1-5").weights == std::vector<double>(5, 1.0));
  CHECK(AggregationSpec::named("C1-5W") == AggregationSpec{});
  CHECK(AggregationSpec::weighted_rounds(5) == AggregationSpec{});
  CHECK(AggregationSpec{}.weight_sum() == 3.0);
  for (const char* name : {"C1", "C1-2", "C1-5", "C1-5W", "C1-3W"}) {
    CHECK(AggregationSpec::named(name).name() == name);
  }
  CHECK_ERROR(AggregationSpec::named("D1"), ErrorCode::InvalidConfig);
  CHECK_ERROR(validate(AggregationSpec{{1, 2}, {1.0}}, 5), ErrorCode::InvalidConfig);
  CHECK_ERROR(validate(AggregationSpec{{1}, {0.0}}, 5), ErrorCode::InvalidConfig);
  CHECK_ERROR(validate(AggregationSpec{{6}, {1.0}}, 5), ErrorCode::InvalidConfig);
}

TEST_CASE("single observer run") {
  const std::vector<SessionLog> logs{log_with("a", "v", {round_with(250, {{10, 35}})})};
  const auto c = per_round_counts(logs, "v", 1);
  for (int f = 0; f < 250; ++f) CHECK(c[f] == (f >= 10 && f < 35 ? 1 : 0));
}

TEST_CASE("overlapping observers add") {
  const std::vector<SessionLog> logs{log_with("a", "v", {round_with(100, {{10, 30}})}),
                                     log_with("b", "v", {round_with(100, {{20, 40}})})};
  const auto c = per_round_counts(logs, "v", 1);
  CHECK(c[5] == 0);
  CHECK(c[15] == 1);
  CHECK(c[25] == 2);
  CHECK(c[35] == 1);
  CHECK(c[45] == 0);
}

TEST_CASE("inconsistent cohorts") {
  std::vector<SessionLog> logs{log_with("a", "v", {round_with(100, {})}),
                               log_with("b", "v", {round_with(90, {})})};
  CHECK_ERROR(per_round_counts(logs, "v", 1), ErrorCode::InconsistentCohort);
  logs[1] = log_with("b", "w", {round_with(100, {})});
  CHECK_ERROR(per_round_counts(logs, "v", 1), ErrorCode::InconsistentCohort);
  logs[1] = log_with("b", "v", {round_with(100, {})});
  CHECK_ERROR(per_round_counts(logs, "v", 2), ErrorCode::InconsistentCohort);
}

TEST_CASE("always clicked frame scores one with the decaying weights") {
  std::vector<session::RoundLog> rounds(5, round_with(250, {{40, 50}}));
  const std::vector<SessionLog> logs{log_with("a", "v", rounds)};
  const auto map = temporal_map(logs, "v", AggregationSpec{});
  std::vector<std::vector<int>> counts;
  for (int r = 1; r <= 5; ++r) counts.push_back(per_round_counts(logs, "v", r));
  CHECK(raw_scores(counts, AggregationSpec{})[45] == 3.0);
  CHECK(map.scores[45] == 1.0);
  CHECK(map.scores[39] == 0.0);
  CHECK(map.normalized);
  CHECK(map.n_observers == 1);
}

TEST_CASE("score one iff every observer clicked in every used round") {
  Rng rng(8);
  const session::ProtocolParams p;
  for (int trial = 0; trial < 20; ++trial) {
    auto logs = random_cohort(rng, 3, p);
    for (auto& log : logs) {
      for (auto& r : log.rounds) {
        for (int f = 0; f < 3; ++f) {
          r[f].deblurred = true;
          r[f].hold = 1;
        }
      }
    }
    for (const auto& spec : {AggregationSpec{}, AggregationSpec::named("C1-2"), AggregationSpec::weighted_rounds(3)}) {
      const auto map = temporal_map(logs, "vid", spec);
      for (int f = 0; f < 250; ++f) {
        bool all = true;
        for (const auto& log : logs) {
          for (int r : spec.rounds_used) all = all && log.rounds[r - 1][f].deblurred;
        }
        CHECK((map.scores[f] == 1.0) == all);
        CHECK(map.scores[f] >= 0.0);
        CHECK(map.scores[f] <= 1.0);
      }
    }
  }
}

TEST_CASE("unit weights reduce to the plain sum") {
  Rng rng(12);
  const auto logs = random_cohort(rng, 7, session::ProtocolParams{});
  std::vector<std::vector<int>> counts;
  for (int r = 1; r <= 3; ++r) counts.push_back(per_round_counts(logs, "vid", r));
  const auto raw = raw_scores(counts, AggregationSpec::first_rounds(3));
  for (int f = 0; f < 250; ++f) CHECK(raw[f] == counts[0][f] + counts[1][f] + counts[2][f]);
}

TEST_CASE("empty cohort") {
  CHECK_ERROR(combine_rounds({}, AggregationSpec::named("C1"), 0), ErrorCode::EmptyCohort);
}

TEST_CASE("counts and maps match brute force on random cohorts") {
  Rng rng(31337);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const auto logs = random_cohort(rng, n, session::ProtocolParams{});
    for (int r = 0; r < 5; ++r) CHECK(per_round_counts(logs, "vid", r + 1) == oracle::count_round(logs, r));
    const auto map = temporal_map(logs, "vid", AggregationSpec{});
    const double w[5] = {1.0, 0.8, 0.6, 0.4, 0.2};
    for (int f = 0; f < 250; ++f) {
      double raw = 0.0;
      for (int r = 0; r < 5; ++r) {
        for (const auto& log : logs) raw += w[r] * log.rounds[r][f].deblurred;
      }
      CHECK(map.scores[f] == doctest::Approx(raw / (3.0 * n)).epsilon(1e-12));
    }
  }
}

TEST_CASE("monotone in observers and invariant to their order") {
  Rng rng(5);
  auto logs = random_cohort(rng, 6, session::ProtocolParams{});
  const AggregationSpec spec;
  std::vector<std::vector<int>> before, after;
  for (int r = 1; r <= 5; ++r) before.push_back(per_round_counts(std::span(logs).first(5), "vid", r));
  for (int r = 1; r <= 5; ++r) after.push_back(per_round_counts(logs, "vid", r));
  const auto rb = raw_scores(before, spec), ra = raw_scores(after, spec);
  for (int f = 0; f < 250; ++f) CHECK(ra[f] >= rb[f]);
  const auto map = temporal_map(logs, "vid", spec);
  std::reverse(logs.begin(), logs.end());
  CHECK(temporal_map(logs, "vid", spec).scores == map.scores);
}
