#include "tsal/aggregate.hpp"

#include <fmt/format.h>

#include <cmath>
#include <regex>

#include "tsal/error.hpp"

namespace tsal::aggregate {

AggregationSpec AggregationSpec::first_rounds(int n) {
  if (n <= 0) throw Error(ErrorCode::InvalidConfig, "round count must be positive");
  AggregationSpec spec;
  spec.rounds_used.clear();
  spec.weights.clear();
  for (int r = 1; r <= n; ++r) {
    spec.rounds_used.push_back(r);
    spec.weights.push_back(1.0);
  }
  return spec;
}

AggregationSpec AggregationSpec::weighted_rounds(int n) {
  AggregationSpec spec = first_rounds(n);
  for (int i = 0; i < n; ++i) spec.weights[i] = static_cast<double>(n - i) / n;
  return spec;
}

AggregationSpec AggregationSpec::named(const std::string& name) {
  static const std::regex pattern(R"(^[Cc]1(?:-([0-9]+))?([Ww]?)$)");
  std::smatch m;
  if (!std::regex_match(name, m, pattern)) {
    throw Error(ErrorCode::InvalidConfig, "unknown aggregation spec '" + name + "'");
  }
  const int n = m[1].matched ? std::stoi(m[1].str()) : 1;
  return m[2].length() > 0 ? weighted_rounds(n) : first_rounds(n);
}

std::string AggregationSpec::name() const {
  const int n = static_cast<int>(rounds_used.size());
  bool prefix = true;
  for (int i = 0; i < n; ++i) prefix = prefix && rounds_used[i] == i + 1;
  if (prefix && n > 0) {
    if (*this == first_rounds(n)) return n == 1 ? "C1" : fmt::format("C1-{}", n);
    if (*this == weighted_rounds(n)) return fmt::format("C1-{}W", n);
  }
  std::string out = "custom[";
  for (int i = 0; i < n; ++i) {
    out += fmt::format("{}{}:{}", i ? "," : "", rounds_used[i], weights[i]);
  }
  return out + "]";
}

double AggregationSpec::weight_sum() const {
  double sum = 0.0;
  for (double w : weights) sum += w;
  return sum;
}

void validate(const AggregationSpec& spec, int max_round) {
  if (spec.rounds_used.empty()) throw Error(ErrorCode::InvalidConfig, "no rounds selected");
  if (spec.rounds_used.size() != spec.weights.size()) {
    throw Error(ErrorCode::InvalidConfig, "weights must align with rounds");
  }
  for (std::size_t i = 0; i < spec.rounds_used.size(); ++i) {
    if (spec.rounds_used[i] < 1 || spec.rounds_used[i] > max_round) {
      throw Error(ErrorCode::InvalidConfig,
                  fmt::format("round {} outside 1..{}", spec.rounds_used[i], max_round));
    }
    if (!(spec.weights[i] > 0.0) || !std::isfinite(spec.weights[i])) {
      throw Error(ErrorCode::InvalidConfig, "weights must be positive");
    }
  }
}

std::vector<int> per_round_counts(Cohort logs, const std::string& video_id, int round_number) {
  if (logs.empty()) return {};
  const std::size_t r = static_cast<std::size_t>(round_number - 1);
  std::size_t duration = 0;
  bool have_duration = false;
  for (const auto& log : logs) {
    if (log.video_id != video_id) {
      throw Error(ErrorCode::InconsistentCohort,
                  fmt::format("log of '{}' is for video '{}', expected '{}'", log.observer_id,
                              log.video_id, video_id));
    }
    if (round_number < 1 || r >= log.rounds.size()) {
      throw Error(ErrorCode::InconsistentCohort,
                  fmt::format("log of '{}' has no round {}", log.observer_id, round_number));
    }
    for (const auto& round : log.rounds) {
      if (!have_duration) {
        duration = round.size();
        have_duration = true;
      } else if (round.size() != duration) {
        throw Error(ErrorCode::InconsistentCohort,
                    fmt::format("log of '{}' has {} frames in a round, expected {}",
                                log.observer_id, round.size(), duration));
      }
    }
  }
  std::vector<int> counts(duration, 0);
  for (const auto& log : logs) {
    for (const auto& e : log.rounds[r]) {
      if (e.deblurred && e.frame_index >= 0 && static_cast<std::size_t>(e.frame_index) < duration) {
        ++counts[e.frame_index];
      }
    }
  }
  return counts;
}

std::vector<double> raw_scores(std::span<const std::vector<int>> counts,
                               const AggregationSpec& spec) {
  if (counts.size() != spec.weights.size()) {
    throw Error(ErrorCode::InvalidConfig, "counts must align with the aggregation spec");
  }
  if (counts.empty()) return {};
  const std::size_t duration = counts.front().size();
  std::vector<double> raw(duration, 0.0);
  for (std::size_t n = 0; n < counts.size(); ++n) {
    if (counts[n].size() != duration) {
      throw Error(ErrorCode::InconsistentCohort, "per-round counts differ in length");
    }
    for (std::size_t f = 0; f < duration; ++f) raw[f] += spec.weights[n] * counts[n][f];
  }
  return raw;
}

TemporalSaliencyMap combine_rounds(std::span<const std::vector<int>> counts,
                                   const AggregationSpec& spec, int n_observers) {
  if (n_observers <= 0) throw Error(ErrorCode::EmptyCohort, "no observers to aggregate");
  TemporalSaliencyMap map;
  map.scores = raw_scores(counts, spec);
  map.n_observers = n_observers;
  map.spec = spec;
  map.normalized = true;
  // Accumulated in the same order as raw_scores so a frame deblurred by every
  // observer in every used round lands on exactly 1.0.
  double max_attainable = 0.0;
  for (double w : spec.weights) max_attainable += w * n_observers;
  for (double& s : map.scores) s /= max_attainable;
  return map;
}

TemporalSaliencyMap temporal_map(Cohort logs, const std::string& video_id,
                                 const AggregationSpec& spec) {
  if (logs.empty()) throw Error(ErrorCode::EmptyCohort, "no logs for video '" + video_id + "'");
  std::vector<std::vector<int>> counts;
  counts.reserve(spec.rounds_used.size());
  for (int round : spec.rounds_used) counts.push_back(per_round_counts(logs, video_id, round));
  TemporalSaliencyMap map = combine_rounds(counts, spec, static_cast<int>(logs.size()));
  map.video_id = video_id;
  return map;
}

}  // namespace tsal::aggregate
