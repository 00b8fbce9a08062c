#include "tsal/consistency.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

#include "tsal/error.hpp"
#include "tsal/parallel.hpp"
#include "tsal/random.hpp"

namespace tsal::consistency {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::InvalidConfig, "pearson needs two vectors of equal length >= 2");
  }
  const double n = static_cast<double>(a.size());
  const double mean_a = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) {
    throw Error(ErrorCode::DegenerateVector, "correlation undefined for a constant vector");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double kolmogorov_survival(double lambda) {
  constexpr double kTolerance = 1e-10;
  constexpr double pi = std::numbers::pi;
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed form, fast for small lambda:
    // P(K <= l) = sqrt(2 pi) / l * sum_k exp(-(2k-1)^2 pi^2 / (8 l^2)).
    double sum = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
      sum += term;
      if (term < kTolerance) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < kTolerance) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw Error(ErrorCode::EmptySample, "KS test needs two non-empty samples");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xs.size() && j < ys.size()) {
    const double t = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == t) ++i;
    while (j < ys.size() && ys[j] == t) ++j;
    d = std::max(d, std::abs(i / n - j / m));
  }
  const double effective = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_survival(effective * d)};
}

namespace {

bool log_less(const session::SessionLog& a, const session::SessionLog& b) {
  auto event_key = [](const session::FrameEvent& e) {
    return std::tuple(e.frame_index, e.cursor_x, e.cursor_y, e.deblurred, e.hold);
  };
  if (a.observer_id != b.observer_id) return a.observer_id < b.observer_id;
  return std::lexicographical_compare(
      a.rounds.begin(), a.rounds.end(), b.rounds.begin(), b.rounds.end(),
      [&](const session::RoundLog& ra, const session::RoundLog& rb) {
        return std::lexicographical_compare(
            ra.begin(), ra.end(), rb.begin(), rb.end(),
            [&](const auto& ea, const auto& eb) { return event_key(ea) < event_key(eb); });
      });
}

std::vector<std::vector<int>> group_counts(
    const std::vector<std::vector<std::vector<int>>>& per_observer,
    std::span<const std::size_t> members) {
  const auto& first = per_observer[members.front()];
  std::vector<std::vector<int>> sum(first.size(), std::vector<int>(first.front().size(), 0));
  for (std::size_t idx : members) {
    for (std::size_t r = 0; r < sum.size(); ++r) {
      for (std::size_t f = 0; f < sum[r].size(); ++f) sum[r][f] += per_observer[idx][r][f];
    }
  }
  return sum;
}

std::vector<double> pooled_frame_indices(const std::vector<std::vector<int>>& counts) {
  std::vector<double> sample;
  for (const auto& round : counts) {
    for (std::size_t f = 0; f < round.size(); ++f) {
      sample.insert(sample.end(), static_cast<std::size_t>(round[f]), static_cast<double>(f));
    }
  }
  std::sort(sample.begin(), sample.end());
  return sample;
}

}  // namespace

std::vector<std::size_t> canonical_order(aggregate::Cohort logs) {
  std::vector<std::size_t> order(logs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return log_less(logs[a], logs[b]); });
  return order;
}

Split draw_split(std::span<const std::size_t> canonical, int group_size, std::uint64_t seed,
                 int split_index) {
  std::vector<std::size_t> shuffled(canonical.begin(), canonical.end());
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(split_index)));
  rng.shuffle(std::span<std::size_t>(shuffled));
  Split split;
  split.group_a.assign(shuffled.begin(), shuffled.begin() + group_size);
  split.group_b.assign(shuffled.begin() + group_size, shuffled.begin() + 2 * group_size);
  return split;
}

ConsistencyReport split_consistency(aggregate::Cohort logs, const std::string& video_id,
                                    const aggregate::AggregationSpec& spec, int group_size,
                                    int n_splits, std::uint64_t seed) {
  if (group_size < 1 || n_splits < 1) {
    throw Error(ErrorCode::InvalidConfig, "group size and split count must be positive");
  }
  if (logs.size() < 2 * static_cast<std::size_t>(group_size)) {
    throw Error(ErrorCode::InsufficientCohort,
                fmt::format("split-half analysis with groups of {} needs at least {} observers, got {}",
                            group_size, 2 * group_size, logs.size()));
  }
  int max_round = 0;
  for (const auto& log : logs) max_round = std::max<int>(max_round, log.rounds.size());
  aggregate::validate(spec, max_round);

  // per_observer[i][k] = C_{rounds_used[k]} of observer i alone.
  std::vector<std::vector<std::vector<int>>> per_observer(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    for (int round : spec.rounds_used) {
      per_observer[i].push_back(aggregate::per_round_counts(logs.subspan(i, 1), video_id, round));
    }
  }
  const std::vector<std::size_t> canonical = canonical_order(logs);

  struct SplitOutcome {
    double pcc = 0.0;
    bool pcc_degenerate = false;
    double ks_p = 0.0;
    bool ks_degenerate = false;
  };
  std::vector<SplitOutcome> outcomes(n_splits);
  parallel_for(static_cast<std::size_t>(n_splits), [&](std::size_t s) {
    const Split split = draw_split(canonical, group_size, seed, static_cast<int>(s));
    const auto counts_a = group_counts(per_observer, split.group_a);
    const auto counts_b = group_counts(per_observer, split.group_b);
    const auto map_a = aggregate::combine_rounds(counts_a, spec, group_size);
    const auto map_b = aggregate::combine_rounds(counts_b, spec, group_size);
    SplitOutcome& out = outcomes[s];
    try {
      out.pcc = pearson(map_a.scores, map_b.scores);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateVector) throw;
      out.pcc = 0.0;
      out.pcc_degenerate = true;
    }
    const auto sample_a = pooled_frame_indices(counts_a);
    const auto sample_b = pooled_frame_indices(counts_b);
    if (sample_a.empty() || sample_b.empty()) {
      out.ks_degenerate = true;
      out.ks_p = (sample_a.empty() && sample_b.empty()) ? 1.0 : 0.0;
    } else {
      out.ks_p = ks_two_sample(sample_a, sample_b).p_value;
    }
  });

  ConsistencyReport report;
  report.video_id = video_id;
  report.spec = spec;
  report.group_size = group_size;
  report.n_splits = n_splits;
  report.seed = seed;
  double pcc_sum = 0.0, ks_sum = 0.0;
  for (const SplitOutcome& o : outcomes) {
    report.pcc_per_split.push_back(o.pcc);
    report.ks_p_per_split.push_back(o.ks_p);
    pcc_sum += o.pcc;
    ks_sum += o.ks_p;
    report.degenerate_pcc_splits += o.pcc_degenerate;
    report.degenerate_ks_splits += o.ks_degenerate;
  }
  report.pcc_mean = pcc_sum / n_splits;
  report.ks_p_mean = ks_sum / n_splits;
  if (n_splits > 1) {
    double ss = 0.0;
    for (double v : report.pcc_per_split) ss += (v - report.pcc_mean) * (v - report.pcc_mean);
    report.pcc_std = std::sqrt(ss / (n_splits - 1));
  }
  return report;
}

}  // namespace tsal::consistency
