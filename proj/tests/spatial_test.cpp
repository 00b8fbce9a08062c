#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "oracles.hpp"
#include "tsal/simulate.hpp"
#include "tsal/spatial.hpp"

using namespace tsal;
using namespace tsal::spatial;

namespace {

SaliencyGrid random_grid(Rng& rng, int w, int h, int levels = 0) {
  SaliencyGrid g(w, h);
  for (double& v : g.values) v = levels > 0 ? static_cast<double>(rng.below(levels)) : rng.uniform();
  return g;
}

std::vector<Point> random_points(Rng& rng, int n, int w, int h) {
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {static_cast<double>(rng.below(w)), static_cast<double>(rng.below(h))};
  return pts;
}

double max_rel_diff(const SaliencyGrid& a, const SaliencyGrid& b) {
  double peak = 0.0, worst = 0.0;
  for (double v : b.values) peak = std::max(peak, std::abs(v));
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst / peak;
}

}  // namespace

TEST_CASE("fixations come from deblurred frames only") {
  const Resolution res{1280, 720};
  auto empty = testing::log_with("a", "v", {testing::round_with(100, {})});
  CHECK(fixations_from_log(empty, res).total() == 0);
  CHECK(fixations_from_log(empty, res).frames.size() == 100);

  auto held = testing::log_with("a", "v", {testing::round_with(100, {{30, 55}})});
  for (auto& e : held.rounds[0]) e.cursor_x = 400.0;
  const auto fx = fixations_from_log(held, res);
  CHECK(fx.total() == 25);
  for (int f = 30; f < 55; ++f) {
    REQUIRE(fx.frames[f].size() == 1);
    CHECK(fx.frames[f][0].x == 400.0);
    CHECK(fx.frames[f][0].y == 360.0);
  }
  held.rounds[0][40].cursor_x = -20.0;
  held.rounds[0][41].cursor_y = 5000.0;
  const auto clamped = fixations_from_log(held, res);
  CHECK(clamped.frames[40][0].x == 0.0);
  CHECK(clamped.frames[41][0].y == 719.0);
}

TEST_CASE("cohort fixation counts equal the deblurred counts") {
  Rng rng(3);
  const session::ProtocolParams p;
  std::vector<session::SessionLog> logs;
  for (int i = 0; i < 6; ++i) logs.push_back(session::replay(p, testing::random_events(p, rng), "o", "v"));
  const auto fx = fixations_from_cohort(logs, {1280, 720});
  std::vector<int> expected(250, 0);
  for (int r = 0; r < 5; ++r) {
    const auto c = oracle::count_round(logs, r);
    for (int f = 0; f < 250; ++f) expected[f] += c[f];
  }
  for (int f = 0; f < 250; ++f) CHECK(static_cast<int>(fx.frames[f].size()) == expected[f]);
}

TEST_CASE("single fixation density peaks at its location and decays radially") {
  const std::vector<Point> pts{{60.0, 40.0}};
  const SaliencyGrid g = density_frame(pts, 10.0, {120, 80});
  std::size_t argmax = std::max_element(g.values.begin(), g.values.end()) - g.values.begin();
  CHECK(argmax == 40 * 120 + 60);
  CHECK(std::count(g.values.begin(), g.values.end(), g.values[argmax]) == 1);
  for (int x = 60; x < 119; ++x) CHECK(g.at(x + 1, 40) < g.at(x, 40));
  for (int y = 40; y < 79; ++y) CHECK(g.at(60, y + 1) < g.at(60, y));
  CHECK(std::accumulate(g.values.begin(), g.values.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frames without fixations give zero maps") {
  const SaliencyGrid g = density_frame({}, 33.0, {64, 48});
  CHECK(std::all_of(g.values.begin(), g.values.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("two fixations match the dense Gaussian sum at full resolution") {
  const std::vector<Point> pts{{300.0, 200.0}, {900.5, 500.0}};
  const SaliencyGrid g = density_frame(pts, 33.0, {1280, 720});
  const SaliencyGrid o = oracle::density(pts, 33.0, 1280, 720, 1);
  CHECK(max_rel_diff(g, o) <= 1e-9);
}

TEST_CASE("downsampled maps match the dense sum on the grid") {
  Rng rng(5);
  const auto pts = random_points(rng, 7, 320, 180);
  const SaliencyGrid g = density_frame(pts, 12.0, {320, 180}, 4);
  const SaliencyGrid o = oracle::density(pts, 12.0, 320, 180, 4);
  CHECK(g.width == 80);
  CHECK(g.height == 45);
  CHECK(max_rel_diff(g, o) <= 1e-9);
}

TEST_CASE("unit sum on every frame with fixations") {
  Rng rng(6);
  FixationSet fx;
  for (int f = 0; f < 5; ++f) fx.frames.push_back(random_points(rng, f, 200, 120));
  const auto map = fixation_density_map(fx, 15.0, {200, 120});
  CHECK(map.normalization == Normalization::UnitSum);
  for (int f = 1; f < 5; ++f) {
    CHECK(std::accumulate(map.frames[f].values.begin(), map.frames[f].values.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("auc edge cases") {
  const SaliencyGrid flat(32, 32, 0.25);
  Rng rng(10);
  CHECK(auc_judd(flat, random_points(rng, 9, 32, 32)) == 0.5);
  SaliencyGrid g(8, 8);
  for (int i = 0; i < 64; ++i) g.values[i] = i;
  const std::vector<Point> top{{7, 7}, {6, 7}, {5, 7}};
  CHECK(auc_judd(g, top) == 1.0);
  CHECK(auc_judd(g, std::vector<Point>{{0, 0}}) == 0.5);
  CHECK(auc_judd(g, std::vector<Point>{{0, 0}, {7, 7}}) == 0.75);
  CHECK_ERROR(auc_judd(g, std::vector<Point>{}), ErrorCode::Undefined);
  std::vector<Point> all;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) all.push_back({double(x), double(y)});
  }
  CHECK_ERROR(auc_judd(g, all), ErrorCode::Undefined);
}

TEST_CASE("auc matches the threshold sweep oracle") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const SaliencyGrid g = random_grid(rng, 32, 32, i % 2 ? 8 : 0);
    const auto pts = random_points(rng, 1 + static_cast<int>(rng.below(40)), 32, 32);
    CHECK(std::abs(auc_judd(g, pts) - oracle::auc_judd(g, pts)) <= 1e-9);
  }
}

TEST_CASE("auc depends only on the order of map values") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const SaliencyGrid g = random_grid(rng, 20, 20);
    SaliencyGrid t = g;
    for (double& v : t.values) v = std::exp(3.0 * v) + 2.0;
    const auto pts = random_points(rng, 15, 20, 20);
    CHECK(auc_judd(t, pts) == auc_judd(g, pts));
  }
}

TEST_CASE("nss edge cases") {
  const SaliencyGrid flat(16, 16, 3.0);
  CHECK(nss(flat, std::vector<Point>{{3, 3}}) == 0.0);
  CHECK_ERROR(nss(flat, std::vector<Point>{}), ErrorCode::Undefined);
  SaliencyGrid two(2, 1);
  two.values = {0.0, 2.0};
  CHECK(nss(two, std::vector<Point>{{1, 0}, {1, 0}}) == 1.0);
}

TEST_CASE("nss matches the definition and is affine invariant") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const SaliencyGrid g = random_grid(rng, 24, 18);
    const auto pts = random_points(rng, 1 + static_cast<int>(rng.below(30)), 24, 18);
    const double v = nss(g, pts);
    CHECK(std::abs(v - oracle::nss(g, pts)) <= 1e-12);
    SaliencyGrid a = g;
    for (double& x : a.values) x = 4.5 * x + 7.0;
    CHECK(nss(a, pts) == doctest::Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("metric statistics over frames") {
  std::vector<std::optional<double>> same(6, 0.7);
  const auto s = per_frame_metric_stats(same);
  CHECK(s.mean == doctest::Approx(0.7));
  CHECK(s.std == 0.0);
  CHECK(s.n_frames == 6);
  std::vector<std::optional<double>> alt;
  for (int i = 0; i < 20; ++i) alt.push_back(i % 2);
  alt.push_back(std::nullopt);
  CHECK(per_frame_metric_stats(alt).mean == 0.5);
  CHECK(per_frame_metric_stats(alt).n_frames == 20);
  CHECK_ERROR(per_frame_metric_stats(std::vector<std::optional<double>>(3)), ErrorCode::NoData);

  Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::optional<double>> v;
    std::vector<double> defined;
    for (int i = 0; i < 40; ++i) {
      if (rng.bernoulli(0.2)) {
        v.emplace_back();
      } else {
        defined.push_back(rng.normal(1.0, 2.0));
        v.push_back(defined.back());
      }
    }
    oracle::Neumaier sum;
    for (double d : defined) sum.add(d);
    const double mean = sum.value() / defined.size();
    oracle::Neumaier ss;
    for (double d : defined) ss.add((d - mean) * (d - mean));
    const auto st = per_frame_metric_stats(v);
    CHECK(std::abs(st.mean - mean) <= 1e-12);
    CHECK(std::abs(st.std - std::sqrt(ss.value() / (defined.size() - 1))) <= 1e-12);
  }
}

TEST_CASE("bilinear upsampling") {
  SaliencyGrid g(2, 2);
  g.values = {0.0, 1.0, 2.0, 3.0};
  const SaliencyGrid full = upsample_bilinear(g, {4, 4}, 2);
  CHECK(full.width == 4);
  CHECK(full.at(0, 0) == 0.0);
  CHECK(full.at(3, 3) == 3.0);
  CHECK(full.at(1, 0) == doctest::Approx(0.25));
  CHECK(full.at(2, 0) == doctest::Approx(0.75));
  const SaliencyGrid same = upsample_bilinear(g, {2, 2}, 1);
  CHECK(same.values == g.values);
}

TEST_CASE("maps score well against their own fixations") {
  Rng rng(15);
  const Resolution res{1280, 720};
  FixationSet fx;
  for (int f = 0; f < 10; ++f) {
    std::vector<Point> pts;
    const Point c{200.0 + rng.uniform() * 880.0, 150.0 + rng.uniform() * 420.0};
    for (int i = 0; i < 12; ++i) pts.push_back({c.x + rng.normal(0, 20), c.y + rng.normal(0, 20)});
    fx.frames.push_back(pts);
  }
  fx.frames.emplace_back();
  const auto map = fixation_density_map(fx, 33.0, res);
  const auto scores = score_frames(map, fx);
  CHECK_FALSE(scores.back().auc.has_value());
  CHECK_FALSE(scores.back().nss.has_value());
  for (std::size_t f = 0; f + 1 < scores.size(); ++f) {
    CHECK(*scores[f].auc >= 0.9);
    CHECK(*scores[f].nss >= 1.0);
  }
}

TEST_CASE("uniform unit-sum map has zero NSS") {
  const SaliencyGrid g(1280, 720, 1.0 / (1280.0 * 720.0));
  const std::vector<Point> fix{{10, 10}, {640, 360}, {1279, 719}};
  CHECK(nss(g, fix) == 0.0);
  CHECK(auc_judd(g, fix) == 0.5);
}
