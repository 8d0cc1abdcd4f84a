#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "aderdg/analysis.hpp"
#include "aderdg/stability.hpp"

using namespace aderdg;
using C = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Halton sequence point for quasi-random sampling.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

}  // namespace

TEST_CASE("R(0) = 1 in both forms") {
  for (int deg : {0, 1, 3, 7}) {
    const auto t = build_tables<double>(deg);
    REQUIRE(std::abs(stability_R(t, C(0.0)) - C(1.0)) <= 1e-14);
    REQUIRE(std::abs(stability_R_det(t, C(0.0)) - C(1.0)) <= 1e-14);
  }
}

TEST_CASE("degree 0 reproduces the backward Euler stability function") {
  const auto t = build_tables<double>(0);
  REQUIRE(std::abs(stability_R(t, C(-1.0)) - C(0.5)) <= 1e-15);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int trial = 0; trial < 100; ++trial) {
    const C z(dist(rng), dist(rng));
    if (std::abs(z - C(1.0)) < 1e-3) continue;  // the pole
    const C expected = C(1.0) / (C(1.0) - z);
    REQUIRE(std::abs(stability_R(t, z) - expected) <= 1e-12 * std::abs(expected));
  }
}

TEST_CASE("|R| decays like 1/|z| far into the left half-plane") {
  const auto t = build_tables<double>(1);
  const double r = std::abs(stability_R(t, C(-1e6, 0.0)));
  REQUIRE(r <= 1e-5);
  // determinant-form oracle at the same point
  REQUIRE(std::abs(stability_R_det(t, C(-1e6, 0.0))) == Catch::Approx(r).epsilon(1e-9));
}

TEST_CASE("resolvent and determinant forms agree at random points") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int deg = 0; deg <= 8; ++deg) {
    const auto t = build_tables<double>(deg);
    int checked = 0;
    while (checked < 500) {
      const C z(dist(rng), dist(rng));
      if (std::abs(z) > 1e3) continue;
      const C a = stability_R(t, z);
      const C b = stability_R_det(t, z);
      REQUIRE(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
      ++checked;
    }
  }
}

TEST_CASE("decade ratios along the negative real axis fall tenfold") {
  const auto t = build_tables<double>(2);
  std::vector<std::pair<double, double>> pts;
  for (double r : {1e2, 1e4, 1e6}) pts.emplace_back(r, std::abs(stability_R_det(t, C(-r, 0.0))));
  REQUIRE(fit_order(pts) == Catch::Approx(-1.0).margin(0.05));
  REQUIRE(pts[2].second / pts[1].second == Catch::Approx(1e-2).epsilon(0.02));
}

TEST_CASE("conjugate symmetry of the stability function") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  for (int deg : {1, 4, 8}) {
    const auto t = build_tables<double>(deg);
    for (int trial = 0; trial < 50; ++trial) {
      const C z(dist(rng), dist(rng));
      const C a = stability_R(t, z);
      const C b = stability_R(t, std::conj(z));
      REQUIRE(std::abs(b - std::conj(a)) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("raster of the degree-1 region is stable left of the imaginary axis") {
  const auto t = build_tables<double>(1);
  const auto raster = raster_region(t, -5.0, 15.0, -10.0, 10.0, 200, 200);
  for (int j = 0; j < 200; ++j)
    for (int i = 0; i < 200; ++i)
      if (raster.re[i] < 0.0) {
        REQUIRE(raster.abs_R(j, i) < 1.0);
        REQUIRE(raster.stable(j, i) == 1);
      }
}

TEST_CASE("the imaginary axis bounds the stable region") {
  for (int deg : {0, 2, 5}) {
    const auto t = build_tables<double>(deg);
    for (int k = -50; k <= 50; ++k) {
      if (k == 0) continue;
      const double y = 0.2 * k;
      REQUIRE(std::abs(stability_R(t, C(0.0, y))) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("degree 0 is unstable exactly on the open disk around 1") {
  const auto t = build_tables<double>(0);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> dist(-3.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    const C z(dist(rng), dist(rng));
    const double dist_to_one = std::abs(z - C(1.0));
    if (std::abs(dist_to_one - 1.0) < 1e-6) continue;
    const double r = std::abs(stability_R(t, z));
    if (dist_to_one < 1.0) {
      REQUIRE(r > 1.0);
    } else {
      REQUIRE(r < 1.0);
    }
  }
}

TEST_CASE("ray profiles have the L-stability tail slope") {
  std::vector<double> radii;
  for (int k = 1; k <= 8; ++k) radii.push_back(std::pow(10.0, k));
  const auto t = build_tables<double>(8);
  const auto prof = ray_profile(t, kPi, radii);
  std::vector<std::pair<double, double>> tail;
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (radii[i] >= 1e5) tail.emplace_back(radii[i], prof[i]);
  const double slope = fit_order(tail);
  REQUIRE(slope == Catch::Approx(-1.0).margin(0.05));
}

TEST_CASE("ray profiles on conjugate rays coincide") {
  std::vector<double> radii;
  for (int k = 0; k < 30; ++k) radii.push_back(0.1 * std::pow(10.0, k / 6.0));
  const auto t = build_tables<double>(3);
  const auto a = ray_profile(t, 0.75 * kPi, radii);
  const auto b = ray_profile(t, 1.25 * kPi, radii);
  for (std::size_t i = 0; i < radii.size(); ++i)
    REQUIRE(a[i] == Catch::Approx(b[i]).margin(1e-12 + 1e-12 * a[i]));
}

TEST_CASE("the positive real axis contains unstable points") {
  const auto t = build_tables<double>(1);
  std::vector<double> radii;
  for (int k = 1; k <= 40; ++k) radii.push_back(0.25 * k);
  const auto prof = ray_profile(t, 2.0 * kPi, radii);
  bool unstable = false;
  for (double v : prof) unstable = unstable || v > 1.0;
  REQUIRE(unstable);
}

TEST_CASE("A-stability holds on quasi-random left half-plane samples") {
  for (int deg = 0; deg <= 8; ++deg) {
    const auto t = build_tables<double>(deg);
    double worst = 0;
    for (int i = 1; i <= 10000; ++i) {
      const double theta = kPi / 2 + kPi * halton(i, 2);
      // log-uniform radii down to 1e-3 stress the |R| -> 1 region near 0
      const double radius = 1e3 * std::pow(10.0, -6.0 * (1.0 - halton(i, 3)));
      const C z = std::polar(radius, theta);
      if (!(z.real() < 0.0)) continue;
      worst = std::max(worst, std::abs(stability_R(t, z)));
    }
    CAPTURE(deg);
    REQUIRE(worst <= 1.0 + 1e-9);
  }
}

TEST_CASE("R matches exp(z) to the design order near the origin") {
  for (int deg = 0; deg <= 4; ++deg) {
    const auto t = build_tables<double>(deg);
    const int expected = std::min(2 * deg + 2, 12);
    const C dir = std::polar(1.0, 0.75);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 40; ++i) {
      const double r = 1e-3 * std::pow(500.0, i / 39.0);
      const C z = r * dir;
      const double diff = std::abs(stability_R(t, z) - std::exp(z));
      if (diff >= 1e-13) pts.emplace_back(r, diff);
    }
    REQUIRE(pts.size() >= 3);
    const double slope = fit_order(pts);
    CAPTURE(deg, slope);
    REQUIRE(slope >= expected - 0.5);
    REQUIRE(slope <= expected + 1.5);
  }
}

TEST_CASE("evaluation at a pole raises a pole error") {
  const auto t = build_tables<double>(0);  // B = [1], pole at z = 1
  REQUIRE_THROWS_AS(stability_R(t, C(1.0)), PoleError);
  REQUIRE_THROWS_AS(stability_R_det(t, C(1.0)), PoleError);
}

TEST_CASE("raster records poles as infinity instead of failing") {
  const auto t = build_tables<double>(0);
  const auto raster = raster_region(t, 1.0, 1.0, 0.0, 0.0, 1, 1);
  REQUIRE(std::isinf(raster.abs_R(0, 0)));
}

TEST_CASE("evaluate_stability packages z, R and |R|") {
  const auto t = build_tables<double>(2);
  const auto e = evaluate_stability(t, C(-2.0, 1.0));
  REQUIRE(e.z == C(-2.0, 1.0));
  REQUIRE(e.abs_R == std::abs(e.R));
  REQUIRE(e.abs_R < 1.0);
}

TEST_CASE("ray_profile validates its radii") {
  const auto t = build_tables<double>(1);
  REQUIRE_THROWS_AS(ray_profile(t, kPi, {1.0, 0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(ray_profile(t, kPi, {-1.0}), std::invalid_argument);
}
