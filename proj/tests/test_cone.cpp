#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "pm/cone.hpp"
#include "pm/grid_density.hpp"

using namespace pm;

namespace {

GridDensity sampled(int bins, const std::function<double(double)>& f) {
  GridDensity g(bins);
  for (int i = 0; i < bins; ++i) g[i] = f(g.midpoint(i));
  return g;
}

}  // namespace

TEST_CASE("cone geometry constant") {
  CHECK(cone_constant_a(1.0) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(cone_constant_a(0.5) ==
        doctest::Approx(3.5355339059327378).epsilon(1e-14));
  // Continuity toward the endpoints of the parameter range.
  CHECK(cone_constant_a(1e-12) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("flat density is inside every cone") {
  const GridDensity one(64, 1.0);
  for (double beta : {0.25, 0.5, 0.75}) {
    const ConeReport rep = cone_check(one, beta);
    CHECK(rep.pass());
    CHECK(rep.max_violation <= 0.0);  // flat: differences are exactly zero
    CHECK(rep.resolution == 64);
  }
}

TEST_CASE("increasing and signed functions fail") {
  const ConeReport inc = cone_check(sampled(64, [](double x) { return x; }), 0.5);
  CHECK_FALSE(inc.decreasing_ok);
  CHECK_FALSE(inc.pass());

  GridDensity neg(64, 1.0);
  neg[10] = -0.5;
  const ConeReport rep = cone_check(neg, 0.5);
  CHECK_FALSE(rep.positive_ok);
  CHECK_FALSE(rep.pass());
  CHECK(rep.max_violation >= 0.5 - 1e-12);
}

TEST_CASE("a singular profile passes the callable check") {
  // x^{-1/4} is decreasing, x^{5/4 - 1/4} = x is increasing, and the
  // pointwise bound holds with a wide margin at beta = 1/2.
  const auto f = [](double x) { return std::pow(x, -0.25); };
  const ConeReport rep = cone_check(f, 0.5, 512);
  CHECK(rep.pass());
  CHECK(rep.resolution == 512);
}

TEST_CASE("cone is convex along sampled segments") {
  const auto f = sampled(256, [](double x) { return std::pow(x, -0.2); });
  const auto g = sampled(256, [](double x) { return 2.0 * std::pow(x, -0.4); });
  REQUIRE(cone_check(f, 0.5).pass());
  REQUIRE(cone_check(g, 0.5).pass());
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    GridDensity mix(256);
    for (int i = 0; i < 256; ++i) mix[i] = t * f[i] + (1.0 - t) * g[i];
    CHECK(cone_check(mix, 0.5).pass());
  }
}

TEST_CASE("cone_check validates its inputs") {
  CHECK_THROWS_AS(cone_check(GridDensity(8, 1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cone_check(GridDensity(8, 1.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cone_check([](double) { return 1.0; }, 0.5, 1),
                  std::invalid_argument);
}

TEST_CASE("embedding offset matches the closed form at beta = 1/2") {
  const auto f = [](double x) { return 0.1 * std::sin(2.0 * std::numbers::pi * x); };
  const GridDensity flat(256, 1.0);
  const ConeEmbedding e = lip_cone_embed(f, 1.0, flat, 1.0, 0.5);

  // delta = 2 max{a/(beta+1), 4a/(a-1)} with a = 2.5 sqrt(2); the second
  // term wins and the whole thing collapses to (200 + 40 sqrt 2)/23.
  const long double al = 2.5L * std::sqrt(2.0L);
  const long double expect =
      2.0L * std::max(al / 1.5L, 4.0L * al / (al - 1.0L));
  CHECK(std::abs(e.delta - static_cast<double>(expect)) <=
        1e-12 * static_cast<double>(expect));
  CHECK(e.delta == doctest::Approx((200.0 + 40.0 * std::sqrt(2.0)) / 23.0)
                       .epsilon(1e-14));
  CHECK(e.lambda == -1.0);
  CHECK(e.nu == 6.0);
  CHECK(e.report.pass());
  CHECK(e.l1_ratio() > 0.0);
}

TEST_CASE("embedding bracket stays within [4A, 8A]") {
  std::mt19937_64 rng(7);
  const GridDensity flat(512, 1.0);
  for (double A : {0.5, 1.0, 5.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double amp = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const double k = 1.0 + static_cast<double>(rng() % 4);
      // Scale the raw wave so that sup + Lip <= A with a small margin.
      const double raw_budget = amp * (1.0 + 2.0 * std::numbers::pi * k);
      const double scale = 0.95 * A / raw_budget;
      const auto f = [=](double x) {
        return scale * amp * std::sin(2.0 * std::numbers::pi * k * x);
      };
      const ConeEmbedding e = lip_cone_embed(f, A, flat, 1.0, 0.5);
      CHECK(e.report.pass());
      for (int i = 0; i < flat.bins(); ++i) {
        const double x = flat.midpoint(i);
        const double g = f(x) + e.lambda * x + e.nu;
        CHECK(g >= 4.0 * A - 1e-9);
        CHECK(g <= 8.0 * A + 1e-9);
      }
    }
  }
}

TEST_CASE("embedding against a singular cone density") {
  GridDensity h = sampled(1024, [](double x) { return std::pow(x, -0.3); });
  h.normalize();
  REQUIRE(cone_check(h, 0.5).pass());
  const auto f = [](double x) { return 0.2 * std::cos(2.0 * std::numbers::pi * x); };
  const ConeEmbedding e = lip_cone_embed(f, 2.0, h, 1.0, 0.5);
  CHECK(e.report.pass());
  CHECK(e.l1_norm > 0.0);
}

TEST_CASE("degenerate budgets produce the zero embedding") {
  const GridDensity flat(64, 1.0);
  const ConeEmbedding e =
      lip_cone_embed([](double x) { return x; }, 0.0, flat, 1.0, 0.5);
  CHECK(e.degenerate);
  for (int i = 0; i < 64; ++i) CHECK(e.F[i] == 0.0);
}

TEST_CASE("embedding rejects budget violations") {
  const GridDensity flat(64, 1.0);
  // sup + Lip of 2x is 4, far over A = 1.
  CHECK_THROWS_AS(
      lip_cone_embed([](double x) { return 2.0 * x; }, 1.0, flat, 1.0, 0.5),
      std::invalid_argument);
  // h outside the cone.
  const auto rising = sampled(64, [](double x) { return x + 0.5; });
  CHECK_THROWS_AS(
      lip_cone_embed([](double) { return 0.1; }, 1.0, rising, 1.0, 0.5),
      std::invalid_argument);
  // mass budget exceeded.
  CHECK_THROWS_AS(
      lip_cone_embed([](double) { return 0.1; }, 1.0, flat, 0.5, 0.5),
      std::invalid_argument);
  CHECK_THROWS_AS(
      lip_cone_embed([](double) { return 0.1; }, -1.0, flat, 1.0, 0.5),
      std::invalid_argument);
}
