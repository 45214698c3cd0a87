#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pm/map.hpp"

using namespace pm;

namespace {

// Independent root finder for the left branch: plain bisection on
// x (1 + (2x)^alpha) = y, no shared code with branch_inverse.
double bisect_left(double alpha, double y) {
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = mid * (1.0 + std::pow(2.0 * mid, alpha));
    (val < y ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("map parameter validates its range") {
  CHECK_THROWS_AS(MapParameter(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MapParameter(1.0), std::invalid_argument);
  CHECK_THROWS_AS(MapParameter(-0.3), std::invalid_argument);
  CHECK(MapParameter(0.5).alpha() == 0.5);
}

TEST_CASE("apply matches hand-computed values at alpha = 1/2") {
  const MapParameter p(0.5);
  CHECK(apply(p, 0.0) == 0.0);
  CHECK(apply(p, 1.0) == 1.0);
  CHECK(apply(p, 0.5) == 0.0);   // x = 1/2 belongs to the right branch
  CHECK(apply(p, 0.75) == 0.5);
  CHECK(apply(p, 0.25) == doctest::Approx(0.4267766952966369).epsilon(1e-14));
}

TEST_CASE("derivative matches hand-computed values") {
  const MapParameter p(0.5);
  CHECK(derivative(p, 0.0) == 1.0);
  CHECK(derivative(p, 0.5) == 2.0);
  CHECK(derivative(p, 0.9) == 2.0);
  CHECK(derivative(p, 0.25) ==
        doctest::Approx(2.0606601717798213).epsilon(1e-14));
}

TEST_CASE("domain violations throw") {
  const MapParameter p(0.3);
  CHECK_THROWS_AS(apply(p, -0.1), std::domain_error);
  CHECK_THROWS_AS(apply(p, 1.1), std::domain_error);
  CHECK_THROWS_AS(apply(p, std::nan("")), std::domain_error);
  CHECK_THROWS_AS(derivative(p, 2.0), std::domain_error);
  CHECK_THROWS_AS(branch_inverse(p, Branch::left, -0.5), std::domain_error);
}

TEST_CASE("sqrt fast paths agree with pow") {
  for (double alpha : {0.25, 0.5, 0.75}) {
    for (int i = 1; i <= 200; ++i) {
      const double x = i / 400.0;  // left branch only
      const double fast = detail::pow_2x(alpha, x);
      const double ref = std::pow(2.0 * x, alpha);
      CHECK(fast == doctest::Approx(ref).epsilon(1e-14));
    }
  }
}

TEST_CASE("map is expanding away from the origin and monotone") {
  for (double alpha : {0.2, 0.5, 0.8}) {
    const MapParameter p(alpha);
    double prev_left = 0.0;
    double prev_d = 0.0;
    for (int i = 0; i < 1000; ++i) {  // strictly inside the left branch
      const double x = 0.5 * i / 1000.0;
      const double d = derivative(p, x);
      CHECK(d >= 1.0);
      if (x > 0.0) {
        CHECK(d > 1.0);
        CHECK(apply(p, x) > prev_left);  // left branch strictly increasing
        CHECK(d >= prev_d);              // convexity: derivative increasing
      }
      prev_left = apply(p, x);
      prev_d = d;
    }
  }
}

TEST_CASE("branch inverses invert their branches") {
  std::mt19937_64 rng(20240901);
  for (double alpha : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const MapParameter p(alpha);
    for (int i = 0; i < 10000; ++i) {
      const double y =
          static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const double xl = branch_inverse(p, Branch::left, y);
      CHECK(xl >= 0.0);
      CHECK(xl <= 0.5);
      CHECK(std::abs(apply(p, xl) - y) <= 1e-12);
      const double xr = branch_inverse(p, Branch::right, y);
      CHECK(xr == 0.5 * (y + 1.0));
    }
    CHECK(branch_inverse(p, Branch::left, 0.0) == 0.0);
    CHECK(branch_inverse(p, Branch::left, 1.0) == 0.5);
    CHECK(branch_inverse(p, Branch::right, 0.5) == 0.75);
  }
}

TEST_CASE("branch inverse agrees with an independent bisection") {
  for (double alpha : {0.2, 0.5, 0.8}) {
    const MapParameter p(alpha);
    for (double y : {0.05, 0.3, 0.5, 0.77, 0.99}) {
      const double newton = branch_inverse(p, Branch::left, y);
      const double ref = bisect_left(alpha, y);
      CHECK(newton == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("admissible sequences enforce the parameter cap") {
  CHECK_THROWS_AS(AdmissibleSequence::constant(0.9, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdmissibleSequence::explicit_list({0.2, 0.6}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdmissibleSequence::explicit_list({}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(AdmissibleSequence::constant(0.5, 1.0),
                  std::invalid_argument);

  const auto seq = AdmissibleSequence::explicit_list({0.2, 0.3, 0.4}, 0.5);
  CHECK(seq.beta_star() == 0.5);
  REQUIRE(seq.length().has_value());
  CHECK(*seq.length() == 3);
  CHECK(seq.at(1).alpha() == 0.2);
  CHECK(seq.at(3).alpha() == 0.4);
  CHECK_THROWS_AS(seq.at(0), std::out_of_range);
  CHECK_THROWS_AS(seq.at(4), std::out_of_range);

  const auto cyc = AdmissibleSequence::cycle({0.2, 0.4}, 0.5);
  CHECK_FALSE(cyc.length().has_value());
  CHECK(cyc.at(1).alpha() == 0.2);
  CHECK(cyc.at(2).alpha() == 0.4);
  CHECK(cyc.at(3).alpha() == 0.2);
  CHECK(cyc.at(1001).alpha() == 0.2);

  const auto cst = AdmissibleSequence::constant(0.5);
  CHECK(cst.beta_star() == 0.5);
  CHECK(cst.at(77).alpha() == 0.5);
}

TEST_CASE("iterate reproduces the hand-computed orbit of 0.3") {
  const auto seq = AdmissibleSequence::constant(0.5);
  const Orbit o = iterate(seq, 0.3, 2);
  REQUIRE(o.points.size() == 3);
  CHECK(o.points[0] == 0.3);
  CHECK(o.points[1] == doctest::Approx(0.5323790007724450).epsilon(1e-14));
  CHECK(o.points[2] == doctest::Approx(0.0647580015448900).epsilon(1e-12));
}

TEST_CASE("iterate respects sequence length and domain") {
  const auto fin = AdmissibleSequence::explicit_list({0.3, 0.3}, 0.5);
  CHECK(iterate(fin, 0.2, 2).points.size() == 3);
  CHECK_THROWS_AS(iterate(fin, 0.2, 3), std::out_of_range);
  CHECK_THROWS_AS(iterate(fin, 1.5, 1), std::domain_error);

  // A time-dependent composition applies map k at step k.
  const auto mix = AdmissibleSequence::explicit_list({0.2, 0.4}, 0.5);
  const Orbit o = iterate(mix, 0.3, 2);
  const double x1 = apply(MapParameter(0.2), 0.3);
  CHECK(o.points[1] == x1);
  CHECK(o.points[2] == apply(MapParameter(0.4), x1));
}
