#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bohr/catalog.hpp"

using namespace bohr;

namespace {

// Root of (1/2)(1 + 2^p r^p / (1 - r^p)) = 1 on (0, 1), found by bisection on
// the majorant sum of the extremal in closed form.
double disc_oracle(double p) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double rp = std::pow(mid, p);
    const double sum = 1.0 + std::pow(2.0, p) * rp / (1.0 - rp);
    (sum <= std::pow(2.0, p) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("disc radius against an independent bisection") {
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, 7.5, 20.0, 100.0}) {
    CHECK(disc_radius(p) == doctest::Approx(disc_oracle(p)).epsilon(1e-13));
  }
  CHECK(disc_radius(1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(disc_radius(2.0) == doctest::Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-15));
  CHECK(std::isfinite(disc_radius(2000.0)));
  CHECK_THROWS_AS(disc_radius(0.0), std::invalid_argument);
}

TEST_CASE("disc radius increases with p") {
  double prev = 0.0;
  for (double p = 1.0; p <= 64.0; p *= 1.5) {
    const double h = disc_radius(p);
    CHECK(h > prev);
    CHECK(h < 1.0);
    prev = h;
  }
}

TEST_CASE("polydisc radius kinds") {
  const auto exact = polydisc_radius(3.0, 4);
  CHECK(exact.kind == BoundKind::exact);
  CHECK(exact.value == disc_radius(3.0));
  const auto shape = polydisc_radius(1.0, 10);
  CHECK(shape.kind == BoundKind::asymptotic);
  CHECK(shape.value == doctest::Approx(std::sqrt(std::log(10.0) / 10.0)));
  CHECK_THROWS_AS(polydisc_radius(2.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(polydisc_radius(0.5, 3), std::invalid_argument);
}

TEST_CASE("bounded class bounds") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (const char* qs : {"1", "1.5", "2", "4", "inf"}) {
      const auto q = QExponent::parse(qs);
      const auto b = bounded_radius_bounds(n, q);
      CHECK(b.lower.kind == BoundKind::lower);
      CHECK(b.upper.kind == BoundKind::upper);
      CHECK(b.lower.value > 0.0);
      CHECK_FALSE(b.log_lower.has_value());
    }
  }
  const double cube_root_e = std::cbrt(std::exp(1.0));
  CHECK(bounded_radius_bounds(5, QExponent(1.0)).lower.value ==
        doctest::Approx(1.0 / (3.0 * cube_root_e)));
  CHECK(bounded_radius_bounds(4, QExponent::infinity()).lower.value == doctest::Approx(1.0 / 6.0));

  // log log n > 0 needs n >= 3.
  CHECK_FALSE(bounded_radius_bounds(2, QExponent(2.0), 1.0).log_lower.has_value());
  const auto with_c = bounded_radius_bounds(100, QExponent(2.0), 2.0);
  REQUIRE(with_c.log_lower.has_value());
  const double ln = std::log(100.0);
  CHECK(with_c.log_lower->value == doctest::Approx(std::sqrt(ln / std::log(ln) / 100.0) / 2.0));
  CHECK_THROWS_AS(bounded_radius_bounds(100, QExponent(2.0), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(bounded_radius_bounds(1, QExponent(2.0)), std::invalid_argument);
}

TEST_CASE("radius bounds pinch at p = q = 1") {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto b = radius_ball_bounds(1.0, QExponent(1.0), n);
    CHECK(b.lower.value == 1.0 / 3.0);
    CHECK(b.upper.value == 1.0 / 3.0);
  }
}

TEST_CASE("radius bounds at p = 1, q = 2, n = 4") {
  const auto b = radius_ball_bounds(1.0, QExponent(2.0), 4);
  CHECK(b.lower.value == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(b.upper.value == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-15));
  CHECK(b.upper.note.find("typo_flag") != std::string::npos);
}

TEST_CASE("sandwich bounds are ordered on the grid") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (double qv : {1.0, 2.0, 4.0}) {
      for (std::size_t n = 1; n <= 6; ++n) {
        const QExponent q(qv);
        for (const auto& b : {arith_ball_bounds(p, q, n), radius_ball_bounds(p, q, n),
                              arith_polydisc_bounds(p, n)}) {
          CHECK(b.lower.value <= b.upper.value * (1.0 + 1e-12));
          CHECK(b.lower.kind == BoundKind::lower);
          CHECK(b.upper.kind == BoundKind::upper);
        }
      }
    }
  }
}

TEST_CASE("one-dimensional bounds collapse to the disc value") {
  for (double p : {1.0, 2.5}) {
    for (double qv : {1.0, 3.0}) {
      const auto a = arith_ball_bounds(p, QExponent(qv), 1);
      CHECK(a.lower.value == disc_radius(p));
      CHECK(a.upper.value == doctest::Approx(std::pow(disc_radius(p), 1.0 / qv)));
    }
    const auto d = arith_polydisc_bounds(p, 1);
    CHECK(d.lower.value == d.upper.value);
  }
}

TEST_CASE("arith from radius") {
  CHECK(arith_from_radius(0.6, 4, QExponent(2.0)) == doctest::Approx(0.3));
  CHECK(arith_from_radius(0.6, 4, QExponent::infinity()) == 0.6);
  CHECK(arith_from_radius(0.6, 3, QExponent(1.0)) == doctest::Approx(0.2));
}

TEST_CASE("finite-q formulas reject the polydisc") {
  CHECK_THROWS_AS(arith_ball_bounds(1.0, QExponent::infinity(), 2), std::invalid_argument);
  CHECK_THROWS_AS(radius_ball_bounds(1.0, QExponent::infinity(), 2), std::invalid_argument);
  CHECK_THROWS_AS(arith_ball_bounds(0.9, QExponent(1.0), 2), std::invalid_argument);
  CHECK_THROWS_AS(arith_polydisc_bounds(1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(radius_ball_bounds(std::numeric_limits<double>::infinity(), QExponent(1.0), 2),
                  std::invalid_argument);
}

TEST_CASE("record serialization") {
  const auto r = radius_ball_bounds(2.0, QExponent(2.0), 3).upper;
  const auto j = to_json(r);
  CHECK(j.at("name") == "radius_ball_upper");
  CHECK(j.at("kind") == "upper");
  CHECK(j.at("value").get<double>() == r.value);
  CHECK(j.contains("validity"));
  CHECK(j.contains("source"));
  CHECK(to_string(BoundKind::asymptotic) == "asymptotic");
}

TEST_CASE("radius bounds are the arithmetic bounds times n^(1/q)") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    for (double qv : {1.0, 2.0, 4.0, 2.5}) {
      for (std::size_t n = 1; n <= 8; ++n) {
        const QExponent q(qv);
        const double f = std::pow(double(n), 1.0 / qv);
        const auto a = arith_ball_bounds(p, q, n);
        const auto r = radius_ball_bounds(p, q, n);
        CHECK(r.lower.value == doctest::Approx(a.lower.value * f).epsilon(1e-14));
        CHECK(r.upper.value == doctest::Approx(a.upper.value * f).epsilon(1e-14));
        CHECK(arith_from_radius(r.lower.value, n, q) == doctest::Approx(a.lower.value).epsilon(1e-14));
      }
    }
  }
}
