#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bohr/engine.hpp"
#include "bohr/rng.hpp"

using namespace bohr;

namespace {

const LqBall kDisc(1, QExponent(1.0));

TestBattery extremal_battery(int K) { return {{halfplane_extremal(1.0, K)}, kDisc, K, 0}; }

// (1/2)(1 + 2^p sum_{k=1}^K r^{pk})^{1/p}, the Bohr sum of the truncated extremal.
double extremal_sum(double p, double r, int K) {
  double s = 0.0;
  for (int k = 1; k <= K; ++k) s += std::pow(r, p * k);
  return 0.5 * std::pow(1.0 + std::pow(2.0, p) * s, 1.0 / p);
}

std::vector<double> random_point(SeededStream& rng, std::size_t n, double hi) {
  std::vector<double> r(n);
  for (double& v : r) v = rng.uniform(0.0, hi);
  return r;
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(BohrParams{0.5}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(PreparedMember(halfplane_extremal(1.0, 4), BohrParams{0.9}),
                  std::invalid_argument);
  const auto f = halfplane_extremal(1.0, 4);
  CHECK_THROWS_AS(bohr_sum_vector(f, {1.0}, std::vector<double>{-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(bohr_sum_vector(f, {1.0}, std::vector<double>{0.1, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(radius_solve(extremal_battery(4), {1.0}, kDisc, 0.0), std::invalid_argument);
}

TEST_CASE("Bohr sum is one half at the origin") {
  for (const char* qs : {"1", "2", "inf"}) {
    const LqBall ball(3, QExponent::parse(qs));
    for (double p : {1.0, 2.0, 3.5}) {
      const PreparedBattery b(default_battery(ball, 6, 4), {p});
      for (const auto& m : b.members) {
        CHECK(bohr_sum_vector(m, std::vector<double>(3, 0.0)).value == 0.5);
        CHECK(bohr_sum_domain(m, 0.0, ball).value == 0.5);
      }
    }
  }
}

TEST_CASE("one-dimensional Bohr sum of the extremal") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const int K = 25;
    const auto f = halfplane_extremal(1.0, K);
    for (double r : {0.1, 0.25, 0.4}) {
      const auto truncated = bohr_sum_vector(f, {p, TailPolicy::report_K}, std::vector<double>{r});
      CHECK_FALSE(truncated.tail_bounded);
      CHECK(truncated.value == doctest::Approx(extremal_sum(p, r, K)).epsilon(1e-13));
      // With the geometric tail the sum is the full series.
      const double rp = std::pow(r, p);
      const double full = 0.5 * std::pow(1.0 + std::pow(2.0, p) * rp / (1.0 - rp), 1.0 / p);
      const auto bounded = bohr_sum_vector(f, {p}, std::vector<double>{r});
      CHECK(bounded.tail_bounded);
      CHECK(bounded.value == doctest::Approx(full).epsilon(1e-12));
    }
  }
}

TEST_CASE("geometric tail is infinite on the boundary") {
  const auto f = halfplane_extremal(1.0, 8);
  CHECK(std::isinf(bohr_sum_vector(f, {1.0}, std::vector<double>{1.0}).value));
  CHECK(std::isfinite(bohr_sum_vector(f, {1.0, TailPolicy::report_K}, std::vector<double>{1.0}).value));
}

TEST_CASE("tail dominates the omitted coefficients") {
  SeededStream rng(17);
  for (const char* qs : {"1", "2", "inf"}) {
    const LqBall ball(2, QExponent::parse(qs));
    const auto small = default_battery(ball, 5, 7);
    const auto large = default_battery(ball, 14, 7);
    for (double p : {1.0, 2.0}) {
      for (std::size_t i = 0; i < small.size(); ++i) {
        if (!small.functions[i].tail) continue;
        for (int t = 0; t < 10; ++t) {
          const auto r = random_point(rng, 2, 0.3);
          const double bound = bohr_sum_vector(small.functions[i], {p}, r).value;
          const double longer =
              bohr_sum_vector(large.functions[i], {p, TailPolicy::report_K}, r).value;
          CHECK(bound >= longer * (1.0 - 1e-13));
        }
      }
    }
  }
}

TEST_CASE("polydisc domain sum is the corner sum") {
  const LqBall ball(3, QExponent::infinity());
  const auto b = default_battery(ball, 8, 2);
  for (const auto& f : b.functions) {
    const double r = 0.2;
    CHECK(bohr_sum_domain(f, {2.0}, r, ball).value ==
          bohr_sum_vector(f, {2.0}, std::vector<double>(3, r)).value);
  }
}

TEST_CASE("domain sum dominates every point of the sphere") {
  SeededStream rng(23);
  const LqBall ball(2, QExponent(2.0));
  const auto b = default_battery(ball, 8, 3);
  for (const auto& f : b.functions) {
    const double r = 0.3;
    const double sup = bohr_sum_domain(f, {1.0}, r, ball).value;
    for (int t = 0; t < 20; ++t) {
      const double a = rng.uniform(0.0, 1.5707963267948966);
      const std::vector<double> x{r * std::cos(a), r * std::sin(a)};
      CHECK(bohr_sum_vector(f, {1.0}, x).value <= sup * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("class sup is identical serial and parallel") {
  const LqBall ball(3, QExponent(2.0));
  const PreparedBattery b(default_battery(ball, 8, 5), {1.5});
  for (double r : {0.1, 0.3, 0.5}) {
    const auto par = class_sup(b, r, ball);
    const auto ser = class_sup_serial(b, r, ball);
    CHECK(par.value == ser.value);
    CHECK(par.argmax == ser.argmax);
  }
}

TEST_CASE("arithmetic estimate is identical serial and parallel") {
  const LqBall ball(2, QExponent(2.0));
  const auto b = default_battery(ball, 8, 5);
  ArithOptions serial;
  serial.exec = Execution::serial;
  const auto a = arith_bohr_estimate(b, {1.0}, serial);
  const auto c = arith_bohr_estimate(b, {1.0});
  CHECK(a.value == c.value);
  CHECK(a.r_vec == c.r_vec);
  CHECK(a.best_start == c.best_start);
}

TEST_CASE("one-dimensional radius matches the closed form") {
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    const double tol = 1e-9;
    const auto ri = radius_solve(extremal_battery(30), {p}, kDisc, tol);
    CHECK(ri.hi - ri.lo <= tol);
    CHECK(ri.contains(disc_radius(p), 1e-12));
    CHECK_FALSE(ri.unconstrained);
    CHECK(ri.tail_bounded);
    REQUIRE(ri.catalog.size() == 1);
    CHECK(ri.catalog[0].kind == BoundKind::exact);
  }
}

TEST_CASE("radius bracket brackets the crossing") {
  const LqBall ball(2, QExponent(2.0));
  const auto battery = default_battery(ball, 10, 9);
  const PreparedBattery b(battery, {1.0});
  const auto ri = radius_solve(battery, {1.0}, ball, 1e-6);
  CHECK(ri.lo <= ri.hi);
  CHECK(ri.hi - ri.lo <= 1e-6);
  CHECK(class_sup(b, ri.lo, ball).value <= 1.0);
  CHECK(class_sup(b, ri.hi, ball).value > 1.0);
  CHECK(ri.witness < battery.size());
}

TEST_CASE("radius scales with the ball") {
  const LqBall ball(2, QExponent(1.0));
  const auto a = radius_solve(default_battery(ball, 8, 1), {1.0}, ball, 1e-8);
  const auto b = radius_solve(default_battery(ball.scaled(2.0), 8, 1), {1.0}, ball.scaled(2.0), 1e-8);
  CHECK(b.midpoint() == doctest::Approx(2.0 * a.midpoint()).epsilon(1e-6));
  for (const auto& rec : b.catalog) CHECK(rec.note.find("scaled") != std::string::npos);
}

TEST_CASE("a battery that never crosses is flagged unconstrained") {
  // A single tiny linear member stays below 1 on the whole ball.
  const LqBall ball(2, QExponent(2.0));
  const TestBattery b{{cayley_linear({0.01, 0.0}, ball, 6)}, ball, 6, 0};
  const auto ri = radius_solve(b, {1.0}, ball, 1e-6);
  CHECK(ri.unconstrained);
  CHECK(ri.lo == ball.scale);
  CHECK(ri.hi == ball.scale);
}

TEST_CASE("radius catalog layout") {
  CHECK(radius_catalog(1.0, LqBall(1, QExponent(2.0)))[0].name == "disc_radius");
  const auto poly = radius_catalog(2.0, LqBall(3, QExponent::infinity()));
  REQUIRE(poly.size() == 3);
  CHECK(poly[0].kind == BoundKind::exact);
  const auto l1 = radius_catalog(1.0, LqBall(4, QExponent(1.0)));
  REQUIRE(l1.size() == 3);
  CHECK(l1[2].name == "l1_ball_radius");
  CHECK(l1[2].value == 1.0 / 3.0);
  CHECK(radius_catalog(1.5, LqBall(4, QExponent(2.0))).size() == 2);
}

TEST_CASE("arithmetic estimate in one dimension is the disc value") {
  for (double p : {1.0, 2.0}) {
    const auto e = arith_bohr_estimate(extremal_battery(30), {p});
    CHECK(e.value == doctest::Approx(disc_radius(p)).epsilon(1e-7));
  }
}

TEST_CASE("arithmetic estimate returns an admissible radius vector") {
  for (const char* qs : {"1", "2", "inf"}) {
    const LqBall ball(2, QExponent::parse(qs));
    const auto battery = default_battery(ball, 10, 11);
    const auto e = arith_bohr_estimate(battery, {1.0});
    REQUIRE(e.r_vec.size() == 2);
    CHECK(e.value == doctest::Approx(0.5 * (e.r_vec[0] + e.r_vec[1])).epsilon(1e-15));
    for (const auto& f : battery.functions) {
      CHECK(bohr_sum_vector(f, {1.0}, e.r_vec).value <= 1.0 + 1e-12);
    }
    CHECK(e.value >= arith_from_radius(radius_solve(battery, {1.0}, ball, 1e-6).lo, 2, ball.q) - 1e-5);
  }
}

TEST_CASE("radial limit sits on the admissibility boundary") {
  const LqBall ball(2, QExponent(2.0));
  const PreparedBattery b(default_battery(ball, 10, 2), {1.0});
  const std::vector<double> d{0.3, 0.7};
  const double t = radial_limit(b, d, 8.0);
  double worst = 0.0;
  for (const auto& m : b.members) {
    worst = std::max(worst, bohr_sum_vector(m, std::vector<double>{t * d[0], t * d[1]}).value);
  }
  CHECK(worst <= 1.0);
  CHECK(worst >= 1.0 - 1e-9);
  CHECK(radial_limit(b, d, 1e-3) == 1e-3);
}

TEST_CASE("inner gradient against central differences") {
  SeededStream rng(6);
  const LqBall ball(3, QExponent(2.0));
  for (double p : {1.0, 2.0}) {
    const PreparedBattery b(default_battery(ball, 8, 4), {p});
    for (const auto& m : b.members) {
      std::vector<double> rr = random_point(rng, 3, 0.25);
      for (double& v : rr) v += 0.02;
      std::vector<double> g(3);
      m.inner_gradient(rr, g);
      auto inner = [&](const std::vector<double>& x) {
        return m.truncated_sum(x) + m.tail(m.inner_majorant(x));
      };
      for (std::size_t i = 0; i < 3; ++i) {
        const double h = 1e-6;
        auto up = rr, dn = rr;
        up[i] += h;
        dn[i] -= h;
        const double fd = (inner(up) - inner(dn)) / (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-8));
      }
    }
  }
}

TEST_CASE("Bohr sum is monotone in each radius") {
  SeededStream rng(29);
  const LqBall ball(3, QExponent(1.0));
  for (double p : {1.0, 2.0}) {
    const PreparedBattery b(default_battery(ball, 8, 8), {p});
    for (int t = 0; t < 30; ++t) {
      const auto r = random_point(rng, 3, 0.3);
      for (const auto& m : b.members) {
        const double base = bohr_sum_vector(m, r).value;
        for (std::size_t i = 0; i < 3; ++i) {
          auto up = r;
          up[i] += rng.uniform(0.0, 0.05);
          CHECK(bohr_sum_vector(m, up).value >= base);
        }
      }
    }
  }
}

TEST_CASE("class sup is monotone in the scalar radius") {
  const LqBall ball(2, QExponent(2.0));
  const PreparedBattery b(default_battery(ball, 8, 8), {1.0});
  double prev = 0.0;
  for (int k = 0; k <= 12; ++k) {
    const double v = class_sup(b, 0.04 * k, ball).value;
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("estimates scale with the domain") {
  for (const char* qs : {"1", "inf"}) {
    const LqBall ball(2, QExponent::parse(qs));
    const double base = arith_bohr_estimate(default_battery(ball, 8, 1), {1.0}).value;
    for (double t : {0.5, 2.0}) {
      const double scaled = arith_bohr_estimate(default_battery(ball.scaled(t), 8, 1), {1.0}).value;
      CHECK(std::abs(scaled - t * base) <= 1e-6);
    }
  }
}

TEST_CASE("adding members never raises the estimates") {
  const LqBall ball(2, QExponent(2.0));
  const auto sub = random_battery(ball, 3, 8, 6);
  const auto full = default_battery(ball, 8, 6);
  CHECK(arith_bohr_estimate(full, {1.0}).value <= arith_bohr_estimate(sub, {1.0}).value + 1e-9);
  CHECK(radius_solve(full, {1.0}, ball, 1e-6).lo <= radius_solve(sub, {1.0}, ball, 1e-6).lo);
}

TEST_CASE("homogeneous scaling check") {
  for (double p : {1.0, 2.0}) {
    const auto b = extremal_battery(30);
    const auto blocks = homogeneous_blocks(b);
    CHECK(blocks.size() == 30);
    for (const auto& blk : blocks) CHECK(blk.term_count() == 1);
    const double s = max_homogeneous_scale(blocks, std::vector<double>{1.0}, p);
    // Each block 2 z^m needs (1/2) 2 s^m <= 1, so every block allows s = 1.
    CHECK(s == doctest::Approx(1.0));
    const auto rep = homogeneous_scaling_check(blocks, std::vector<double>{s}, {p}, b);
    CHECK(rep.accepted);
    CHECK(rep.passed);
    CHECK(rep.slack >= -1e-12);
    CHECK(rep.scaled_r[0] == doctest::Approx(s / std::pow(3.0, 1.0 / p)));

    const auto bad = homogeneous_scaling_check(blocks, std::vector<double>{1.5}, {p}, b);
    CHECK_FALSE(bad.accepted);
    CHECK_FALSE(bad.reason.empty());
  }
}

TEST_CASE("estimate kind names") {
  CHECK(to_string(EstimateKind::upper_estimate) == "upper_estimate");
  CHECK(to_string(EstimateKind::lower_certificate) == "lower_certificate");
}

TEST_CASE("arithmetic estimate with one axis member is unconstrained") {
  const LqBall ball(2, QExponent(2.0));
  const auto b = random_battery(ball, 1, 10, 0);
  const auto e = arith_bohr_estimate(b, {1.0});
  CHECK(e.unconstrained);
  const auto full = arith_bohr_estimate(default_battery(ball, 10, 0), {1.0});
  CHECK_FALSE(full.unconstrained);
  CHECK(std::isfinite(full.value));
}
