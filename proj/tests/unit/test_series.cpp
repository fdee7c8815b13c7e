#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "bohr/rng.hpp"
#include "bohr/series.hpp"

using bohr::MultiIndex;
using bohr::SeededStream;
using bohr::TruncatedSeries;
using Complex = std::complex<double>;

namespace {

// Dense coefficient cube of side K+1, index sum_i alpha_i (K+1)^i.
struct Dense {
  std::size_t n;
  int K;
  std::vector<Complex> c;

  Dense(std::size_t n_, int K_) : n(n_), K(K_), c(static_cast<std::size_t>(std::pow(K_ + 1, n_))) {}

  std::vector<int> index_of(std::size_t flat) const {
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(flat % static_cast<std::size_t>(K + 1));
      flat /= static_cast<std::size_t>(K + 1);
    }
    return a;
  }

  std::size_t flat_of(const std::vector<int>& a) const {
    std::size_t f = 0;
    for (std::size_t i = n; i-- > 0;) f = f * static_cast<std::size_t>(K + 1) + static_cast<std::size_t>(a[i]);
    return f;
  }
};

int total(const std::vector<int>& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

Dense to_dense(const TruncatedSeries& s) {
  Dense d(s.dim(), s.degree());
  for (const auto& [alpha, c] : s.terms()) {
    d.c[d.flat_of(std::vector<int>(alpha.exponents().begin(), alpha.exponents().end()))] = c;
  }
  return d;
}

Dense dense_product(const Dense& a, const Dense& b) {
  Dense out(a.n, a.K);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (a.c[i] == Complex{}) continue;
    const auto ai = a.index_of(i);
    for (std::size_t j = 0; j < b.c.size(); ++j) {
      if (b.c[j] == Complex{}) continue;
      const auto bj = b.index_of(j);
      std::vector<int> g(a.n);
      bool inside = true;
      for (std::size_t k = 0; k < a.n; ++k) {
        g[k] = ai[k] + bj[k];
        if (g[k] > a.K) inside = false;
      }
      if (!inside || total(g) > a.K) continue;
      out.c[out.flat_of(g)] += a.c[i] * b.c[j];
    }
  }
  return out;
}

TruncatedSeries random_series(std::size_t n, int K, SeededStream& rng, double density) {
  TruncatedSeries s(n, K);
  for (int k = 0; k <= K; ++k) {
    bohr::for_each_index_of_order(n, k, [&](const MultiIndex& a) {
      if (rng.uniform() < density) s.add_term(a, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    });
  }
  return s;
}

std::uint64_t factorial(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

}  // namespace

TEST_CASE("multi-index basics") {
  const MultiIndex a(std::vector<int>{2, 0, 1});
  CHECK(a.order() == 3);
  CHECK(a.size() == 3);
  CHECK(MultiIndex::zero(3).order() == 0);
  CHECK(MultiIndex::unit(3, 1)[1] == 1);
  CHECK((a + MultiIndex::unit(3, 1)).order() == 4);
  CHECK(a.scaled(2)[0] == 4);
  CHECK_THROWS_AS(MultiIndex(std::vector<int>{1, -1}), std::invalid_argument);
}

TEST_CASE("graded order puts lower degree first") {
  const MultiIndex low(std::vector<int>{0, 2});
  const MultiIndex high(std::vector<int>{1, 2});
  CHECK(low < high);
  CHECK(MultiIndex(std::vector<int>{0, 1}) < MultiIndex(std::vector<int>{1, 0}));
}

TEST_CASE("multinomial against factorial ratio") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int k = 0; k <= 8; ++k) {
      bohr::for_each_index_of_order(n, k, [&](const MultiIndex& a) {
        std::uint64_t denom = 1;
        for (int e : a.exponents()) denom *= factorial(e);
        CHECK(bohr::multinomial(a) == factorial(k) / denom);
      });
    }
  }
}

TEST_CASE("multinomial mass equals n^k") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int k = 0; k <= 8; ++k) {
      std::uint64_t mass = 0;
      std::uint64_t count = 0;
      bohr::for_each_index_of_order(n, k, [&](const MultiIndex& a) {
        mass += bohr::multinomial(a);
        ++count;
        CHECK(a.order() == k);
      });
      std::uint64_t expect = 1;
      for (int i = 0; i < k; ++i) expect *= n;
      CHECK(mass == expect);
      // Stars and bars.
      std::uint64_t binom = 1;
      for (std::size_t i = 1; i < n; ++i) binom = binom * (static_cast<std::uint64_t>(k) + i) / i;
      CHECK(count == binom);
    }
  }
}

TEST_CASE("enumeration is strictly increasing in graded order") {
  MultiIndex prev;
  bool first = true;
  for (int k = 0; k <= 4; ++k) {
    bohr::for_each_index_of_order(3, k, [&](const MultiIndex& a) {
      if (!first) CHECK(prev < a);
      prev = a;
      first = false;
    });
  }
}

TEST_CASE("add_term truncates and cancels") {
  TruncatedSeries s(2, 3);
  s.add_term(MultiIndex(std::vector<int>{2, 2}), 1.0);
  CHECK(s.is_zero());
  s.add_term(MultiIndex(std::vector<int>{1, 1}), 2.0);
  s.add_term(MultiIndex(std::vector<int>{1, 1}), -2.0);
  CHECK(s.term_count() == 0);
  s.add_term(MultiIndex::zero(2), 1.5);
  CHECK(s.constant_term() == Complex(1.5));
  CHECK_THROWS_AS(s.add_term(MultiIndex::zero(3), 1.0), std::invalid_argument);
}

TEST_CASE("multiply matches dense convolution") {
  SeededStream rng(11);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const int K = 5;
      const auto a = random_series(n, K, rng, 0.6);
      const auto b = random_series(n, K, rng, 0.6);
      const auto prod = bohr::multiply(a, b, K);
      const Dense oracle = dense_product(to_dense(a), to_dense(b));
      const Dense got = to_dense(prod);
      for (std::size_t i = 0; i < oracle.c.size(); ++i) {
        CHECK(std::abs(got.c[i] - oracle.c[i]) <= 1e-13);
      }
    }
  }
}

TEST_CASE("power agrees with repeated products and has unit zeroth power") {
  SeededStream rng(5);
  const auto a = random_series(2, 6, rng, 0.5);
  CHECK(bohr::power(a, 0, 6) == TruncatedSeries::constant(2, 6, 1.0));
  auto manual = a;
  for (int k = 2; k <= 4; ++k) {
    manual = bohr::multiply(manual, a, 6);
    const auto p = bohr::power(a, k, 6);
    for (const auto& [alpha, c] : manual.terms()) CHECK(std::abs(p.coeff(alpha) - c) <= 1e-12);
  }
}

TEST_CASE("homogeneous parts reassemble the series") {
  SeededStream rng(9);
  const auto a = random_series(3, 5, rng, 0.7);
  TruncatedSeries sum(3, 5);
  for (int m = 0; m <= 5; ++m) {
    const auto part = bohr::homogeneous_part(a, m);
    for (const auto& [alpha, c] : part.terms()) {
      CHECK(alpha.order() == m);
      sum.add_term(alpha, c);
    }
  }
  CHECK(sum == a);
  CHECK_THROWS_AS(bohr::homogeneous_part(a, 6), std::out_of_range);
  CHECK_THROWS_AS(bohr::homogeneous_part(a, -1), std::out_of_range);
}

TEST_CASE("Cayley transform of a scaled variable") {
  const Complex zeta = std::polar(0.8, 0.7);
  TruncatedSeries phi(1, 12);
  phi.add_term(MultiIndex::unit(1, 0), zeta);
  const auto f = bohr::cayley_of(phi, 12);
  CHECK(f.constant_term() == Complex(1.0));
  for (int k = 1; k <= 12; ++k) {
    CHECK(std::abs(f.coeff(MultiIndex(std::vector<int>{k})) - 2.0 * std::pow(zeta, k)) <= 1e-14);
  }
  CHECK_THROWS_AS(bohr::cayley_of(TruncatedSeries::constant(1, 3, 0.5), 3), std::invalid_argument);
}

TEST_CASE("Cayley transform satisfies (1 - phi) f = 1 + phi") {
  SeededStream rng(21);
  auto phi = random_series(2, 6, rng, 0.5);
  phi.add_term(MultiIndex::zero(2), -phi.constant_term());
  const auto f = bohr::cayley_of(phi, 6);
  auto one_minus = TruncatedSeries::constant(2, 6, 1.0);
  auto one_plus = TruncatedSeries::constant(2, 6, 1.0);
  for (const auto& [alpha, c] : phi.terms()) {
    one_minus.add_term(alpha, -c);
    one_plus.add_term(alpha, c);
  }
  const auto lhs = bohr::multiply(one_minus, f, 6);
  for (int k = 0; k <= 6; ++k) {
    bohr::for_each_index_of_order(2, k, [&](const MultiIndex& a) {
      CHECK(std::abs(lhs.coeff(a) - one_plus.coeff(a)) <= 1e-12);
    });
  }
}

TEST_CASE("json round trip is exact") {
  SeededStream rng(3);
  const auto a = random_series(3, 4, rng, 0.5);
  const auto back = bohr::series_from_json(bohr::series_to_json(a));
  CHECK(back == a);
}
