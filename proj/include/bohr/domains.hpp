#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohr/execution.hpp"
#include "bohr/series.hpp"

namespace bohr {

/// Exponent q of an l_q norm, q in [1, inf]. Infinity is a distinct state,
/// spelled "inf" in text.
class QExponent {
 public:
  explicit QExponent(double q);
  static QExponent infinity();
  static QExponent parse(const std::string& text);

  bool is_infinite() const { return infinite_; }
  /// Finite value; throws for q = inf.
  double value() const;
  /// 1/q, zero for q = inf.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }
  /// Hoelder conjugate q' with 1/q + 1/q' = 1.
  QExponent conjugate() const;
  /// True when q is a finite positive integer.
  bool is_integer() const;
  std::string to_string() const;

  friend bool operator==(const QExponent&, const QExponent&) = default;

 private:
  QExponent() = default;
  double value_ = 1.0;
  bool infinite_ = false;
};

/// The ball scale * B_{l^n_q}.
struct LqBall {
  std::size_t n;
  QExponent q;
  double scale;

  LqBall(std::size_t n, QExponent q, double scale = 1.0);
  LqBall scaled(double t) const { return LqBall(n, q, scale * t); }
};

double lq_norm(std::span<const double> x, QExponent q);

/// Finite sum of terms a * x^e with a >= 0 and real exponents e >= 0.
class Posynomial {
 public:
  struct Term {
    double coeff;
    std::vector<double> exponents;
  };

  explicit Posynomial(std::size_t n) : n_(n) {}

  void add_term(double coeff, std::vector<double> exponents);

  std::size_t dim() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Value at a nonnegative point.
  double evaluate(std::span<const double> x) const;

 private:
  std::size_t n_;
  std::vector<Term> terms_;
};

/// Norm of the identity map l^n_{from} -> l^n_{to}, i.e. the smallest t with
/// B_{from} inside t * B_{to}.
double s_ratio(QExponent from, QExponent to, std::size_t n);

/// sup of |z^alpha| over the unit l_q ball.
double monomial_sup(const MultiIndex& alpha, QExponent q);

struct SupOptions {
  int starts = 16;
  int max_iterations = 500;
  double rel_tol = 1e-10;
  std::uint64_t seed = 0x5eed;
  Execution exec = Execution::parallel;
};

struct SupResult {
  double value = 0.0;
  std::vector<double> argmax;
  bool converged = true;
  int iterations = 0;
  std::size_t best_start = 0;
};

/// Maximum of g over the nonnegative part of the sphere ||x||_q = ball.scale.
///
/// q = inf is evaluated exactly at the corner. For finite q the search runs a
/// multi-start ascent on a softmax parametrization of the sphere; every
/// returned value is attained at a feasible point, so it is a lower bound for
/// the true supremum even when `converged` is false.
SupResult posynomial_sup(const Posynomial& g, const LqBall& ball,
                         const SupOptions& opts = {});

struct NormComparison {
  double value;
  bool degenerate;  // r == 0, value defined as 1
};

/// ||r||_1 / (n^{1-1/s} ||r||_s), in (0, 1] with equality iff r is constant.
NormComparison norm_compare(std::span<const double> r, double s);

}  // namespace bohr
