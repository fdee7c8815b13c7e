#include "bohr/domains.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "bohr/rng.hpp"

namespace bohr {

QExponent::QExponent(double q) {
  if (std::isnan(q) || q < 1.0) {
    throw std::invalid_argument("QExponent: q must lie in [1, inf]");
  }
  if (std::isinf(q)) {
    infinite_ = true;
    value_ = std::numeric_limits<double>::infinity();
  } else {
    value_ = q;
  }
}

QExponent QExponent::infinity() {
  QExponent q;
  q.infinite_ = true;
  q.value_ = std::numeric_limits<double>::infinity();
  return q;
}

QExponent QExponent::parse(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "inf" || lower == "infinity") return infinity();
  std::size_t used = 0;
  double q = 0.0;
  try {
    q = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("QExponent: cannot parse '" + text + "'");
  }
  if (used != text.size()) {
    throw std::invalid_argument("QExponent: cannot parse '" + text + "'");
  }
  return QExponent(q);
}

double QExponent::value() const {
  if (infinite_) throw std::logic_error("QExponent::value: q is infinite");
  return value_;
}

QExponent QExponent::conjugate() const {
  if (infinite_) return QExponent(1.0);
  if (value_ == 1.0) return infinity();
  return QExponent(value_ / (value_ - 1.0));
}

bool QExponent::is_integer() const {
  return !infinite_ && std::floor(value_) == value_;
}

std::string QExponent::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

LqBall::LqBall(std::size_t n_, QExponent q_, double scale_)
    : n(n_), q(q_), scale(scale_) {
  if (n == 0) throw std::invalid_argument("LqBall: dimension must be >= 1");
  if (!(scale > 0.0) || std::isinf(scale)) {
    throw std::invalid_argument("LqBall: scale must be positive and finite");
  }
}

double lq_norm(std::span<const double> x, QExponent q) {
  if (q.is_infinite()) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
  }
  const double qv = q.value();
  double s = 0.0;
  for (double v : x) s += std::pow(std::abs(v), qv);
  return std::pow(s, 1.0 / qv);
}

void Posynomial::add_term(double coeff, std::vector<double> exponents) {
  if (exponents.size() != n_) {
    throw std::invalid_argument("Posynomial: exponent vector has wrong length");
  }
  if (!(coeff >= 0.0)) throw std::invalid_argument("Posynomial: negative coefficient");
  for (double e : exponents) {
    if (!(e >= 0.0)) throw std::invalid_argument("Posynomial: negative exponent");
  }
  terms_.push_back({coeff, std::move(exponents)});
}

double Posynomial::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw std::invalid_argument("Posynomial: point has wrong length");
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t i = 0; i < n_; ++i) {
      if (t.exponents[i] != 0.0) v *= std::pow(x[i], t.exponents[i]);
    }
    total += v;
  }
  return total;
}

double s_ratio(QExponent from, QExponent to, std::size_t n) {
  if (n == 0) throw std::invalid_argument("s_ratio: n must be >= 1");
  const double e = std::max(0.0, to.reciprocal() - from.reciprocal());
  return std::pow(static_cast<double>(n), e);
}

double monomial_sup(const MultiIndex& alpha, QExponent q) {
  if (q.is_infinite() || alpha.order() == 0) return 1.0;
  const double order = alpha.order();
  double log_value = 0.0;
  for (int a : alpha.exponents()) {
    if (a > 0) log_value += (a / q.value()) * std::log(a / order);
  }
  return std::exp(log_value);
}

namespace {

// Posynomial on the sphere ||x||_q = scale in softmax coordinates:
//   x_i = scale * y_i^{1/q},  y = softmax(theta),
// so each term becomes exp(log_coeff + sum_i weight_i * log y_i).
class SphereObjective {
 public:
  SphereObjective(const Posynomial& g, const LqBall& ball)
      : n_(ball.n), inv_q_(ball.q.reciprocal()), log_scale_(std::log(ball.scale)) {
    for (const auto& t : g.terms()) {
      if (t.coeff == 0.0) continue;
      double degree = 0.0;
      for (double e : t.exponents) degree += e;
      log_coeff_.push_back(std::log(t.coeff) + degree * log_scale_);
      degree_.push_back(degree * inv_q_);
      for (double e : t.exponents) weight_.push_back(e * inv_q_);
    }
  }

  std::size_t terms() const { return log_coeff_.size(); }

  void log_simplex(std::span<const double> theta, std::span<double> log_y) const {
    double m = theta[0];
    for (double v : theta) m = std::max(m, v);
    double s = 0.0;
    for (double v : theta) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t i = 0; i < n_; ++i) log_y[i] = theta[i] - lse;
  }

  // Objective at theta; fills log_y and the per-term values.
  double value(std::span<const double> theta, std::span<double> log_y,
               std::span<double> term_values) const {
    log_simplex(theta, log_y);
    double total = 0.0;
    for (std::size_t k = 0; k < terms(); ++k) {
      term_values[k] = std::exp(term_log(k, log_y));
      total += term_values[k];
    }
    return total;
  }

  // Gradient with respect to theta from the cached state of value().
  void gradient(std::span<const double> log_y, std::span<const double> term_values,
                std::span<double> grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    double weighted = 0.0;
    for (std::size_t k = 0; k < terms(); ++k) {
      const double tv = term_values[k];
      weighted += tv * degree_[k];
      const double* w = &weight_[k * n_];
      for (std::size_t j = 0; j < n_; ++j) grad[j] += tv * w[j];
    }
    for (std::size_t j = 0; j < n_; ++j) grad[j] -= std::exp(log_y[j]) * weighted;
  }

  std::vector<double> to_point(std::span<const double> log_y, double scale) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = scale * std::exp(log_y[i] * inv_q_);
    return x;
  }

 private:
  double term_log(std::size_t k, std::span<const double> log_y) const {
    double s = log_coeff_[k];
    const double* w = &weight_[k * n_];
    for (std::size_t i = 0; i < n_; ++i) {
      if (w[i] != 0.0) s += w[i] * log_y[i];
    }
    return s;
  }

  std::size_t n_;
  double inv_q_;
  double log_scale_;
  std::vector<double> log_coeff_;
  std::vector<double> degree_;
  std::vector<double> weight_;  // row-major terms x n
};

struct StartOutcome {
  double value = 0.0;
  std::vector<double> theta;
  bool converged = false;
  int iterations = 0;
};

std::vector<double> start_theta(std::size_t n, int s, std::uint64_t seed) {
  constexpr double kCornerLift = 8.0;
  std::vector<double> theta(n, 0.0);
  const auto idx = static_cast<std::size_t>(s);
  if (idx < n) {
    theta[idx] = kCornerLift;
  } else if (idx > n) {
    SeededStream rng(seed, static_cast<std::uint64_t>(s));
    for (double& t : theta) t = rng.uniform(-3.0, 3.0);
  }
  return theta;
}

// log y_i below this (y_i < 0.01) marks a start as heading for a face.
constexpr double kFaceLogThreshold = -4.6;

StartOutcome ascend(const SphereObjective& obj, std::vector<double> theta,
                    const SupOptions& opts) {
  const std::size_t n = theta.size();
  std::vector<double> log_y(n), grad(n), trial(n), trial_log_y(n);
  std::vector<double> tv(obj.terms()), trial_tv(obj.terms());
  StartOutcome out;
  double current = obj.value(theta, log_y, tv);
  double step = 1.0;
  int small_gains = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    if (current <= 0.0) {
      out.converged = true;
      break;
    }
    obj.gradient(log_y, tv, grad);
    double gnorm = 0.0;
    for (double& g : grad) {
      g /= current;  // ascent on log of the objective
      gnorm += g * g;
    }
    if (std::sqrt(gnorm) < 1e-15) {
      out.converged = true;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] + step * grad[i];
    const double candidate = obj.value(trial, trial_log_y, trial_tv);
    if (candidate > current) {
      const double gain = (candidate - current) / current;
      theta.swap(trial);
      log_y.swap(trial_log_y);
      tv.swap(trial_tv);
      current = candidate;
      step = std::min(step * 2.0, 1e8);
      small_gains = gain < opts.rel_tol ? small_gains + 1 : 0;
      if (small_gains >= 2) {
        out.converged = true;
        break;
      }
    } else {
      step *= 0.5;
      if (step < 1e-12) {
        out.converged = true;
        break;
      }
    }
  }
  out.value = current;
  out.theta = std::move(theta);
  return out;
}

}  // namespace

SupResult posynomial_sup(const Posynomial& g, const LqBall& ball,
                         const SupOptions& opts) {
  if (g.dim() != ball.n) throw std::invalid_argument("posynomial_sup: dimension mismatch");
  if (g.empty()) throw std::invalid_argument("posynomial_sup: empty posynomial");
  const std::size_t n = ball.n;

  SupResult result;
  if (ball.q.is_infinite() || n == 1) {
    result.argmax.assign(n, ball.scale);
    result.value = g.evaluate(result.argmax);
    return result;
  }

  const SphereObjective obj(g, ball);
  const int starts = std::max(1, opts.starts);
  std::vector<StartOutcome> outcomes(static_cast<std::size_t>(starts));

#pragma omp parallel for schedule(dynamic) if (opts.exec == Execution::parallel)
  for (int s = 0; s < starts; ++s) {
    outcomes[static_cast<std::size_t>(s)] =
        ascend(obj, start_theta(n, s, opts.seed), opts);
  }

  std::vector<double> log_y(n);
  bool have = false;
  for (std::size_t s = 0; s < outcomes.size(); ++s) {
    const auto& o = outcomes[s];
    result.iterations += o.iterations;
    if (!have || o.value > result.value) {
      have = true;
      result.value = o.value;
      result.best_start = s;
      result.converged = o.converged;
      obj.log_simplex(o.theta, log_y);
      result.argmax = obj.to_point(log_y, ball.scale);
    }
  }
  // Optima on a face of the simplex are only approached asymptotically by the
  // softmax ascent. Starts that drift towards a face are re-solved on it.
  std::vector<std::vector<bool>> faces;
  for (const auto& o : outcomes) {
    obj.log_simplex(o.theta, log_y);
    std::vector<bool> keep(n);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      keep[i] = log_y[i] >= kFaceLogThreshold;
      kept += keep[i] ? 1 : 0;
    }
    if (kept == n || kept < 2) continue;
    if (std::find(faces.begin(), faces.end(), keep) == faces.end()) faces.push_back(keep);
  }
  for (const auto& keep : faces) {
    const std::size_t m = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
    Posynomial reduced(m);
    for (const auto& t : g.terms()) {
      bool survives = true;
      std::vector<double> e;
      for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) {
          e.push_back(t.exponents[i]);
        } else if (t.exponents[i] != 0.0) {
          survives = false;
        }
      }
      if (survives) reduced.add_term(t.coeff, std::move(e));
    }
    if (reduced.empty()) continue;
    SupOptions face_opts = opts;
    face_opts.exec = Execution::serial;
    const SupResult face = posynomial_sup(reduced, LqBall(m, ball.q, ball.scale), face_opts);
    result.iterations += face.iterations;
    if (face.value > result.value) {
      result.value = face.value;
      result.best_start = outcomes.size() + n;
      result.converged = face.converged;
      result.argmax.assign(n, 0.0);
      for (std::size_t i = 0, j = 0; i < n; ++i) {
        if (keep[i]) result.argmax[i] = face.argmax[j++];
      }
    }
  }
  // Exact axis points.
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> corner(n, 0.0);
    corner[i] = ball.scale;
    const double v = g.evaluate(corner);
    if (v > result.value) {
      result.value = v;
      result.best_start = outcomes.size() + i;
      result.converged = true;
      result.argmax = std::move(corner);
    }
  }
  return result;
}

NormComparison norm_compare(std::span<const double> r, double s) {
  if (!(s >= 1.0)) throw std::invalid_argument("norm_compare: s must be >= 1");
  if (r.empty()) throw std::invalid_argument("norm_compare: empty vector");
  double l1 = 0.0;
  for (double v : r) {
    if (!(v >= 0.0)) throw std::invalid_argument("norm_compare: negative entry");
    l1 += v;
  }
  if (l1 == 0.0) return {1.0, true};
  if (std::all_of(r.begin(), r.end(), [&](double v) { return v == r[0]; })) {
    return {1.0, false};
  }
  const QExponent q = std::isinf(s) ? QExponent::infinity() : QExponent(s);
  const double n = static_cast<double>(r.size());
  const double ls = lq_norm(r, q);
  return {l1 / (std::pow(n, 1.0 - q.reciprocal()) * ls), false};
}

}  // namespace bohr
