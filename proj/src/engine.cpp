#include "bohr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bohr/rng.hpp"

namespace bohr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radii(std::span<const double> r, std::size_t n, const char* who) {
  if (r.size() != n) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  for (double v : r) {
    if (!(v >= 0.0) || std::isinf(v)) {
      throw std::invalid_argument(std::string(who) + ": radii must be finite and >= 0");
    }
  }
}

}  // namespace

void BohrParams::validate() const {
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("BohrParams: p must lie in [1, inf)");
}

std::string to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::upper_estimate: return "upper_estimate";
    case EstimateKind::theorem_exact: return "theorem_exact";
    case EstimateKind::lower_certificate: return "lower_certificate";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// PreparedMember

PreparedMember::PreparedMember(const TestFunction& f, const BohrParams& params)
    : n_(f.dim()), p_(params.p), max_order_(f.series.degree()), majorant_(f.dim()) {
  params.validate();
  c0p_ = std::pow(std::abs(f.series.constant_term()), p_);
  for (const auto& [alpha, c] : f.series.terms()) {
    if (alpha.order() == 0) continue;
    const double a = std::pow(std::abs(c), p_);
    if (a == 0.0) continue;
    std::vector<double> e(n_);
    for (std::size_t i = 0; i < n_; ++i) e[i] = p_ * alpha[i];
    exponents_.insert(exponents_.end(), e.begin(), e.end());
    majorant_.add_term(a, std::move(e));
    log_coeff_.push_back(std::log(a));
    order_.push_back(alpha.order());
  }
  if (f.tail && params.tail == TailPolicy::geometric_bound) {
    has_tail_ = true;
    tail_ = *f.tail;
  }
}

double PreparedMember::truncated_sum(std::span<const double> r) const {
  std::vector<double> log_r(n_);
  for (std::size_t i = 0; i < n_; ++i) log_r[i] = std::log(r[i]);
  double total = 0.0;
  for (std::size_t k = 0; k < log_coeff_.size(); ++k) {
    double s = log_coeff_[k];
    const double* e = &exponents_[k * n_];
    for (std::size_t i = 0; i < n_; ++i) {
      if (e[i] != 0.0) s += e[i] * log_r[i];
    }
    total += std::exp(s);
  }
  return total;
}

void PreparedMember::block_sums(std::span<const double> d, std::span<double> blocks) const {
  std::fill(blocks.begin(), blocks.end(), 0.0);
  std::vector<double> log_d(n_);
  for (std::size_t i = 0; i < n_; ++i) log_d[i] = std::log(d[i]);
  for (std::size_t k = 0; k < log_coeff_.size(); ++k) {
    double s = log_coeff_[k];
    const double* e = &exponents_[k * n_];
    for (std::size_t i = 0; i < n_; ++i) {
      if (e[i] != 0.0) s += e[i] * log_d[i];
    }
    blocks[static_cast<std::size_t>(order_[k])] += std::exp(s);
  }
}

double PreparedMember::tail(double psi_hat) const {
  if (!has_tail_) return 0.0;
  const double ratio = tail_.outer_ratio * psi_hat;
  if (ratio == 0.0) return 0.0;
  if (ratio >= 1.0) return kInf;
  const double x = std::pow(ratio, p_);
  return std::pow(tail_.coeff_bound, p_) * std::pow(x, tail_.complete_through + 1) / (1.0 - x);
}

void PreparedMember::inner_gradient(std::span<const double> r, std::span<double> grad) const {
  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t k = 0; k < log_coeff_.size(); ++k) {
    const double* e = &exponents_[k * n_];
    const double a = std::exp(log_coeff_[k]);
    for (std::size_t i = 0; i < n_; ++i) {
      if (e[i] == 0.0 || (r[i] == 0.0 && e[i] != 1.0)) continue;
      // d/dr_i of a r^e, written without dividing by r_i.
      double v = a * e[i] * (r[i] == 0.0 ? 1.0 : std::pow(r[i], e[i] - 1.0));
      for (std::size_t j = 0; j < n_ && v != 0.0; ++j) {
        if (j != i && e[j] != 0.0) v *= std::pow(r[j], e[j]);
      }
      grad[i] += v;
    }
  }
  if (!has_tail_) return;
  const double psi = inner_majorant(r);
  const double x = std::pow(tail_.outer_ratio * psi, p_);
  if (psi == 0.0 || x == 0.0) return;
  if (x >= 1.0) {
    std::fill(grad.begin(), grad.end(), kInf);
    return;
  }
  const int m = tail_.complete_through;
  const double dtail = std::pow(tail_.coeff_bound, p_) * std::pow(x, m + 1) *
                       ((m + 1) * (1.0 - x) + x) / ((1.0 - x) * (1.0 - x)) * p_ / psi;
  const int deg = tail_.inner.degree;
  for (std::size_t i = 0; i < n_; ++i) {
    const double w = std::abs(tail_.inner.weights[i]);
    if (w == 0.0) continue;
    grad[i] += dtail * w * deg * (deg == 1 ? 1.0 : std::pow(r[i], deg - 1));
  }
}

double PreparedMember::inner_majorant(std::span<const double> r) const {
  return has_tail_ ? tail_.inner.majorant(r) : 0.0;
}

double PreparedMember::inner_majorant_sup(const LqBall& ball) const {
  return has_tail_ ? tail_.inner.majorant_sup(ball) : 0.0;
}

double PreparedMember::finish(double inner) const {
  return 0.5 * std::pow(c0p_ + inner, 1.0 / p_);
}

PreparedBattery::PreparedBattery(const TestBattery& battery, const BohrParams& params)
    : domain(battery.domain), K(battery.K) {
  battery.validate();
  members.reserve(battery.size());
  for (const auto& f : battery.functions) members.emplace_back(f, params);
}

// ---------------------------------------------------------------------------
// Bohr sums

BohrSum bohr_sum_vector(const PreparedMember& m, std::span<const double> r) {
  check_radii(r, m.dim(), "bohr_sum_vector");
  const double inner = m.truncated_sum(r) + m.tail(m.inner_majorant(r));
  return {m.finish(inner), m.tail_bounded(), true};
}

BohrSum bohr_sum_vector(const TestFunction& f, const BohrParams& params,
                        std::span<const double> r) {
  return bohr_sum_vector(PreparedMember(f, params), r);
}

BohrSum bohr_sum_domain(const PreparedMember& m, double r, const LqBall& ball,
                        const SupOptions& opts) {
  if (ball.n != m.dim()) throw std::invalid_argument("bohr_sum_domain: dimension mismatch");
  if (!(r >= 0.0) || std::isinf(r)) throw std::invalid_argument("bohr_sum_domain: r must be >= 0");
  if (r == 0.0) return {m.finish(0.0), m.tail_bounded(), true};
  if (ball.q.is_infinite() || ball.n == 1) {
    const std::vector<double> corner(ball.n, r);
    return bohr_sum_vector(m, corner);
  }
  const LqBall sphere(ball.n, ball.q, r);
  double sup = 0.0;
  bool converged = true;
  if (!m.majorant().empty()) {
    const SupResult s = posynomial_sup(m.majorant(), sphere, opts);
    sup = s.value;
    converged = s.converged;
  }
  const double inner = sup + m.tail(m.inner_majorant_sup(sphere));
  return {m.finish(inner), m.tail_bounded(), converged};
}

BohrSum bohr_sum_domain(const TestFunction& f, const BohrParams& params, double r,
                        const LqBall& ball, const SupOptions& opts) {
  return bohr_sum_domain(PreparedMember(f, params), r, ball, opts);
}

namespace {

ClassSup reduce_class_sup(const std::vector<BohrSum>& sums) {
  ClassSup out;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (i == 0 || sums[i].value > out.value) {
      out.value = sums[i].value;
      out.argmax = i;
    }
    out.tail_bounded = out.tail_bounded && sums[i].tail_bounded;
    out.converged = out.converged && sums[i].converged;
  }
  return out;
}

void check_battery_ball(const PreparedBattery& battery, const LqBall& ball) {
  if (battery.members.empty()) throw std::invalid_argument("class_sup: empty battery");
  if (battery.domain.n != ball.n) throw std::invalid_argument("class_sup: battery/ball dimension mismatch");
}

}  // namespace

ClassSup class_sup(const PreparedBattery& battery, double r, const LqBall& ball,
                   const SupOptions& opts) {
  check_battery_ball(battery, ball);
  std::vector<BohrSum> sums(battery.size());
  const int count = static_cast<int>(battery.size());
#pragma omp parallel for schedule(dynamic) if (opts.exec == Execution::parallel)
  for (int i = 0; i < count; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    sums[idx] = bohr_sum_domain(battery.members[idx], r, ball, opts);
  }
  return reduce_class_sup(sums);
}

ClassSup class_sup_serial(const PreparedBattery& battery, double r, const LqBall& ball,
                          const SupOptions& opts) {
  check_battery_ball(battery, ball);
  SupOptions inner = opts;
  inner.exec = Execution::serial;
  std::vector<BohrSum> sums;
  sums.reserve(battery.size());
  for (const auto& m : battery.members) sums.push_back(bohr_sum_domain(m, r, ball, inner));
  return reduce_class_sup(sums);
}

ClassSup class_sup(const TestBattery& battery, const BohrParams& params, double r,
                   const LqBall& ball, const SupOptions& opts) {
  return class_sup(PreparedBattery(battery, params), r, ball, opts);
}

// ---------------------------------------------------------------------------
// Radius bisection

std::vector<BoundRecord> radius_catalog(double p, const LqBall& ball) {
  std::vector<BoundRecord> out;
  const std::size_t n = ball.n;
  if (n == 1) {
    out.push_back({"disc_radius", BoundKind::exact, disc_radius(p), "p > 0",
                   "halfplane_disc_closed_form", ""});
  } else if (ball.q.is_infinite()) {
    out.push_back(polydisc_radius(p, n));
    // On the polydisc the arithmetic radius equals the radius (n^{1/q} = 1).
    BoundPair a = arith_polydisc_bounds(p, n);
    a.lower.name = "radius_polydisc_lower";
    a.upper.name = "radius_polydisc_upper";
    a.lower.note = a.upper.note = "arithmetic-radius sandwich with n^(1/q) = 1";
    out.push_back(a.lower);
    out.push_back(a.upper);
  } else {
    BoundPair b = radius_ball_bounds(p, ball.q, n);
    out.push_back(b.lower);
    out.push_back(b.upper);
    if (p == 1.0 && ball.q.value() == 1.0) {
      out.push_back({"l1_ball_radius", BoundKind::exact, disc_radius(1.0), "p = q = 1, all n",
                     "radius_ball_sandwich", "lower and upper bounds coincide"});
    }
  }
  if (ball.scale != 1.0) {
    for (auto& rec : out) {
      if (rec.kind != BoundKind::asymptotic) rec.value *= ball.scale;
      rec.note += rec.note.empty() ? "scaled by ball scale" : "; scaled by ball scale";
    }
  }
  return out;
}

RadiusInterval radius_solve(const TestBattery& battery, const BohrParams& params,
                            const LqBall& ball, double tol, const SupOptions& opts) {
  if (!(tol > 0.0)) throw std::invalid_argument("radius_solve: tol must be positive");
  if (battery.domain.n != ball.n) throw std::invalid_argument("radius_solve: battery/ball dimension mismatch");
  const PreparedBattery prepared(battery, params);

  RadiusInterval out;
  out.K = battery.K;
  out.tol = tol;
  out.catalog = radius_catalog(params.p, ball);

  auto eval = [&](double r) {
    const ClassSup s = class_sup(prepared, r, ball, opts);
    ++out.evaluations;
    out.tail_bounded = out.tail_bounded && s.tail_bounded;
    out.converged = out.converged && s.converged;
    return s;
  };

  const ClassSup at_cap = eval(ball.scale);
  if (at_cap.value <= 1.0) {
    out.lo = out.hi = ball.scale;
    out.unconstrained = true;
    out.witness = at_cap.argmax;
    return out;
  }
  out.lo = 0.0;
  out.hi = ball.scale;
  out.witness = at_cap.argmax;
  while (out.hi - out.lo > tol) {
    const double mid = 0.5 * (out.lo + out.hi);
    if (mid <= out.lo || mid >= out.hi) break;  // one ulp
    const ClassSup s = eval(mid);
    if (s.value <= 1.0) {
      out.lo = mid;
    } else {
      out.hi = mid;
      out.witness = s.argmax;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetic radius

namespace {

// Largest t in [0, cap] with the member admissible at t * d, given its block
// sums and inner majorant at d.
double member_radial_limit(const PreparedMember& m, std::span<const double> blocks,
                           double psi_d, double cap) {
  const double p = m.p();
  const int degree = m.inner_degree();
  auto admissible = [&](double t) {
    const double s = std::pow(t, p);
    double g = 0.0;
    for (std::size_t k = blocks.size(); k-- > 1;) g = g * s + blocks[k];
    g *= s;
    g += m.tail(std::pow(t, degree) * psi_d);
    return m.finish(g) <= 1.0;
  };
  if (admissible(cap)) return cap;
  double lo = 0.0;
  double hi = cap;
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (admissible(mid) ? lo : hi) = mid;
  }
  return lo;
}

double mean(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

struct DirectionSearch {
  const PreparedBattery& battery;
  double cap;
  int evaluations = 0;

  double limit(std::span<const double> d) {
    ++evaluations;
    return radial_limit(battery, d, cap);
  }
};

struct StartResult {
  std::vector<double> d;
  double t = 0.0;
  int evaluations = 0;
};

std::vector<double> start_direction(std::size_t n, int s, std::uint64_t seed) {
  std::vector<double> d(n, 0.0);
  const auto idx = static_cast<std::size_t>(s);
  if (idx == 0) {
    std::fill(d.begin(), d.end(), 1.0 / static_cast<double>(n));
  } else if (idx <= n) {
    d[idx - 1] = 1.0;
  } else {
    SeededStream rng(seed, static_cast<std::uint64_t>(s));
    double total = 0.0;
    for (double& v : d) {
      v = -std::log(1.0 - rng.uniform());  // flat Dirichlet
      total += v;
    }
    for (double& v : d) v /= total;
  }
  return d;
}

// Solves the small dense system a x = b in place; false if singular.
bool solve_small(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t m = b.size();
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < m; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    for (std::size_t k = c + 1; k < m; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Minimum-norm point of the convex hull of a few vectors, by enumerating
// supports and solving the affine least-norm problem on each.
std::vector<double> min_norm_point(const std::vector<std::vector<double>>& g) {
  const std::size_t k = g.size();
  const std::size_t n = g[0].size();
  std::vector<double> best;
  double best_norm = kInf;
  for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    }
    const std::size_t m = s.size();
    std::vector<std::vector<double>> a(m + 1, std::vector<double>(m + 1, 1.0));
    std::vector<double> rhs(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) a[i][j] = dot(g[s[i]], g[s[j]]);
    }
    a[m][m] = 0.0;
    rhs[m] = 1.0;
    if (!solve_small(a, rhs)) continue;
    if (std::any_of(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(m),
                    [](double l) { return l < -1e-12; })) {
      continue;
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) v[j] += rhs[i] * g[s[i]][j];
    }
    const double norm = dot(v, v);
    if (norm < best_norm) {
      best_norm = norm;
      best = std::move(v);
    }
  }
  return best;
}

constexpr std::size_t kMaxActive = 6;

StartResult climb(const PreparedBattery& battery, std::vector<double> d, double cap,
                  const ArithOptions& cfg) {
  const std::size_t n = d.size();
  DirectionSearch search{battery, cap};
  double t = search.limit(d);
  std::vector<double> trial(n);

  auto try_point = [&](const std::vector<double>& cand) {
    const double tc = search.limit(cand);
    if (tc > t) {
      d = cand;
      t = tc;
      return true;
    }
    return false;
  };

  // Coarse phase: pairwise transfers of mass between coordinates.
  constexpr double kCoarseTol = 1e-4;
  double step = 0.5;
  for (int it = 0; it < cfg.max_iterations && n > 1; ++it) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double move = std::min(step, d[j]);
        if (move <= 0.0) continue;
        trial = d;
        trial[i] += move;
        trial[j] = (move == d[j]) ? 0.0 : d[j] - move;
        improved = try_point(trial) || improved;
      }
    }
    if (improved) {
      step = std::min(2.0 * step, 0.5);
    } else {
      step *= 0.5;
      if (step < kCoarseTol) break;
    }
  }

  // Fine phase: steepest ascent of min_f T_f along the minimum-norm element
  // of the near-active implicit gradients, projected onto the simplex face.
  std::vector<double> blocks, r(n), grad_g(n);
  for (int it = 0; it < cfg.max_iterations && n > 1 && t < cap; ++it) {
    std::vector<std::pair<double, std::size_t>> limits;
    for (std::size_t f = 0; f < battery.size(); ++f) {
      const auto& m = battery.members[f];
      blocks.assign(static_cast<std::size_t>(m.max_order()) + 1, 0.0);
      m.block_sums(d, blocks);
      limits.emplace_back(member_radial_limit(m, blocks, m.inner_majorant(d), cap), f);
    }
    ++search.evaluations;
    std::sort(limits.begin(), limits.end());
    const double eps = std::max(1e-10, step);
    std::vector<std::vector<double>> grads;
    for (const auto& [tf, f] : limits) {
      if (tf > t * (1.0 + eps) || tf >= cap || grads.size() == kMaxActive) break;
      for (std::size_t i = 0; i < n; ++i) r[i] = tf * d[i];
      battery.members[f].inner_gradient(r, grad_g);
      const double gd = dot(grad_g, d);
      if (!(gd > 0.0) || std::isinf(gd)) continue;
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i) g[i] = -tf * grad_g[i] / gd;
      grads.push_back(std::move(g));
    }
    if (grads.empty()) break;

    std::vector<bool> free(n, true);
    std::vector<double> v;
    for (bool changed = true; changed;) {
      std::vector<std::vector<double>> projected = grads;
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i) count += free[i] ? 1 : 0;
      for (auto& g : projected) {
        double avg = 0.0;
        for (std::size_t i = 0; i < n; ++i) avg += free[i] ? g[i] : 0.0;
        avg /= static_cast<double>(count);
        for (std::size_t i = 0; i < n; ++i) g[i] = free[i] ? g[i] - avg : 0.0;
      }
      v = min_norm_point(projected);
      changed = false;
      for (std::size_t i = 0; i < n && !v.empty(); ++i) {
        if (free[i] && d[i] == 0.0 && v[i] < 0.0 && count > 2) {
          free[i] = false;
          changed = true;
        }
      }
    }
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    if (v.empty() || peak <= 1e-14 * t) {
      // Stationary for this active tolerance; tighten it.
      step *= 0.5;
      if (step < cfg.step_tol) break;
      continue;
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      trial[i] = std::max(0.0, d[i] + step * v[i] / peak);
      total += trial[i];
    }
    for (double& x : trial) x /= total;
    if (try_point(trial)) {
      step = std::min(2.0 * step, 0.5);
    } else {
      step *= 0.5;
      if (step < cfg.step_tol) break;
    }
  }
  return {std::move(d), t, search.evaluations};
}

}  // namespace

double radial_limit(const PreparedBattery& battery, std::span<const double> d, double cap) {
  double best = cap;
  std::vector<double> blocks;
  for (const auto& m : battery.members) {
    blocks.assign(static_cast<std::size_t>(m.max_order()) + 1, 0.0);
    m.block_sums(d, blocks);
    best = member_radial_limit(m, blocks, m.inner_majorant(d), best);
    if (best == 0.0) break;
  }
  return best;
}

ArithEstimate arith_bohr_estimate(const TestBattery& battery, const BohrParams& params,
                                  const ArithOptions& cfg) {
  const PreparedBattery prepared(battery, params);
  const std::size_t n = battery.domain.n;
  const double cap = cfg.cap_factor * static_cast<double>(n) * battery.domain.scale;
  const int starts = std::max(1, cfg.starts);

  std::vector<StartResult> results(static_cast<std::size_t>(starts));
#pragma omp parallel for schedule(dynamic) if (cfg.exec == Execution::parallel)
  for (int s = 0; s < starts; ++s) {
    results[static_cast<std::size_t>(s)] =
        climb(prepared, start_direction(n, s, cfg.seed), cap, cfg);
  }

  ArithEstimate out;
  const StartResult* best = &results[0];
  for (std::size_t s = 0; s < results.size(); ++s) {
    out.evaluations += results[s].evaluations;
    if (results[s].t > best->t) {
      best = &results[s];
      out.best_start = s;
    }
  }
  out.unconstrained = best->t >= cap;
  out.r_vec.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.r_vec[i] = best->t * best->d[i];

  // Radial shrink until the direct evaluation agrees with the block form.
  auto feasible = [&](std::span<const double> r) {
    return std::all_of(prepared.members.begin(), prepared.members.end(),
                       [&](const PreparedMember& m) { return bohr_sum_vector(m, r).value <= 1.0; });
  };
  for (int guard = 0; guard < 200 && !feasible(out.r_vec); ++guard) {
    for (double& v : out.r_vec) v *= 1.0 - 1e-12 * std::ldexp(1.0, guard / 4);
  }
  out.value = mean(out.r_vec);
  out.tail_bounded = std::all_of(prepared.members.begin(), prepared.members.end(),
                                 [](const PreparedMember& m) { return m.tail_bounded(); });
  return out;
}

// ---------------------------------------------------------------------------
// Homogeneous scaling

namespace {

int homogeneous_order(const TruncatedSeries& g) {
  if (g.is_zero()) return -1;
  const int m = g.terms().begin()->first.order();
  for (const auto& [alpha, c] : g.terms()) {
    if (alpha.order() != m) return -1;
  }
  return m;
}

double homogeneous_sum(const TruncatedSeries& g, std::span<const double> r, double p) {
  double s = 0.0;
  for (const auto& [alpha, c] : g.terms()) {
    double v = std::pow(std::abs(c), p);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] != 0) v *= std::pow(r[i], p * alpha[i]);
    }
    s += v;
  }
  return s;
}

}  // namespace

std::vector<TruncatedSeries> homogeneous_blocks(const TestBattery& battery) {
  std::vector<TruncatedSeries> out;
  for (const auto& f : battery.functions) {
    for (int m = 1; m <= f.series.degree(); ++m) {
      TruncatedSeries part = homogeneous_part(f.series, m);
      if (!part.is_zero()) out.push_back(std::move(part));
    }
  }
  return out;
}

double max_homogeneous_scale(const std::vector<TruncatedSeries>& homogeneous,
                             std::span<const double> direction, double p) {
  double best = kInf;
  for (const auto& g : homogeneous) {
    const int m = homogeneous_order(g);
    if (m < 1) throw std::invalid_argument("max_homogeneous_scale: block is not m-homogeneous, m >= 1");
    check_radii(direction, g.dim(), "max_homogeneous_scale");
    const double b = homogeneous_sum(g, direction, p);
    if (b > 0.0) best = std::min(best, std::pow(std::pow(2.0, p) / b, 1.0 / (p * m)));
  }
  return best;
}

HomogeneousScalingReport homogeneous_scaling_check(
    const std::vector<TruncatedSeries>& homogeneous, std::span<const double> r,
    const BohrParams& params, const TestBattery& full_battery) {
  params.validate();
  full_battery.validate();
  check_radii(r, full_battery.domain.n, "homogeneous_scaling_check");
  HomogeneousScalingReport report;
  for (std::size_t i = 0; i < homogeneous.size(); ++i) {
    const auto& g = homogeneous[i];
    if (g.dim() != r.size() || homogeneous_order(g) < 1) {
      report.accepted = false;
      report.reason = "block " + std::to_string(i) + " is not m-homogeneous with m >= 1";
      return report;
    }
    const double v = 0.5 * std::pow(homogeneous_sum(g, r, params.p), 1.0 / params.p);
    if (v > 1.0 + 1e-12) {
      report.accepted = false;
      report.reason = "block " + std::to_string(i) + " violates the homogeneous constraint";
      return report;
    }
  }
  const double shrink = std::pow(3.0, -1.0 / params.p);
  report.scaled_r.assign(r.begin(), r.end());
  for (double& v : report.scaled_r) v *= shrink;
  for (std::size_t i = 0; i < full_battery.size(); ++i) {
    const double v = bohr_sum_vector(full_battery.functions[i], params, report.scaled_r).value;
    if (i == 0 || v > report.max_sum) {
      report.max_sum = v;
      report.worst_member = i;
    }
  }
  report.slack = 1.0 - report.max_sum;
  report.passed = report.slack >= -1e-12;
  return report;
}

}  // namespace bohr
