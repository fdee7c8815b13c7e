#include "bohr/catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace bohr {

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::exact: return "exact";
    case BoundKind::lower: return "lower";
    case BoundKind::upper: return "upper";
    case BoundKind::asymptotic: return "asymptotic";
  }
  return "unknown";
}

nlohmann::json to_json(const BoundRecord& r) {
  return {{"name", r.name},         {"kind", to_string(r.kind)}, {"value", r.value},
          {"validity", r.validity}, {"source", r.source},        {"note", r.note}};
}

namespace {

void require_p(double p, double min_p, const char* who) {
  if (!(p >= min_p) || std::isinf(p)) {
    throw std::invalid_argument(std::string(who) + ": p out of range");
  }
}

void require_n(std::size_t n, std::size_t min_n, const char* who) {
  if (n < min_n) throw std::invalid_argument(std::string(who) + ": n out of range");
}

void require_finite_q(QExponent q, const char* who) {
  if (q.is_infinite()) {
    throw std::invalid_argument(std::string(who) +
                                ": q = inf is not covered; use the polydisc bounds");
  }
}

double dn(std::size_t n) { return static_cast<double>(n); }

}  // namespace

double disc_radius(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("disc_radius: p must be positive");
  // (2^p - 1) / (2^{p+1} - 1) rewritten to stay finite for large p.
  const double h = std::pow(2.0, -p);
  return std::pow((1.0 - h) / (2.0 - h), 1.0 / p);
}

BoundRecord polydisc_radius(double p, std::size_t n) {
  require_p(p, 1.0, "polydisc_radius");
  require_n(n, 2, "polydisc_radius");
  if (p >= 2.0) {
    return {"polydisc_radius", BoundKind::exact, disc_radius(p), "n > 1, p >= 2",
            "das_polydisc", "equals the one-dimensional value"};
  }
  const double shape = std::pow(std::log(dn(n)) / dn(n), (2.0 - p) / (2.0 * p));
  return {"polydisc_radius", BoundKind::asymptotic, shape, "n > 1, 1 <= p < 2",
          "das_polydisc", "asymptotic shape, constant unknown"};
}

BoundedClassBounds bounded_radius_bounds(std::size_t n, QExponent q, std::optional<double> c) {
  require_n(n, 2, "bounded_radius_bounds");
  const double nd = dn(n);
  const double log_n = std::log(nd);
  const double cube_root_e = std::cbrt(std::exp(1.0));
  BoundedClassBounds out{
      {"bounded_radius_lower", BoundKind::lower, 0.0, "", "", ""},
      {"bounded_radius_upper", BoundKind::upper, 0.0, "", "", ""},
      std::nullopt};

  if (q.is_infinite()) {
    out.lower.value = 1.0 / (3.0 * std::sqrt(nd));
    out.upper.value = 2.0 * std::sqrt(log_n / nd);
    out.lower.validity = out.upper.validity = "q = inf, n >= 2";
    out.lower.source = out.upper.source = "boas_khavinson_polydisc";
    out.lower.note = out.upper.note = "strict inequalities";
  } else if (q.value() == 1.0) {
    out.lower.value = 1.0 / (3.0 * cube_root_e);
    out.upper.value = 1.0 / 3.0;
    out.lower.validity = out.upper.validity = "q = 1, n >= 2";
    out.lower.source = out.upper.source = "aizenberg_l1_ball";
    out.lower.note = "strict";
  } else if (q.value() < 2.0) {
    const double e = 1.0 - 1.0 / q.value();
    out.lower.value = std::pow(1.0 / nd, e) / (3.0 * cube_root_e);
    out.upper.value = 3.0 * std::pow(log_n / nd, e);
    out.lower.validity = out.upper.validity = "1 <= q < 2, n >= 2";
    out.lower.source = out.upper.source = "boas_lq_ball_small_q";
    out.upper.note = "strict";
  } else {
    out.lower.value = std::sqrt(1.0 / nd) / 3.0;
    out.upper.value = 2.0 * std::sqrt(log_n / nd);
    out.lower.validity = out.upper.validity = "2 <= q <= inf, n >= 2";
    out.lower.source = out.upper.source = "boas_lq_ball_large_q";
    out.upper.note = "strict";
  }

  if (c) {
    if (!(*c > 0.0)) throw std::invalid_argument("bounded_radius_bounds: c must be positive");
    const double log_log_n = std::log(log_n);
    if (log_log_n > 0.0) {
      const double q_eff = q.is_infinite() ? 2.0 : std::min(q.value(), 2.0);
      const double e = 1.0 - 1.0 / q_eff;
      out.log_lower = BoundRecord{"bounded_radius_log_lower", BoundKind::lower,
                                  std::pow((log_n / log_log_n) / nd, e) / *c,
                                  "1 <= q <= inf, n > 1, log log n > 0",
                                  "defant_frerick_log_lower",
                                  "constant c user-supplied"};
    }
  }
  return out;
}

double arith_from_radius(double radius, std::size_t n, QExponent q) {
  require_n(n, 1, "arith_from_radius");
  return radius / std::pow(dn(n), q.reciprocal());
}

BoundPair arith_ball_bounds(double p, QExponent q, std::size_t n) {
  require_p(p, 1.0, "arith_ball_bounds");
  require_finite_q(q, "arith_ball_bounds");
  require_n(n, 1, "arith_ball_bounds");
  const double h = disc_radius(p);
  const double qv = q.value();
  return {{"arith_ball_lower", BoundKind::lower, h / dn(n), "1 <= p < inf, 1 <= q < inf",
           "arith_ball_sandwich", "axis restriction"},
          {"arith_ball_upper", BoundKind::upper, std::pow(h / std::pow(dn(n), 1.0 / p), 1.0 / qv),
           "1 <= p < inf, 1 <= q < inf", "arith_ball_sandwich", "power-sum composition"}};
}

BoundPair radius_ball_bounds(double p, QExponent q, std::size_t n) {
  require_p(p, 1.0, "radius_ball_bounds");
  require_finite_q(q, "radius_ball_bounds");
  require_n(n, 1, "radius_ball_bounds");
  const double h = disc_radius(p);
  const double qv = q.value();
  const double nd = dn(n);
  return {{"radius_ball_lower", BoundKind::lower, h / std::pow(nd, 1.0 - 1.0 / qv),
           "1 <= p, q < inf", "radius_ball_sandwich", ""},
          {"radius_ball_upper", BoundKind::upper,
           std::pow(h / std::pow(nd, 1.0 / p - 1.0), 1.0 / qv), "1 <= p, q < inf",
           "radius_ball_sandwich",
           "typo_flag: exponent on n read as (1/p) - 1, not n^(1/p) - 1"}};
}

BoundPair arith_polydisc_bounds(double p, std::size_t n) {
  require_p(p, 1.0, "arith_polydisc_bounds");
  require_n(n, 1, "arith_polydisc_bounds");
  const double h = disc_radius(p);
  return {{"arith_polydisc_lower", BoundKind::lower, h / dn(n), "1 <= p < inf",
           "arith_polydisc_sandwich", "axis restriction"},
          {"arith_polydisc_upper", BoundKind::upper, h / std::pow(dn(n), 1.0 / p - 1.0),
           "1 <= p < inf", "arith_polydisc_sandwich", "mean composition"}};
}

}  // namespace bohr
