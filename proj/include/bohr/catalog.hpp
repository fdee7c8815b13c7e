#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "bohr/domains.hpp"

namespace bohr {

enum class BoundKind { exact, lower, upper, asymptotic };
std::string to_string(BoundKind k);

/// A published closed form or bound, evaluated at concrete parameters.
struct BoundRecord {
  std::string name;
  BoundKind kind;
  double value;
  std::string validity;  // parameter region the formula holds on
  std::string source;    // literature result the formula comes from
  std::string note;
};

struct BoundPair {
  BoundRecord lower;
  BoundRecord upper;
};

nlohmann::json to_json(const BoundRecord& r);

/// p-Bohr radius of the unit disc for the half-plane class,
/// ((2^p - 1) / (2^{p+1} - 1))^{1/p}, p > 0.
double disc_radius(double p);

/// p-Bohr radius of the polydisc B_{l^n_inf}, n > 1: exact (equal to the disc
/// value) for p >= 2, asymptotic shape (log n / n)^{(2-p)/(2p)} for 1 <= p < 2.
BoundRecord polydisc_radius(double p, std::size_t n);

struct BoundedClassBounds {
  BoundRecord lower;
  BoundRecord upper;
  std::optional<BoundRecord> log_lower;  // needs the unspecified constant c
};

/// Classical bounds on the Bohr radius K^n(B_{l^n_q}) of bounded holomorphic
/// functions, n >= 2. The logarithmic lower bound is produced only when a
/// constant c > 0 is supplied and log log n > 0.
BoundedClassBounds bounded_radius_bounds(std::size_t n, QExponent q,
                                         std::optional<double> c = std::nullopt);

/// Arithmetic radius from the p-Bohr radius of B_{l^n_q}: H / n^{1/q}.
double arith_from_radius(double radius, std::size_t n, QExponent q);

/// H/n <= A_p(B_{l^n_q}) <= (H / n^{1/p})^{1/q}, 1 <= q < inf, H the disc radius.
BoundPair arith_ball_bounds(double p, QExponent q, std::size_t n);

/// H / n^{1-1/q} <= H^n_p(B_{l^n_q}) <= (H / n^{1/p - 1})^{1/q}, 1 <= q < inf.
BoundPair radius_ball_bounds(double p, QExponent q, std::size_t n);

/// H/n <= A_p(B_{l^n_inf}) <= H / n^{1/p - 1}.
BoundPair arith_polydisc_bounds(double p, std::size_t n);

}  // namespace bohr
