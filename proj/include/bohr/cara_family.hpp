#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohr/domains.hpp"
#include "bohr/series.hpp"

namespace bohr {

enum class Provenance { extremal, cayley_linear, power_sum_compose, mean_compose, random };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Inner map psi(z) = sum_i w_i z_i^degree of a composed member F o psi.
struct InnerMap {
  std::vector<std::complex<double>> weights;
  int degree = 1;

  /// sum_i |w_i| x_i^degree at a nonnegative point.
  double majorant(std::span<const double> x) const;
  /// Exact sup of the majorant over scale * B_{l^n_q}.
  double majorant_sup(const LqBall& ball) const;
};

/// Geometric envelope of the homogeneous blocks of F o psi.
///
/// The block produced by the k-th outer coefficient has coefficient moduli
/// summing (at radii x) to at most coeff_bound * (outer_ratio * psi^(x))^k.
/// Blocks k <= complete_through are fully present in the truncated series.
struct TailModel {
  double coeff_bound = 2.0;
  double outer_ratio = 1.0;
  InnerMap inner;
  int complete_through = 0;
};

/// A member of the class B(Omega) (Re f > 0, f(0) = 1) with the parameters
/// needed to regenerate it bit-identically.
struct TestFunction {
  TruncatedSeries series;
  Provenance provenance;
  nlohmann::json params;
  std::optional<TailModel> tail;

  std::size_t dim() const { return series.dim(); }
};

/// (1 + zeta z) / (1 - zeta z) on the unit disc, |zeta| <= 1.
TestFunction halfplane_extremal(std::complex<double> zeta, int K);

/// Cayley transform of phi(z) = sum w_i z_i. Requires scale * ||w||_{q'} <= 1
/// so that phi maps the ball into the unit disc.
TestFunction cayley_linear(std::vector<std::complex<double>> w, const LqBall& ball, int K);

/// f1d o v with v(z) = sum_i (z_i / scale)^q, integer q >= 1. The coefficient
/// at q*alpha is c_k(f1d) k!/alpha! / scale^{qk} for |alpha| = k.
TestFunction power_sum_compose(const TestFunction& f1d, int q, std::size_t n, int K,
                               double scale = 1.0);

/// f1d o s with s(z) = (z_1 + ... + z_n) / (n scale). The coefficient at alpha
/// is c_k(f1d) k!/alpha! / (n scale)^k for |alpha| = k.
TestFunction mean_compose(const TestFunction& f1d, std::size_t n, int K, double scale = 1.0);

/// Rebuilds a member from its descriptor {provenance, params}.
TestFunction regenerate(const nlohmann::json& descriptor);
nlohmann::json descriptor(const TestFunction& f);

struct TestBattery {
  std::vector<TestFunction> functions;
  LqBall domain;
  int K;
  std::uint64_t seed = 0;

  /// Throws unless nonempty with every member of dimension domain.n and
  /// degree K.
  void validate() const;
  std::size_t size() const { return functions.size(); }
  nlohmann::json manifest() const;
};

/// Number of random Cayley members in the default battery.
inline constexpr std::size_t kDefaultRandomMembers = 8;

/// Deterministic battery: the axis extremals, then the power-sum composition
/// (integer q only) and the mean composition of the zeta = 1 extremal, then
/// random Cayley members with ||w||_{q'} = 1/scale. Truncated to `size`.
TestBattery random_battery(const LqBall& ball, std::size_t size, int K, std::uint64_t seed);

/// Size of the default battery for a ball.
std::size_t default_battery_size(const LqBall& ball);
TestBattery default_battery(const LqBall& ball, int K, std::uint64_t seed);

}  // namespace bohr
