#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohr/cara_family.hpp"
#include "bohr/catalog.hpp"
#include "bohr/domains.hpp"
#include "bohr/execution.hpp"

namespace bohr {

enum class TailPolicy { report_K, geometric_bound };

struct BohrParams {
  double p = 1.0;
  TailPolicy tail = TailPolicy::geometric_bound;

  /// Throws unless 1 <= p < inf.
  void validate() const;
};

/// Which side of the true class quantity a number sits on.
enum class EstimateKind { upper_estimate, theorem_exact, lower_certificate };
std::string to_string(EstimateKind k);

struct BohrSum {
  double value = 0.0;
  /// False when the sum stops at degree K without a tail bound.
  bool tail_bounded = true;
  /// False when the sphere search hit its iteration cap (value is then still
  /// attained, hence a lower bound of the true supremum).
  bool converged = true;
};

/// A member compiled for repeated evaluation at one exponent p.
///
/// The truncated majorant sum_{alpha != 0} |c_alpha|^p x^{p alpha} is kept both
/// as a Posynomial (for the sphere search) and in log form grouped by degree
/// (for radius vectors). Under the geometric policy the missing blocks are
/// bounded by coeff_bound^p sum_{k > complete_through} (ratio * psi^)^{pk},
/// which is +inf once the ratio reaches 1.
class PreparedMember {
 public:
  PreparedMember(const TestFunction& f, const BohrParams& params);

  std::size_t dim() const { return n_; }
  int max_order() const { return max_order_; }
  const Posynomial& majorant() const { return majorant_; }

  /// sum_{alpha != 0} |c_alpha|^p r^{p alpha} over the stored terms.
  double truncated_sum(std::span<const double> r) const;
  /// Block sums B_k(d) = sum_{|alpha| = k} |c_alpha|^p d^{p alpha}, k = 0..max_order.
  void block_sums(std::span<const double> d, std::span<double> blocks) const;
  /// Tail bound for inner-majorant value psi_hat (0 if the policy is report_K).
  double tail(double psi_hat) const;
  bool tail_bounded() const { return has_tail_; }
  /// Gradient of truncated_sum + tail(inner_majorant) at r.
  void inner_gradient(std::span<const double> r, std::span<double> grad) const;
  /// Inner majorant at a radius vector / its exact sup over a ball.
  double inner_majorant(std::span<const double> r) const;
  double inner_majorant_sup(const LqBall& ball) const;
  int inner_degree() const { return has_tail_ ? tail_.inner.degree : 1; }

  double c0p() const { return c0p_; }
  double p() const { return p_; }

  /// (1/2)(|c_0|^p + inner)^{1/p}.
  double finish(double inner) const;

 private:
  std::size_t n_;
  double p_;
  double c0p_ = 0.0;
  int max_order_ = 0;
  Posynomial majorant_;
  std::vector<double> log_coeff_;
  std::vector<int> order_;
  std::vector<double> exponents_;  // row-major, p * alpha
  bool has_tail_ = false;
  TailModel tail_;
};

struct PreparedBattery {
  std::vector<PreparedMember> members;
  LqBall domain;
  int K;

  PreparedBattery(const TestBattery& battery, const BohrParams& params);
  std::size_t size() const { return members.size(); }
};

BohrSum bohr_sum_vector(const TestFunction& f, const BohrParams& params,
                        std::span<const double> r);
BohrSum bohr_sum_vector(const PreparedMember& m, std::span<const double> r);

/// sup over z in r * ball of the Bohr sum. For q = inf (and n = 1) this is the
/// radius-vector sum at the corner r * (1, ..., 1).
BohrSum bohr_sum_domain(const TestFunction& f, const BohrParams& params, double r,
                        const LqBall& ball, const SupOptions& opts = {});
BohrSum bohr_sum_domain(const PreparedMember& m, double r, const LqBall& ball,
                        const SupOptions& opts = {});

struct ClassSup {
  double value = 0.0;
  std::size_t argmax = 0;  // lowest index among ties
  bool tail_bounded = true;
  bool converged = true;
};

/// Max of bohr_sum_domain over the battery. The parallel kernel fills one slot
/// per member and reduces in index order, so it matches class_sup_serial bit
/// for bit.
ClassSup class_sup(const PreparedBattery& battery, double r, const LqBall& ball,
                   const SupOptions& opts = {});
ClassSup class_sup_serial(const PreparedBattery& battery, double r, const LqBall& ball,
                          const SupOptions& opts = {});
ClassSup class_sup(const TestBattery& battery, const BohrParams& params, double r,
                   const LqBall& ball, const SupOptions& opts = {});

struct RadiusInterval {
  double lo = 0.0;  // battery sup <= 1 here
  double hi = 0.0;  // battery sup > 1 here, or the ball scale when unconstrained
  std::size_t witness = 0;  // member binding at hi
  int K = 0;
  double tol = 0.0;
  int evaluations = 0;
  bool unconstrained = false;
  bool tail_bounded = true;
  bool converged = true;
  EstimateKind kind = EstimateKind::upper_estimate;
  std::vector<BoundRecord> catalog;

  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double v, double slack = 0.0) const {
    return lo - slack <= v && v <= hi + slack;
  }
};

/// Catalog records that apply to the radius of this ball at exponent p.
std::vector<BoundRecord> radius_catalog(double p, const LqBall& ball);

/// Bisection on r -> class_sup(r) - 1 over [0, ball.scale] until hi - lo <= tol.
/// A finite battery under-covers the class, so the bracket encloses an upper
/// estimate of the true radius.
RadiusInterval radius_solve(const TestBattery& battery, const BohrParams& params,
                            const LqBall& ball, double tol, const SupOptions& opts = {});

struct ArithOptions {
  int starts = 16;
  int max_iterations = 2000;
  double step_tol = 1e-10;
  /// Radial search stops at cap_factor * n * scale (mean radius cap_factor * scale).
  double cap_factor = 4.0;
  std::uint64_t seed = 0xa417;
  Execution exec = Execution::parallel;
};

struct ArithEstimate {
  double value = 0.0;  // (1/n) sum r_i of r_vec
  std::vector<double> r_vec;
  EstimateKind kind = EstimateKind::upper_estimate;
  bool unconstrained = false;
  bool tail_bounded = true;
  std::size_t best_start = 0;
  int evaluations = 0;
};

/// Largest t with every member's Bohr sum at t * d at most 1, for a direction
/// d >= 0 with sum d = 1; capped at cap.
double radial_limit(const PreparedBattery& battery, std::span<const double> d, double cap);

/// Maximizes the mean radius over battery-admissible radius vectors by
/// multi-start pairwise-transfer ascent on the direction simplex, each point
/// pushed radially to the admissibility boundary.
ArithEstimate arith_bohr_estimate(const TestBattery& battery, const BohrParams& params,
                                  const ArithOptions& cfg = {});

/// Degree-m blocks (m >= 1, nonzero) of every member, in battery order.
std::vector<TruncatedSeries> homogeneous_blocks(const TestBattery& battery);

/// Largest t such that (1/2)(sum_{|alpha|=m} |c_alpha|^p (t d)^{p alpha})^{1/p} <= 1
/// holds for every homogeneous polynomial in the list.
double max_homogeneous_scale(const std::vector<TruncatedSeries>& homogeneous,
                             std::span<const double> direction, double p);

struct HomogeneousScalingReport {
  bool accepted = true;  // precondition held
  std::string reason;
  std::vector<double> scaled_r;  // r / 3^{1/p}
  double max_sum = 0.0;
  std::size_t worst_member = 0;
  double slack = 0.0;  // 1 - max_sum
  bool passed = false;
};

/// If r satisfies the m-homogeneous constraint for every listed block, checks
/// that r / 3^{1/p} is admissible for every member of the full battery.
/// Passing allows a rounding slack of 1e-12 below zero.
HomogeneousScalingReport homogeneous_scaling_check(
    const std::vector<TruncatedSeries>& homogeneous, std::span<const double> r,
    const BohrParams& params, const TestBattery& full_battery);

}  // namespace bohr
