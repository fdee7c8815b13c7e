#pragma once

#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

namespace bohr {

/// Exponent vector alpha in N_0^n with its cached order |alpha|.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> exponents);

  static MultiIndex zero(std::size_t n);
  static MultiIndex unit(std::size_t n, std::size_t i);

  std::size_t size() const { return exponents_.size(); }
  int order() const { return order_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  std::span<const int> exponents() const { return exponents_; }

  MultiIndex operator+(const MultiIndex& other) const;
  MultiIndex scaled(int factor) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  // Graded ordering: by order first, then lexicographically.
  friend std::strong_ordering operator<=>(const MultiIndex& a,
                                         const MultiIndex& b) {
    if (auto c = a.order_ <=> b.order_; c != 0) return c;
    return a.exponents_ <=> b.exponents_;
  }

 private:
  std::vector<int> exponents_;
  int order_ = 0;
};

/// |alpha|! / (alpha_1! ... alpha_n!), exact while it fits in 64 bits.
std::uint64_t multinomial(const MultiIndex& alpha);

/// Calls fn for every multi-index of length n and order k, in graded order.
void for_each_index_of_order(std::size_t n, int k,
                             const std::function<void(const MultiIndex&)>& fn);

/// Sparse power series in n variables truncated at total degree K.
///
/// Coefficients are complex; absent indices are zero and exact zeros are never
/// stored. Iteration follows the graded order of MultiIndex, so floating-point
/// reductions over the terms are reproducible.
class TruncatedSeries {
 public:
  using Coeff = std::complex<double>;
  using TermMap = std::map<MultiIndex, Coeff>;

  TruncatedSeries(std::size_t n, int K);

  static TruncatedSeries constant(std::size_t n, int K, Coeff value);
  /// The coordinate function z_i (0-based).
  static TruncatedSeries variable(std::size_t n, int K, std::size_t i);

  /// Accumulates c into the coefficient of alpha. Indices above the
  /// truncation degree are dropped; a coefficient that cancels to exactly
  /// zero is erased.
  void add_term(const MultiIndex& alpha, Coeff c);

  std::size_t dim() const { return n_; }
  int degree() const { return K_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Coeff coeff(const MultiIndex& alpha) const;
  Coeff constant_term() const;

  friend bool operator==(const TruncatedSeries&,
                         const TruncatedSeries&) = default;

 private:
  std::size_t n_;
  int K_;
  TermMap terms_;
};

/// Cauchy product truncated at total degree K.
TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b,
                         int K);

/// a^k by repeated multiplication; a^0 is the constant 1.
TruncatedSeries power(const TruncatedSeries& a, int k, int K);

/// The degree-m block of a.
TruncatedSeries homogeneous_part(const TruncatedSeries& a, int m);

/// (1 + phi) / (1 - phi) = 1 + 2 sum_{k>=1} phi^k, truncated at K.
/// phi must vanish at the origin.
TruncatedSeries cayley_of(const TruncatedSeries& phi, int K);

nlohmann::json series_to_json(const TruncatedSeries& s);
TruncatedSeries series_from_json(const nlohmann::json& j);

}  // namespace bohr
