#include "bohr/series.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace bohr {

MultiIndex::MultiIndex(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
    order_ += e;
  }
}

MultiIndex MultiIndex::zero(std::size_t n) {
  return MultiIndex(std::vector<int>(n, 0));
}

MultiIndex MultiIndex::unit(std::size_t n, std::size_t i) {
  if (i >= n) throw std::out_of_range("MultiIndex::unit: coordinate out of range");
  std::vector<int> e(n, 0);
  e[i] = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (size() != other.size()) {
    throw std::invalid_argument("MultiIndex: length mismatch");
  }
  std::vector<int> e(exponents_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::scaled(int factor) const {
  if (factor < 0) throw std::invalid_argument("MultiIndex: negative scale");
  std::vector<int> e(exponents_);
  for (int& x : e) x *= factor;
  return MultiIndex(std::move(e));
}

std::uint64_t multinomial(const MultiIndex& alpha) {
  // Product of binomials C(a_1 + ... + a_i, a_i); each partial product is
  // itself a multinomial, so the running division is exact.
  std::uint64_t result = 1;
  int running = 0;
  for (int a : alpha.exponents()) {
    for (int j = 1; j <= a; ++j) {
      ++running;
      result = result * static_cast<std::uint64_t>(running) /
               static_cast<std::uint64_t>(j);
    }
  }
  return result;
}

namespace {

void enumerate(std::vector<int>& e, std::size_t pos, int remaining,
               const std::function<void(const MultiIndex&)>& fn) {
  if (pos + 1 == e.size()) {
    e[pos] = remaining;
    fn(MultiIndex(e));
    return;
  }
  // Lexicographically increasing order within a fixed order.
  for (int v = 0; v <= remaining; ++v) {
    e[pos] = v;
    enumerate(e, pos + 1, remaining - v, fn);
  }
}

void check_dim(const TruncatedSeries& s, const MultiIndex& alpha) {
  if (alpha.size() != s.dim()) {
    throw std::invalid_argument("TruncatedSeries: index of length " +
                                std::to_string(alpha.size()) +
                                " in dimension " + std::to_string(s.dim()));
  }
}

}  // namespace

void for_each_index_of_order(std::size_t n, int k,
                             const std::function<void(const MultiIndex&)>& fn) {
  if (n == 0) throw std::invalid_argument("for_each_index_of_order: n == 0");
  if (k < 0) return;
  std::vector<int> e(n, 0);
  enumerate(e, 0, k, fn);
}

TruncatedSeries::TruncatedSeries(std::size_t n, int K) : n_(n), K_(K) {
  if (n == 0) throw std::invalid_argument("TruncatedSeries: dimension must be >= 1");
  if (K < 0) throw std::invalid_argument("TruncatedSeries: negative degree");
}

TruncatedSeries TruncatedSeries::constant(std::size_t n, int K, Coeff value) {
  TruncatedSeries s(n, K);
  s.add_term(MultiIndex::zero(n), value);
  return s;
}

TruncatedSeries TruncatedSeries::variable(std::size_t n, int K, std::size_t i) {
  TruncatedSeries s(n, K);
  s.add_term(MultiIndex::unit(n, i), 1.0);
  return s;
}

void TruncatedSeries::add_term(const MultiIndex& alpha, Coeff c) {
  check_dim(*this, alpha);
  if (alpha.order() > K_ || c == Coeff{}) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coeff{}) terms_.erase(it);
  }
}

TruncatedSeries::Coeff TruncatedSeries::coeff(const MultiIndex& alpha) const {
  check_dim(*this, alpha);
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Coeff{} : it->second;
}

TruncatedSeries::Coeff TruncatedSeries::constant_term() const {
  return coeff(MultiIndex::zero(n_));
}

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b,
                         int K) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("multiply: dimension mismatch");
  }
  TruncatedSeries out(a.dim(), K);
  for (const auto& [alpha, ca] : a.terms()) {
    if (alpha.order() > K) break;
    for (const auto& [beta, cb] : b.terms()) {
      // Terms are graded, so every later beta is too large as well.
      if (alpha.order() + beta.order() > K) break;
      out.add_term(alpha + beta, ca * cb);
    }
  }
  return out;
}

TruncatedSeries power(const TruncatedSeries& a, int k, int K) {
  if (k < 0) throw std::invalid_argument("power: negative exponent");
  TruncatedSeries out = TruncatedSeries::constant(a.dim(), K, 1.0);
  for (int i = 0; i < k; ++i) out = multiply(out, a, K);
  return out;
}

TruncatedSeries homogeneous_part(const TruncatedSeries& a, int m) {
  if (m < 0 || m > a.degree()) {
    throw std::out_of_range("homogeneous_part: degree " + std::to_string(m) +
                            " outside [0, " + std::to_string(a.degree()) + "]");
  }
  TruncatedSeries out(a.dim(), a.degree());
  for (const auto& [alpha, c] : a.terms()) {
    if (alpha.order() == m) out.add_term(alpha, c);
  }
  return out;
}

TruncatedSeries cayley_of(const TruncatedSeries& phi, int K) {
  if (phi.constant_term() != TruncatedSeries::Coeff{}) {
    throw std::invalid_argument(
        "cayley_of: phi must vanish at the origin (f(0) = 1)");
  }
  TruncatedSeries out = TruncatedSeries::constant(phi.dim(), K, 1.0);
  TruncatedSeries phi_k = TruncatedSeries::constant(phi.dim(), K, 1.0);
  for (int k = 1; k <= K; ++k) {
    phi_k = multiply(phi_k, phi, K);
    if (phi_k.is_zero()) break;
    for (const auto& [alpha, c] : phi_k.terms()) out.add_term(alpha, 2.0 * c);
  }
  return out;
}

nlohmann::json series_to_json(const TruncatedSeries& s) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [alpha, c] : s.terms()) {
    terms.push_back({{"alpha", std::vector<int>(alpha.exponents().begin(),
                                                alpha.exponents().end())},
                     {"re", c.real()},
                     {"im", c.imag()}});
  }
  return {{"n", s.dim()}, {"K", s.degree()}, {"terms", std::move(terms)}};
}

TruncatedSeries series_from_json(const nlohmann::json& j) {
  TruncatedSeries s(j.at("n").get<std::size_t>(), j.at("K").get<int>());
  for (const auto& t : j.at("terms")) {
    s.add_term(MultiIndex(t.at("alpha").get<std::vector<int>>()),
               {t.at("re").get<double>(), t.at("im").get<double>()});
  }
  return s;
}

}  // namespace bohr
