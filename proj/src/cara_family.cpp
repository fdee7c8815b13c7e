#include "bohr/cara_family.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bohr/rng.hpp"

namespace bohr {

namespace {

using Complex = std::complex<double>;

nlohmann::json complex_json(Complex c) { return nlohmann::json::array({c.real(), c.imag()}); }

Complex complex_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json weights_json(const std::vector<Complex>& w) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : w) out.push_back(complex_json(c));
  return out;
}

std::vector<Complex> weights_from_json(const nlohmann::json& j) {
  std::vector<Complex> w;
  for (const auto& c : j) w.push_back(complex_from_json(c));
  return w;
}

TruncatedSeries linear_form(const std::vector<Complex>& w, int K) {
  TruncatedSeries phi(w.size(), K);
  for (std::size_t i = 0; i < w.size(); ++i) phi.add_term(MultiIndex::unit(w.size(), i), w[i]);
  return phi;
}

const TailModel& linear_tail_of(const TestFunction& f1d, const char* who) {
  if (f1d.dim() != 1) {
    throw std::invalid_argument(std::string(who) + ": inner function must be one-dimensional");
  }
  if (!f1d.tail || f1d.tail->inner.degree != 1) {
    throw std::invalid_argument(std::string(who) + ": inner function needs a linear tail model");
  }
  return *f1d.tail;
}

Complex outer_coeff(const TestFunction& f1d, int k) {
  return f1d.series.coeff(MultiIndex(std::vector<int>{k}));
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::extremal: return "extremal";
    case Provenance::cayley_linear: return "cayley_linear";
    case Provenance::power_sum_compose: return "power_sum_compose";
    case Provenance::mean_compose: return "mean_compose";
    case Provenance::random: return "random";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::extremal, Provenance::cayley_linear, Provenance::power_sum_compose,
                 Provenance::mean_compose, Provenance::random}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

double InnerMap::majorant(std::span<const double> x) const {
  if (x.size() != weights.size()) throw std::invalid_argument("InnerMap: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (weights[i] != Complex{}) s += std::abs(weights[i]) * std::pow(x[i], degree);
  }
  return s;
}

double InnerMap::majorant_sup(const LqBall& ball) const {
  std::vector<double> a;
  for (const auto& w : weights) a.push_back(std::abs(w));
  const double rd = std::pow(ball.scale, degree);
  if (ball.q.is_infinite()) {
    double s = 0.0;
    for (double v : a) s += v;
    return rd * s;
  }
  // With u_i = x_i^degree the constraint reads sum u_i^{q/degree} <= scale^q.
  const double ratio = ball.q.value() / degree;
  if (ratio <= 1.0) return rd * *std::max_element(a.begin(), a.end());
  return rd * lq_norm(a, QExponent(ratio).conjugate());
}

TestFunction halfplane_extremal(Complex zeta, int K) {
  if (std::abs(zeta) > 1.0) throw std::invalid_argument("halfplane_extremal: |zeta| > 1");
  TailModel tail{2.0, 1.0, InnerMap{{zeta}, 1}, K};
  return {cayley_of(linear_form({zeta}, K), K), Provenance::extremal,
          {{"zeta", complex_json(zeta)}, {"K", K}}, std::move(tail)};
}

TestFunction cayley_linear(std::vector<Complex> w, const LqBall& ball, int K) {
  if (w.size() != ball.n) throw std::invalid_argument("cayley_linear: weight length != n");
  std::vector<double> moduli;
  for (const auto& c : w) moduli.push_back(std::abs(c));
  const double dual = lq_norm(moduli, ball.q.conjugate());
  if (dual * ball.scale > 1.0 + 1e-12) {
    throw std::invalid_argument("cayley_linear: ||w||_{q'} exceeds 1/scale; phi leaves the disc");
  }
  TailModel tail{2.0, 1.0, InnerMap{w, 1}, K};
  nlohmann::json params{{"w", weights_json(w)},
                        {"n", ball.n},
                        {"q", ball.q.to_string()},
                        {"scale", ball.scale},
                        {"K", K}};
  return {cayley_of(linear_form(w, K), K), Provenance::cayley_linear, std::move(params),
          std::move(tail)};
}

TestFunction power_sum_compose(const TestFunction& f1d, int q, std::size_t n, int K,
                               double scale) {
  if (q < 1) throw std::invalid_argument("power_sum_compose: q must be a positive integer");
  if (!(scale > 0.0)) throw std::invalid_argument("power_sum_compose: scale must be positive");
  const TailModel& inner_tail = linear_tail_of(f1d, "power_sum_compose");

  const int outer_max = std::min(K / q, f1d.series.degree());
  TruncatedSeries u(n, K);
  for (int k = 0; k <= outer_max; ++k) {
    const Complex ck = outer_coeff(f1d, k) / std::pow(scale, q * k);
    if (ck == Complex{}) continue;
    for_each_index_of_order(n, k, [&](const MultiIndex& alpha) {
      u.add_term(alpha.scaled(q), ck * static_cast<double>(multinomial(alpha)));
    });
  }

  TailModel tail{inner_tail.coeff_bound,
                 inner_tail.outer_ratio * std::abs(inner_tail.inner.weights[0]),
                 InnerMap{std::vector<Complex>(n, Complex(std::pow(scale, -q))), q},
                 std::min(inner_tail.complete_through, K / q)};
  nlohmann::json params{
      {"f1d", descriptor(f1d)}, {"q", q}, {"n", n}, {"K", K}, {"scale", scale}};
  return {std::move(u), Provenance::power_sum_compose, std::move(params), std::move(tail)};
}

TestFunction mean_compose(const TestFunction& f1d, std::size_t n, int K, double scale) {
  if (n == 0) throw std::invalid_argument("mean_compose: n must be >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("mean_compose: scale must be positive");
  const TailModel& inner_tail = linear_tail_of(f1d, "mean_compose");

  const double denom = static_cast<double>(n) * scale;
  const int outer_max = std::min(K, f1d.series.degree());
  TruncatedSeries h(n, K);
  for (int k = 0; k <= outer_max; ++k) {
    const Complex ck = outer_coeff(f1d, k) / std::pow(denom, k);
    if (ck == Complex{}) continue;
    for_each_index_of_order(n, k, [&](const MultiIndex& alpha) {
      h.add_term(alpha, ck * static_cast<double>(multinomial(alpha)));
    });
  }

  TailModel tail{inner_tail.coeff_bound,
                 inner_tail.outer_ratio * std::abs(inner_tail.inner.weights[0]),
                 InnerMap{std::vector<Complex>(n, Complex(1.0 / denom)), 1},
                 std::min(inner_tail.complete_through, K)};
  nlohmann::json params{{"f1d", descriptor(f1d)}, {"n", n}, {"K", K}, {"scale", scale}};
  return {std::move(h), Provenance::mean_compose, std::move(params), std::move(tail)};
}

nlohmann::json descriptor(const TestFunction& f) {
  return {{"provenance", to_string(f.provenance)}, {"params", f.params}};
}

namespace {

TestFunction axis_extremal(const LqBall& ball, std::size_t axis, int K) {
  std::vector<Complex> w(ball.n, Complex{});
  w[axis] = 1.0 / ball.scale;
  TestFunction f = cayley_linear(std::move(w), ball, K);
  f.provenance = Provenance::extremal;
  f.params["axis"] = axis;
  f.params["zeta"] = complex_json(1.0);
  return f;
}

LqBall ball_from_params(const nlohmann::json& p) {
  return LqBall(p.at("n").get<std::size_t>(), QExponent::parse(p.at("q").get<std::string>()),
                p.at("scale").get<double>());
}

}  // namespace

TestFunction regenerate(const nlohmann::json& d) {
  const Provenance prov = provenance_from_string(d.at("provenance").get<std::string>());
  const auto& p = d.at("params");
  const int K = p.at("K").get<int>();
  switch (prov) {
    case Provenance::extremal:
      if (p.contains("axis")) {
        return axis_extremal(ball_from_params(p), p.at("axis").get<std::size_t>(), K);
      }
      return halfplane_extremal(complex_from_json(p.at("zeta")), K);
    case Provenance::cayley_linear:
    case Provenance::random: {
      TestFunction f = cayley_linear(weights_from_json(p.at("w")), ball_from_params(p), K);
      f.provenance = prov;
      f.params = p;
      return f;
    }
    case Provenance::power_sum_compose:
      return power_sum_compose(regenerate(p.at("f1d")), p.at("q").get<int>(),
                               p.at("n").get<std::size_t>(), K, p.at("scale").get<double>());
    case Provenance::mean_compose:
      return mean_compose(regenerate(p.at("f1d")), p.at("n").get<std::size_t>(), K,
                          p.at("scale").get<double>());
  }
  throw std::invalid_argument("regenerate: unhandled provenance");
}

void TestBattery::validate() const {
  if (functions.empty()) throw std::invalid_argument("TestBattery: empty battery");
  for (const auto& f : functions) {
    if (f.dim() != domain.n) throw std::invalid_argument("TestBattery: member dimension mismatch");
    if (f.series.degree() != K) throw std::invalid_argument("TestBattery: member degree mismatch");
  }
}

nlohmann::json TestBattery::manifest() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& f : functions) members.push_back(descriptor(f));
  return {{"n", domain.n},
          {"q", domain.q.to_string()},
          {"scale", domain.scale},
          {"K", K},
          {"seed", seed},
          {"members", std::move(members)}};
}

std::size_t default_battery_size(const LqBall& ball) {
  return ball.n + (ball.q.is_integer() ? 2 : 1) + kDefaultRandomMembers;
}

TestBattery random_battery(const LqBall& ball, std::size_t size, int K, std::uint64_t seed) {
  if (size == 0) throw std::invalid_argument("random_battery: size must be >= 1");
  TestBattery battery{{}, ball, K, seed};
  auto& fs = battery.functions;

  for (std::size_t i = 0; i < ball.n && fs.size() < size; ++i) {
    fs.push_back(axis_extremal(ball, i, K));
  }
  const TestFunction unit_extremal = halfplane_extremal(1.0, K);
  if (ball.q.is_integer() && fs.size() < size) {
    fs.push_back(power_sum_compose(unit_extremal, static_cast<int>(ball.q.value()), ball.n, K,
                                   ball.scale));
  }
  if (fs.size() < size) fs.push_back(mean_compose(unit_extremal, ball.n, K, ball.scale));

  SeededStream rng(seed);
  const QExponent dual = ball.q.conjugate();
  for (std::size_t draw = 0; fs.size() < size; ++draw) {
    std::vector<Complex> w(ball.n);
    std::vector<double> moduli(ball.n);
    for (std::size_t i = 0; i < ball.n; ++i) {
      moduli[i] = rng.uniform(0.05, 1.0);
      w[i] = std::polar(moduli[i], rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    // Land on the boundary ||w||_{q'} = 1/scale, where the constraint is tightest.
    const double norm = lq_norm(moduli, dual) * ball.scale;
    for (auto& c : w) c /= norm;
    TestFunction f = cayley_linear(std::move(w), ball, K);
    f.provenance = Provenance::random;
    f.params["seed"] = seed;
    f.params["draw"] = draw;
    fs.push_back(std::move(f));
  }
  return battery;
}

TestBattery default_battery(const LqBall& ball, int K, std::uint64_t seed) {
  return random_battery(ball, default_battery_size(ball), K, seed);
}

}  // namespace bohr
