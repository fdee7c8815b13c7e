#include "bohr/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bohr/catalog.hpp"
#include "bohr/engine.hpp"
#include "bohr/rng.hpp"

namespace bohr::cli {

namespace {

constexpr double kEstimateSlack = 1e-5;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("not a nonnegative integer: '" + s + "'");
  }
  return static_cast<std::size_t>(std::stoull(s));
}

QExponent parse_q(const std::string& s) {
  try {
    return QExponent::parse(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

QExponent q_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_q(j.get<std::string>());
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!(v >= 1.0)) throw ConfigError("q must lie in [1, inf]");
    return std::isinf(v) ? QExponent::infinity() : QExponent(v);
  }
  throw ConfigError("q must be a number or \"inf\"");
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool has_all_axis_extremals(const TestBattery& b) {
  return b.size() >= b.domain.n &&
         std::all_of(b.functions.begin(), b.functions.begin() + static_cast<std::ptrdiff_t>(b.domain.n),
                     [](const TestFunction& f) { return f.provenance == Provenance::extremal; });
}

bool has_provenance(const TestBattery& b, Provenance p) {
  return std::any_of(b.functions.begin(), b.functions.end(),
                     [p](const TestFunction& f) { return f.provenance == p; });
}

ResultRow base_row(const RunConfig& cfg, std::string quantity, double p, QExponent q,
                   std::size_t n) {
  ResultRow r;
  r.quantity = std::move(quantity);
  r.p = p;
  r.q = q.to_string();
  r.n = n;
  r.seed = cfg.seed;
  return r;
}

ResultRow catalog_row(const RunConfig& cfg, const BoundRecord& rec, double p, QExponent q,
                      std::size_t n) {
  ResultRow r = base_row(cfg, rec.name, p, q, n);
  r.bound_kind = to_string(rec.kind);
  r.value = rec.value;
  r.note = "source=" + rec.source + "; valid " + rec.validity;
  if (!rec.note.empty()) r.note += "; " + rec.note;
  return r;
}

std::string flags_note(bool unconstrained, bool tail_bounded, bool converged) {
  std::vector<std::string> parts;
  if (unconstrained) parts.emplace_back("unconstrained");
  parts.emplace_back(tail_bounded ? "tail bounded" : "truncated");
  if (!converged) parts.emplace_back("search not converged");
  std::string out;
  for (const auto& s : parts) out += (out.empty() ? "" : "; ") + s;
  return out;
}

ResultRow radius_row(const RunConfig& cfg, const RadiusInterval& ri, const TestBattery& battery,
                     double p) {
  ResultRow r = base_row(cfg, "radius_estimate", p, battery.domain.q, battery.domain.n);
  r.K = ri.K;
  r.bound_kind = to_string(ri.kind);
  r.value = ri.midpoint();
  r.lo = ri.lo;
  r.hi = ri.hi;
  r.note = flags_note(ri.unconstrained, ri.tail_bounded, ri.converged) +
           "; witness " + std::to_string(ri.witness) + "; " + std::to_string(ri.evaluations) +
           " evaluations";
  r.manifest = battery.manifest();
  return r;
}

ResultRow arith_row(const RunConfig& cfg, const ArithEstimate& ae, const TestBattery& battery,
                    double p) {
  ResultRow r = base_row(cfg, "arith_estimate", p, battery.domain.q, battery.domain.n);
  r.K = battery.K;
  r.bound_kind = to_string(ae.kind);
  r.value = ae.value;
  std::string vec;
  for (double v : ae.r_vec) vec += (vec.empty() ? "" : " ") + format_number(v);
  r.note = flags_note(ae.unconstrained, ae.tail_bounded, true) + "; r=(" + vec + ")";
  r.manifest = battery.manifest();
  return r;
}

struct RadiusRun {
  TestBattery battery;
  RadiusInterval interval;
};

RadiusRun run_radius(const RunConfig& cfg, double p, const LqBall& ball) {
  RunConfig local = cfg;
  local.n = ball.n;
  TestBattery battery = make_battery(local, ball);
  RadiusInterval ri = radius_solve(battery, {p}, ball, local.resolved_tol());
  return {std::move(battery), std::move(ri)};
}

// Compares a radius estimate with the catalog. Lower and exact records must
// not exceed the estimate. When every axis extremal is present the estimate
// is pinned at or below the disc value, which no catalog upper undercuts.
void check_radius(Report& rep, const RadiusInterval& ri, const TestBattery& battery, double tol) {
  if (!(ri.lo <= ri.hi)) rep.fail(ExitCode::numeric_inconsistency, "radius bracket inverted");
  const bool uppers = has_all_axis_extremals(battery);
  for (const auto& rec : ri.catalog) {
    if (rec.kind == BoundKind::asymptotic) continue;
    if ((rec.kind == BoundKind::lower || rec.kind == BoundKind::exact) && ri.hi + tol < rec.value) {
      rep.fail(ExitCode::numeric_inconsistency,
               "radius estimate " + format_number(ri.hi) + " below " + rec.name + " = " +
                   format_number(rec.value));
    }
    if (uppers && (rec.kind == BoundKind::upper || rec.kind == BoundKind::exact) &&
        ri.lo > rec.value + tol) {
      rep.fail(ExitCode::numeric_inconsistency,
               "radius estimate " + format_number(ri.lo) + " above " + rec.name + " = " +
                   format_number(rec.value));
    }
  }
}

BoundPair arith_catalog(double p, QExponent q, std::size_t n) {
  return q.is_infinite() ? arith_polydisc_bounds(p, n) : arith_ball_bounds(p, q, n);
}

// Rows and checks for the arithmetic radius at one parameter point.
void arith_block(Report& rep, const RunConfig& cfg, double p, const LqBall& ball) {
  const RadiusRun rr = run_radius(cfg, p, ball);
  ArithOptions opts;
  opts.seed ^= cfg.seed;
  const ArithEstimate ae = arith_bohr_estimate(rr.battery, {p}, opts);
  const std::size_t n = ball.n;
  const QExponent q = ball.q;

  rep.rows.push_back(arith_row(cfg, ae, rr.battery, p));
  rep.rows.push_back(radius_row(cfg, rr.interval, rr.battery, p));
  const double relation = arith_from_radius(rr.interval.lo, n, q);
  ResultRow rel = base_row(cfg, "arith_from_radius", p, q, n);
  rel.K = rr.battery.K;
  rel.bound_kind = to_string(EstimateKind::upper_estimate);
  rel.value = relation;
  rel.note = "radius_estimate.lo / n^(1/q)";
  rep.rows.push_back(rel);

  const BoundPair bounds = arith_catalog(p, q, n);
  rep.rows.push_back(catalog_row(cfg, bounds.lower, p, q, n));
  rep.rows.push_back(catalog_row(cfg, bounds.upper, p, q, n));

  if (ae.value < bounds.lower.value - kEstimateSlack) {
    rep.fail(ExitCode::numeric_inconsistency, "arithmetic estimate below " + bounds.lower.name);
  }
  if (ae.value < relation - kEstimateSlack) {
    rep.fail(ExitCode::numeric_inconsistency,
             "arithmetic estimate below radius_estimate / n^(1/q)");
  }
  // The upper bounds are attained by the composed members of the battery.
  const bool witnessed = q.is_infinite() ? has_provenance(rr.battery, Provenance::mean_compose)
                                         : has_provenance(rr.battery, Provenance::power_sum_compose);
  if (witnessed && ae.value > bounds.upper.value + kEstimateSlack) {
    rep.fail(ExitCode::numeric_inconsistency, "arithmetic estimate above " + bounds.upper.name);
  }
}

ResultRow check_row(const RunConfig& cfg, const std::string& name, double p, QExponent q,
                    std::size_t n, double value, bool pass, const std::string& detail) {
  ResultRow r = base_row(cfg, "verify_" + name, p, q, n);
  r.bound_kind = "check";
  r.value = value;
  r.note = pass ? "pass" : "FAIL";
  if (!detail.empty()) r.note += "; " + detail;
  return r;
}

void record_check(Report& rep, ResultRow row, bool pass) {
  if (!pass) rep.fail(ExitCode::verification_failure, row.quantity + " failed at p=" +
                                                          format_number(row.p) + " q=" + row.q +
                                                          " n=" + std::to_string(row.n));
  rep.rows.push_back(std::move(row));
}

void verify_sandwich(Report& rep, const RunConfig& cfg) {
  for (double p : {1.0, 2.0}) {
    for (double qv : {1.0, 2.0}) {
      const QExponent q(qv);
      for (std::size_t n = 1; n <= 3; ++n) {
        const BoundPair pairs[] = {arith_ball_bounds(p, q, n), radius_ball_bounds(p, q, n),
                                   arith_polydisc_bounds(p, n)};
        for (const auto& b : pairs) {
          const double gap = b.upper.value - b.lower.value;
          const bool pass = gap >= -1e-12 * b.upper.value;
          record_check(rep, check_row(cfg, "sandwich", p, q, n, gap, pass,
                                      b.lower.name + " <= " + b.upper.name),
                       pass);
        }
        if (n > cfg.engine_max_n) continue;
        const RadiusRun rr = run_radius(cfg, p, LqBall(n, q));
        const BoundPair rb = pairs[1];
        const double above = rr.interval.lo - rb.upper.value;
        const double below = rb.lower.value - rr.interval.hi;
        const bool pass = above <= kEstimateSlack && below <= kEstimateSlack;
        record_check(rep, check_row(cfg, "sandwich_engine", p, q, n, std::max(above, below), pass,
                                    "radius estimate within radius_ball bounds"),
                     pass);
      }
    }
  }
}

void verify_scaling(Report& rep, const RunConfig& cfg) {
  for (double p : {1.0, 2.0}) {
    for (const char* qs : {"1", "2", "inf"}) {
      const LqBall ball(2, QExponent::parse(qs));
      const int K = cfg.K.value_or(12);
      ArithOptions opts;
      opts.seed ^= cfg.seed;
      const double base = arith_bohr_estimate(default_battery(ball, K, cfg.seed), {p}, opts).value;
      for (double t : {0.5, 2.0}) {
        const double scaled =
            arith_bohr_estimate(default_battery(ball.scaled(t), K, cfg.seed), {p}, opts).value;
        const double err = std::abs(scaled - t * base);
        const bool pass = err <= 1e-6;
        record_check(rep, check_row(cfg, "scaling", p, ball.q, 2, err, pass,
                                    "t=" + short_number(t)),
                     pass);
      }
    }
  }
}

void verify_monotone(Report& rep, const RunConfig& cfg) {
  const std::pair<std::size_t, const char*> shapes[] = {{2, "2"}, {3, "1"}, {2, "inf"}};
  for (double p : {1.0, 2.0}) {
    for (const auto& [n, qs] : shapes) {
      const LqBall ball(n, QExponent::parse(qs));
      const int K = cfg.K.value_or(12);
      const TestBattery full = default_battery(ball, K, cfg.seed);
      const PreparedBattery prepared(full, {p});

      double origin_err = 0.0;
      const std::vector<double> zero(n, 0.0);
      for (const auto& m : prepared.members) {
        origin_err = std::max(origin_err, std::abs(bohr_sum_vector(m, zero).value - 0.5));
      }
      record_check(rep, check_row(cfg, "origin", p, ball.q, n, origin_err, origin_err == 0.0,
                                  "Bohr sum at r = 0 is 1/2"),
                   origin_err == 0.0);

      SeededStream rng(cfg.seed, 0x6d6f6eULL);
      double worst = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> r(n);
        for (double& v : r) v = rng.uniform(0.0, 0.4);
        for (const auto& m : prepared.members) {
          const double base = bohr_sum_vector(m, r).value;
          for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> bumped = r;
            bumped[i] += rng.uniform(0.0, 0.05);
            const double v = bohr_sum_vector(m, bumped).value;
            if (!std::isinf(base)) worst = std::min(worst, v - base);
          }
        }
      }
      record_check(rep, check_row(cfg, "monotone_vector", p, ball.q, n, worst, worst >= -1e-12,
                                  "componentwise"),
                   worst >= -1e-12);

      double prev = 0.0;
      double drop = 0.0;
      for (int k = 0; k <= 8; ++k) {
        const double v = class_sup(prepared, 0.05 * k, ball).value;
        if (k > 0) drop = std::min(drop, v - prev);
        prev = v;
      }
      record_check(rep, check_row(cfg, "monotone_class_sup", p, ball.q, n, drop, drop >= -1e-12,
                                  "scalar radius"),
                   drop >= -1e-12);

      const TestBattery sub = random_battery(ball, n + 1, K, cfg.seed);
      ArithOptions opts;
      opts.seed ^= cfg.seed;
      const double a_sub = arith_bohr_estimate(sub, {p}, opts).value;
      const double a_full = arith_bohr_estimate(full, {p}, opts).value;
      const bool a_pass = a_full <= a_sub + 1e-9;
      record_check(rep, check_row(cfg, "monotone_battery_arith", p, ball.q, n, a_sub - a_full,
                                  a_pass, "superset battery never raises the estimate"),
                   a_pass);
      const double tol = cfg.resolved_tol();
      const double r_sub = radius_solve(sub, {p}, ball, tol).lo;
      const double r_full = radius_solve(full, {p}, ball, tol).lo;
      record_check(rep, check_row(cfg, "monotone_battery_radius", p, ball.q, n, r_sub - r_full,
                                  r_full <= r_sub, "superset battery never raises lo"),
                   r_full <= r_sub);
    }
  }
}

void verify_homogeneous(Report& rep, const RunConfig& cfg) {
  for (double p : {1.0, 2.0}) {
    const BohrParams params{p};
    {
      const LqBall disc(1, QExponent(1.0));
      const TestBattery b{{halfplane_extremal(1.0, 30)}, disc, 30, cfg.seed};
      const auto blocks = homogeneous_blocks(b);
      const std::vector<double> r{max_homogeneous_scale(blocks, std::vector<double>{1.0}, p)};
      const auto report = homogeneous_scaling_check(blocks, r, params, b);
      record_check(rep, check_row(cfg, "homogeneous_scaling", p, disc.q, 1, report.slack,
                                  report.accepted && report.passed, "slack = 1 - max Bohr sum"),
                   report.accepted && report.passed);
    }
    for (const char* qs : {"2", "inf"}) {
      const LqBall ball(2, QExponent::parse(qs));
      const TestBattery b = default_battery(ball, cfg.K.value_or(12), cfg.seed);
      const auto blocks = homogeneous_blocks(b);
      for (const auto& d : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.8, 0.2},
                            std::vector<double>{0.3, 0.7}}) {
        const double s = max_homogeneous_scale(blocks, d, p);
        const std::vector<double> r{s * d[0], s * d[1]};
        const auto report = homogeneous_scaling_check(blocks, r, params, b);
        const bool pass = report.accepted && report.passed;
        record_check(rep, check_row(cfg, "homogeneous_scaling", p, ball.q, 2, report.slack, pass,
                                    "direction (" + short_number(d[0]) + " " +
                                        short_number(d[1]) + ")"),
                     pass);
      }
    }
  }
}

std::vector<ResultRow> table_cell(const RunConfig& cfg, double p, QExponent q, std::size_t n) {
  Report rep;
  const LqBall ball(n, q);
  if (n >= 2) {
    const BoundedClassBounds kb = bounded_radius_bounds(n, q, cfg.c);
    rep.rows.push_back(catalog_row(cfg, kb.lower, p, q, n));
    rep.rows.push_back(catalog_row(cfg, kb.upper, p, q, n));
    if (kb.log_lower) rep.rows.push_back(catalog_row(cfg, *kb.log_lower, p, q, n));
  }
  for (const auto& rec : radius_catalog(p, ball)) rep.rows.push_back(catalog_row(cfg, rec, p, q, n));
  if (n <= cfg.engine_max_n) {
    arith_block(rep, cfg, p, ball);
  } else {
    const BoundPair bounds = arith_catalog(p, q, n);
    rep.rows.push_back(catalog_row(cfg, bounds.lower, p, q, n));
    rep.rows.push_back(catalog_row(cfg, bounds.upper, p, q, n));
  }
  for (const auto& m : rep.messages) {
    ResultRow r = base_row(cfg, "inconsistency", p, q, n);
    r.bound_kind = "check";
    r.note = m;
    rep.rows.push_back(std::move(r));
  }
  return rep.rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  if (!(p >= 1.0) || std::isinf(p)) throw ConfigError("p must lie in [1, inf)");
  if (n < 1) throw ConfigError("n must be >= 1");
  if (K && *K < 1) throw ConfigError("K must be >= 1");
  if (tol && !(*tol > 0.0)) throw ConfigError("tol must be positive");
  if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
  if (battery != "default" && battery != "axis") {
    if (parse_count(battery) == 0) throw ConfigError("battery size must be >= 1");
  }
  static const char* const suites[] = {"prop21", "homogeneous", "scaling", "monotone", "sandwich", "all"};
  if (std::find(std::begin(suites), std::end(suites), suite) == std::end(suites)) {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  if (c && !(*c > 0.0)) throw ConfigError("c must be positive");
  if (grid) {
    for (double v : grid->p) {
      if (!(v >= 1.0) || std::isinf(v)) throw ConfigError("grid p must lie in [1, inf)");
    }
    for (std::size_t v : grid->n) {
      if (v < 1) throw ConfigError("grid n must be >= 1");
    }
  }
}

int RunConfig::resolved_K() const { return K.value_or(n == 1 ? 30 : 12); }

double RunConfig::resolved_tol() const { return tol.value_or(n == 1 ? 1e-9 : 1e-6); }

RunConfig config_from_json(const nlohmann::json& j, RunConfig base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") base.command = v.get<std::string>();
      else if (key == "p") base.p = v.get<double>();
      else if (key == "q") base.q = q_from_json(v);
      else if (key == "n") base.n = v.get<std::size_t>();
      else if (key == "K") base.K = v.get<int>();
      else if (key == "tol") base.tol = v.get<double>();
      else if (key == "seed") base.seed = v.get<std::uint64_t>();
      else if (key == "battery") base.battery = v.is_number() ? std::to_string(v.get<std::size_t>()) : v.get<std::string>();
      else if (key == "format") base.format = v.get<std::string>();
      else if (key == "out") base.out = v.get<std::string>();
      else if (key == "suite") base.suite = v.get<std::string>();
      else if (key == "c") base.c = v.get<double>();
      else if (key == "engine_max_n") base.engine_max_n = v.get<std::size_t>();
      else if (key == "grid") {
        Grid g;
        for (const auto& x : v.at("p")) g.p.push_back(x.get<double>());
        for (const auto& x : v.at("q")) g.q.push_back(q_from_json(x));
        for (const auto& x : v.at("n")) g.n.push_back(x.get<std::size_t>());
        base.grid = std::move(g);
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return base;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_commas(text)) out.push_back(parse_real(s));
  return out;
}

std::vector<QExponent> parse_q_list(const std::string& text) {
  std::vector<QExponent> out;
  for (const auto& s : split_commas(text)) out.push_back(parse_q(s));
  return out;
}

std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split_commas(text)) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(s));
      continue;
    }
    const std::size_t a = parse_count(trim(s.substr(0, dots)));
    const std::size_t b = parse_count(trim(s.substr(dots + 2)));
    if (b < a) throw ConfigError("empty range '" + s + "'");
    for (std::size_t v = a; v <= b; ++v) out.push_back(v);
  }
  return out;
}

TestBattery make_battery(const RunConfig& cfg, const LqBall& ball) {
  const int K = cfg.resolved_K();
  if (cfg.battery == "default") return default_battery(ball, K, cfg.seed);
  if (cfg.battery == "axis") return random_battery(ball, ball.n, K, cfg.seed);
  return random_battery(ball, parse_count(cfg.battery), K, cfg.seed);
}

void Report::fail(ExitCode code, std::string message) {
  if (status == ExitCode::ok) status = code;
  messages.push_back(std::move(message));
}

// ---------------------------------------------------------------------------
// Output

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.quantity) << ',' << format_number(r.p) << ',' << r.q << ',' << r.n << ','
       << (r.K ? std::to_string(*r.K) : "") << ',' << r.seed << ',' << csv_field(r.bound_kind)
       << ',' << opt_number(r.value) << ',' << opt_number(r.lo) << ',' << opt_number(r.hi) << ','
       << csv_field(r.note) << '\n';
  }
}

void write_json(const std::vector<ResultRow>& rows, std::ostream& os) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return format_number(v);
  };
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json rec{{"quantity", r.quantity}, {"p", r.p},     {"q", r.q},
                       {"n", r.n},               {"seed", r.seed}, {"bound_kind", r.bound_kind},
                       {"note", r.note}};
    rec["K"] = r.K ? nlohmann::json(*r.K) : nlohmann::json(nullptr);
    if (r.value) rec["value"] = number(*r.value);
    if (r.lo && r.hi) rec["interval"] = {{"lo", number(*r.lo)}, {"hi", number(*r.hi)}};
    if (!r.manifest.is_null()) rec["battery_manifest"] = r.manifest;
    out.push_back(std::move(rec));
  }
  os << out.dump(2) << '\n';
}

void emit(const Report& report, const RunConfig& cfg, std::ostream& fallback) {
  auto write = [&](std::ostream& os) {
    if (cfg.format == "json") {
      write_json(report.rows, os);
    } else {
      write_csv(report.rows, os);
    }
  };
  if (cfg.out.empty()) {
    write(fallback);
    if (!fallback) throw IoError("cannot write output");
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + cfg.out + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("write to '" + cfg.out + "' failed");
}

// ---------------------------------------------------------------------------
// Commands

Report cmd_radius1d(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  const LqBall disc(1, QExponent(1.0));
  const int K = cfg.K.value_or(30);
  const double tol = cfg.tol.value_or(1e-9);
  const TestBattery battery{{halfplane_extremal(1.0, K)}, disc, K, cfg.seed};
  const RadiusInterval ri = radius_solve(battery, {cfg.p}, disc, tol);
  const double exact = disc_radius(cfg.p);
  const double gap = std::abs(ri.midpoint() - exact);

  rep.rows.push_back(radius_row(cfg, ri, battery, cfg.p));
  ResultRow closed = base_row(cfg, "disc_radius", cfg.p, disc.q, 1);
  closed.bound_kind = to_string(BoundKind::exact);
  closed.value = exact;
  closed.note = "closed form ((2^p - 1)/(2^(p+1) - 1))^(1/p)";
  rep.rows.push_back(closed);
  ResultRow g = base_row(cfg, "gap", cfg.p, disc.q, 1);
  g.K = K;
  g.bound_kind = "check";
  g.value = gap;
  g.note = gap <= tol ? "within tol" : "exceeds tol";
  rep.rows.push_back(g);
  if (gap > tol) {
    rep.fail(ExitCode::numeric_inconsistency,
             "bisection misses the closed form by " + format_number(gap));
  }
  return rep;
}

Report cmd_radius(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.n == 1) return cmd_radius1d(cfg);
  Report rep;
  const LqBall ball(cfg.n, cfg.q);
  const RadiusRun rr = run_radius(cfg, cfg.p, ball);
  rep.rows.push_back(radius_row(cfg, rr.interval, rr.battery, cfg.p));
  for (const auto& rec : rr.interval.catalog) {
    rep.rows.push_back(catalog_row(cfg, rec, cfg.p, cfg.q, cfg.n));
  }
  check_radius(rep, rr.interval, rr.battery, cfg.resolved_tol());
  return rep;
}

Report cmd_arith(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  arith_block(rep, cfg, cfg.p, LqBall(cfg.n, cfg.q));
  return rep;
}

Report cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  Report rep;
  const std::string& s = cfg.suite;
  const bool all = s == "all";
  if (all || s == "prop21" || s == "homogeneous") verify_homogeneous(rep, cfg);
  if (all || s == "scaling") verify_scaling(rep, cfg);
  if (all || s == "monotone") verify_monotone(rep, cfg);
  if (all || s == "sandwich") verify_sandwich(rep, cfg);
  return rep;
}

Report cmd_table(const RunConfig& cfg) {
  cfg.validate();
  const Grid grid = cfg.grid.value_or(Grid{{cfg.p}, {cfg.q}, {cfg.n}});
  struct Cell {
    double p;
    QExponent q;
    std::size_t n;
  };
  std::vector<Cell> cells;
  for (double p : grid.p) {
    for (const auto& q : grid.q) {
      for (std::size_t n : grid.n) cells.push_back({p, q, n});
    }
  }
  std::vector<std::vector<ResultRow>> slots(cells.size());
  const int count = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    const auto& c = cells[static_cast<std::size_t>(i)];
    RunConfig local = cfg;
    local.n = c.n;
    slots[static_cast<std::size_t>(i)] = table_cell(local, c.p, c.q, c.n);
  }
  Report rep;
  for (auto& s : slots) {
    for (auto& r : s) {
      if (r.quantity == "inconsistency") rep.fail(ExitCode::numeric_inconsistency, r.note);
      rep.rows.push_back(std::move(r));
    }
  }
  return rep;
}

Report dispatch(const RunConfig& cfg) {
  if (cfg.command == "radius1d") return cmd_radius1d(cfg);
  if (cfg.command == "radius") return cmd_radius(cfg);
  if (cfg.command == "arith") return cmd_arith(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  if (cfg.command == "table") return cmd_table(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

// ---------------------------------------------------------------------------
// Entry point

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bohrlab: p-Bohr radii of the Caratheodory class on l_q balls"};
  app.require_subcommand(1);

  std::string p, q, n, K, tol, seed, battery, format, out_path, config, suite, c, engine_max_n;
  std::string grid_p, grid_q, grid_n;
  std::vector<std::pair<CLI::Option*, std::string*>> given;

  auto common = [&](CLI::App* sub) {
    auto add = [&](const char* flag, std::string& target, const char* help) {
      given.emplace_back(sub->add_option(flag, target, help), &target);
    };
    add("--p", p, "Bohr exponent p >= 1");
    add("--q", q, "ball exponent q in [1, inf], spelled inf for the polydisc");
    add("--n", n, "dimension");
    add("--K", K, "truncation degree");
    add("--tol", tol, "bisection tolerance");
    add("--seed", seed, "battery seed");
    add("--battery", battery, "default | axis | member count");
    add("--format", format, "csv | json");
    add("--out", out_path, "output file (stdout if absent)");
    add("--config", config, "JSON config merged under the flags");
    add("--c", c, "constant of the logarithmic lower bound");
    add("--engine-max-n", engine_max_n, "largest n evaluated by the engine in tables");
  };
  std::vector<CLI::App*> subs;
  subs.push_back(app.add_subcommand("radius1d", "disc radius by bisection vs closed form"));
  subs.push_back(app.add_subcommand("radius", "battery radius of an l_q ball with catalog bounds"));
  subs.push_back(app.add_subcommand("arith", "arithmetic radius estimate with catalog bounds"));
  subs.push_back(app.add_subcommand("verify", "invariant suites"));
  subs.push_back(app.add_subcommand("table", "catalog and estimate table over a grid"));
  for (auto* s : subs) common(s);
  given.emplace_back(subs[3]->add_option("--suite", suite, "prop21 | scaling | monotone | sandwich | all"), &suite);
  given.emplace_back(subs[4]->add_option("--grid-p", grid_p, "comma list of p"), &grid_p);
  given.emplace_back(subs[4]->add_option("--grid-q", grid_q, "comma list of q"), &grid_q);
  given.emplace_back(subs[4]->add_option("--grid-n", grid_n, "comma list of n, ranges a..b"), &grid_n);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::bad_config);
  }

  auto is_given = [&](const std::string* target) {
    for (const auto& [opt, t] : given) {
      if (t == target && opt->count() > 0) return true;
    }
    return false;
  };

  RunConfig cfg;
  try {
    if (is_given(&config)) {
      std::ifstream in(config);
      if (!in) throw ConfigError("cannot read config '" + config + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
      cfg = config_from_json(j, cfg);
    }
    for (auto* s : subs) {
      if (s->parsed()) cfg.command = s->get_name();
    }
    if (is_given(&p)) cfg.p = parse_real(p);
    if (is_given(&q)) cfg.q = parse_q(q);
    if (is_given(&n)) cfg.n = parse_count(n);
    if (is_given(&K)) cfg.K = static_cast<int>(parse_count(K));
    if (is_given(&tol)) cfg.tol = parse_real(tol);
    if (is_given(&seed)) cfg.seed = parse_count(seed);
    if (is_given(&battery)) cfg.battery = battery;
    if (is_given(&format)) cfg.format = format;
    if (is_given(&out_path)) cfg.out = out_path;
    if (is_given(&suite)) cfg.suite = suite;
    if (is_given(&c)) cfg.c = parse_real(c);
    if (is_given(&engine_max_n)) cfg.engine_max_n = parse_count(engine_max_n);
    if (is_given(&grid_p) || is_given(&grid_q) || is_given(&grid_n)) {
      Grid g = cfg.grid.value_or(Grid{{cfg.p}, {cfg.q}, {cfg.n}});
      if (is_given(&grid_p)) g.p = parse_real_list(grid_p);
      if (is_given(&grid_q)) g.q = parse_q_list(grid_q);
      if (is_given(&grid_n)) g.n = parse_n_list(grid_n);
      cfg.grid = std::move(g);
    }
    cfg.validate();

    const Report report = dispatch(cfg);
    emit(report, cfg, out);
    for (const auto& m : report.messages) err << m << '\n';
    return static_cast<int>(report.status);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::bad_config);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::io_error);
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return static_cast<int>(ExitCode::bad_config);
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numeric_inconsistency);
  }
}

}  // namespace bohr::cli
