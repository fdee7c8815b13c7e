#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohr/cara_family.hpp"
#include "bohr/domains.hpp"

namespace bohr::cli {

enum class ExitCode : int {
  ok = 0,
  verification_failure = 1,
  bad_config = 2,
  numeric_inconsistency = 3,
  io_error = 4,
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter grid for the table command; cells run p-major, n fastest.
struct Grid {
  std::vector<double> p;
  std::vector<QExponent> q;
  std::vector<std::size_t> n;
};

struct RunConfig {
  std::string command;
  double p = 1.0;
  QExponent q = QExponent::infinity();
  std::size_t n = 1;
  std::optional<int> K;       // 30 in one dimension, 12 otherwise
  std::optional<double> tol;  // 1e-9 in one dimension, 1e-6 otherwise
  std::uint64_t seed = 1;
  std::string battery = "default";  // default | axis | member count
  std::string format = "csv";
  std::string out;  // empty writes to stdout
  std::string suite = "all";
  std::optional<double> c;  // constant of the logarithmic lower bound
  std::size_t engine_max_n = 3;
  std::optional<Grid> grid;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;
  int resolved_K() const;
  double resolved_tol() const;
};

/// Overlays the keys present in j onto base. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

std::vector<double> parse_real_list(const std::string& text);
std::vector<QExponent> parse_q_list(const std::string& text);
/// Comma list of integers and inclusive ranges "a..b".
std::vector<std::size_t> parse_n_list(const std::string& text);

/// Builds the battery named by cfg.battery on ball.
TestBattery make_battery(const RunConfig& cfg, const LqBall& ball);

struct ResultRow {
  std::string quantity;
  double p = 1.0;
  std::string q;
  std::size_t n = 1;
  std::optional<int> K;
  std::uint64_t seed = 0;
  std::string bound_kind;
  std::optional<double> value;
  std::optional<double> lo;
  std::optional<double> hi;
  std::string note;
  nlohmann::json manifest;  // null unless a battery was evaluated
};

struct Report {
  std::vector<ResultRow> rows;
  ExitCode status = ExitCode::ok;
  std::vector<std::string> messages;

  /// Records a problem; the first failure code sticks.
  void fail(ExitCode code, std::string message);
};

inline constexpr const char* kCsvHeader = "quantity,p,q,n,K,seed,bound_kind,value,lo,hi,note";

std::string format_number(double v);
void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_json(const std::vector<ResultRow>& rows, std::ostream& os);

Report cmd_radius1d(const RunConfig& cfg);
Report cmd_radius(const RunConfig& cfg);
Report cmd_arith(const RunConfig& cfg);
Report cmd_verify(const RunConfig& cfg);
Report cmd_table(const RunConfig& cfg);

Report dispatch(const RunConfig& cfg);

/// Writes the report in cfg.format to cfg.out, or to `fallback` when no path
/// is set. Throws IoError.
void emit(const Report& report, const RunConfig& cfg, std::ostream& fallback);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bohr::cli
