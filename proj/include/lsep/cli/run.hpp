#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lsep::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Rs, Rsb, Simulate, Rate, OfdmCheck, Sweep };
enum class Format { Csv, Json };

std::string command_name(Command c);

struct RunConfig {
  Command command = Command::Rs;
  std::string constraint = "none";
  double alpha_start = 1.0;
  double alpha_stop = 1.0;
  int alpha_steps = 1;
  double gamma = 1.0;
  double lambda = 0.0;
  double sigma_u2 = 1.0;
  double sigma_n2 = 0.0;
  /// Per-antenna average power to pin (lambda becomes free).
  std::optional<double> q;
  /// Peak-to-average ratio in dB; with q it turns the constraint into disk:q 10^(papr/10).
  std::optional<double> papr_db;
  int K = 0;
  int N = 0;
  int L = 32;
  int trials = 50;
  std::uint64_t seed = 1;
  int nodes = 40;
  double tol = 1e-10;
  double gamma_lo = 1e-2;
  double gamma_hi = 1e2;
  /// sweep: also solve 1-RSB.
  bool with_rsb = false;
  /// 0: hardware default.
  unsigned threads = 0;
  std::string output;
  Format format = Format::Csv;

  std::vector<double> alphas() const;
  /// Throws InvalidArgument with an actionable message.
  void validate() const;
};

/// Parses argv. Values from --config are applied first; explicit flags override them.
/// Returns nullopt after printing help or version.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Loads the JSON config schema (keys match the long flag names with '_' for '-').
RunConfig config_from_json(const std::string& text, RunConfig base = {});

/// One output row; unset optionals are written as empty fields.
struct Row {
  double alpha = 0.0;
  std::optional<double> q, chi, d_linear, p1, mu1, eta1, emp_mean, emp_stderr, rate_bits, gamma_opt, lambda;
  bool converged = false;
  std::string note;
};

/// Computes one row per alpha value. Rows come back in axis order.
std::vector<Row> compute_rows(const RunConfig& cfg);

std::string format_csv(const RunConfig& cfg, const std::vector<Row>& rows);
std::string format_json(const RunConfig& cfg, const std::vector<Row>& rows);

/// Runs the command and writes the result to cfg.output (stdout when empty).
/// Returns the process exit status.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// argv entry point: parse, validate, run. Config errors exit with 2.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lsep::cli
