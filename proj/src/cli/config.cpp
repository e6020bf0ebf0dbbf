#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsep/cli/run.hpp"
#include "lsep/error.hpp"
#include "lsep/model/constraint_set.hpp"

namespace lsep::cli {
namespace {

Command parse_command(const std::string& s) {
  if (s == "rs") return Command::Rs;
  if (s == "rsb") return Command::Rsb;
  if (s == "simulate") return Command::Simulate;
  if (s == "rate") return Command::Rate;
  if (s == "ofdm-check") return Command::OfdmCheck;
  if (s == "sweep") return Command::Sweep;
  throw InvalidArgument("unknown command '" + s + "' (expected rs, rsb, simulate, rate, ofdm-check or sweep)");
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw InvalidArgument("unknown format '" + s + "' (expected csv or json)");
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::Rs: return "rs";
    case Command::Rsb: return "rsb";
    case Command::Simulate: return "simulate";
    case Command::Rate: return "rate";
    case Command::OfdmCheck: return "ofdm-check";
    case Command::Sweep: return "sweep";
  }
  return "?";
}

std::vector<double> RunConfig::alphas() const {
  std::vector<double> out;
  if (alpha_steps == 1) {
    out.push_back(alpha_start);
    return out;
  }
  for (int i = 0; i < alpha_steps; ++i)
    out.push_back(alpha_start + (alpha_stop - alpha_start) * static_cast<double>(i) / (alpha_steps - 1));
  return out;
}

void RunConfig::validate() const {
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (alpha_steps < 1) throw InvalidArgument("--alpha-steps must be >= 1");
  if (!finite_pos(alpha_start) || !finite_pos(alpha_stop)) throw InvalidArgument("alpha values must be finite and > 0");
  if (alpha_steps > 1 && !(alpha_stop > alpha_start))
    throw InvalidArgument("--alpha-stop must exceed --alpha-start when --alpha-steps > 1");
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw InvalidArgument("--gamma must be > 0");
  if (!std::isfinite(lambda)) throw InvalidArgument("--lambda must be finite");
  if (!finite_pos(sigma_u2)) throw InvalidArgument("--sigma-u2 must be > 0");
  if (!(std::isfinite(sigma_n2) && sigma_n2 >= 0.0)) throw InvalidArgument("--sigma-n2 must be >= 0");
  if (q && !finite_pos(*q)) throw InvalidArgument("--q must be > 0");
  if (papr_db) {
    if (!q) throw InvalidArgument("--papr needs --q (P = q 10^(PAPR/10))");
    if (!(std::isfinite(*papr_db) && *papr_db >= 0.0)) throw InvalidArgument("--papr must be >= 0 dB");
    if (constraint != "none" && constraint.rfind("disk", 0) != 0)
      throw InvalidArgument("--papr derives a disk or circle constraint; drop --constraint " + constraint);
  }
  const ConstraintSet set = ConstraintSet::parse(constraint);
  if (q && set.kind() == SetKind::MPSK && std::abs(*q - set.power()) > 1e-12 * *q)
    throw InvalidArgument("--q must equal the PSK power P");
  if (q && command == Command::Rsb) throw InvalidArgument("rsb does not support --q pinning");
  if (K < 0 || N < 0) throw InvalidArgument("--K and --N must be >= 0");
  if (L < 1) throw InvalidArgument("--L must be >= 1");
  if ((command == Command::Simulate || command == Command::Sweep) && trials < 0)
    throw InvalidArgument("--trials must be >= 0");
  if (command == Command::Simulate && trials < 1) throw InvalidArgument("simulate needs --trials >= 1");
  if (command == Command::OfdmCheck && (K < 1 || N < 1)) throw InvalidArgument("ofdm-check needs --K and --N");
  if (nodes < 2) throw InvalidArgument("--nodes must be >= 2");
  if (!finite_pos(tol)) throw InvalidArgument("--tol must be > 0");
  if (!finite_pos(gamma_lo) || !(gamma_hi > gamma_lo) || !std::isfinite(gamma_hi))
    throw InvalidArgument("need 0 < --gamma-lo < --gamma-hi");
}

RunConfig config_from_json(const std::string& text, RunConfig c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const auto& v = it.value();
      if (k == "command") c.command = parse_command(v.get<std::string>());
      else if (k == "constraint") c.constraint = v.get<std::string>();
      else if (k == "alpha") c.alpha_start = c.alpha_stop = v.get<double>(), c.alpha_steps = 1;
      else if (k == "alpha_start") c.alpha_start = v.get<double>();
      else if (k == "alpha_stop") c.alpha_stop = v.get<double>();
      else if (k == "alpha_steps") c.alpha_steps = v.get<int>();
      else if (k == "gamma") c.gamma = v.get<double>();
      else if (k == "lambda") c.lambda = v.get<double>();
      else if (k == "sigma_u2") c.sigma_u2 = v.get<double>();
      else if (k == "sigma_n2") c.sigma_n2 = v.get<double>();
      else if (k == "q") c.q = v.get<double>();
      else if (k == "papr") c.papr_db = v.get<double>();
      else if (k == "K") c.K = v.get<int>();
      else if (k == "N") c.N = v.get<int>();
      else if (k == "L") c.L = v.get<int>();
      else if (k == "trials") c.trials = v.get<int>();
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "nodes") c.nodes = v.get<int>();
      else if (k == "tol") c.tol = v.get<double>();
      else if (k == "gamma_lo") c.gamma_lo = v.get<double>();
      else if (k == "gamma_hi") c.gamma_hi = v.get<double>();
      else if (k == "rsb") c.with_rsb = v.get<bool>();
      else if (k == "threads") c.threads = v.get<unsigned>();
      else if (k == "output") c.output = v.get<std::string>();
      else if (k == "format") c.format = parse_format(v.get<std::string>());
      else throw InvalidArgument("config: unknown key '" + k + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("config: wrong value type: ") + e.what());
  }
  return c;
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Least-square-error precoding: replica predictions and Monte Carlo checks", "lsep"};
  app.set_version_flag("--version", kVersion);

  std::string command, constraint, format, config_path, output;
  double alpha = 0, alpha_start = 0, alpha_stop = 0, gamma = 0, lambda = 0, su2 = 0, sn2 = 0, q = 0, papr = 0;
  double tol = 0, glo = 0, ghi = 0;
  int alpha_steps = 0, K = 0, N = 0, L = 0, trials = 0, nodes = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool rsb = false;

  app.add_option("command", command, "rs | rsb | simulate | rate | ofdm-check | sweep");
  auto* o_config = app.add_option("--config", config_path, "JSON config; explicit flags override it")->check(CLI::ExistingFile);
  auto* o_constraint = app.add_option("--constraint", constraint, "none | disk:P | circle:P | psk:M[:P]");
  auto* o_alpha = app.add_option("--alpha", alpha, "single load N/K");
  auto* o_astart = app.add_option("--alpha-start", alpha_start, "first load of the sweep");
  auto* o_astop = app.add_option("--alpha-stop", alpha_stop, "last load of the sweep");
  auto* o_asteps = app.add_option("--alpha-steps", alpha_steps, "number of evenly spaced loads");
  auto* o_gamma = app.add_option("--gamma", gamma, "signal scale gamma");
  auto* o_lambda = app.add_option("--lambda", lambda, "regularizer lambda");
  auto* o_su2 = app.add_option("--sigma-u2", su2, "symbol variance");
  auto* o_sn2 = app.add_option("--sigma-n2", sn2, "receiver noise variance");
  auto* o_q = app.add_option("--q", q, "pin the per-antenna average power (lambda becomes free)");
  auto* o_papr = app.add_option("--papr", papr, "PAPR in dB (needs --q); 0 dB is constant envelope");
  auto* o_K = app.add_option("--K", K, "users");
  auto* o_N = app.add_option("--N", N, "antennas");
  auto* o_L = app.add_option("--L", L, "OFDM subcarriers");
  auto* o_trials = app.add_option("--trials", trials, "Monte Carlo trials");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_nodes = app.add_option("--nodes", nodes, "quadrature nodes per axis");
  auto* o_tol = app.add_option("--tol", tol, "fixed-point tolerance");
  auto* o_glo = app.add_option("--gamma-lo", glo, "rate: lower end of the gamma bracket");
  auto* o_ghi = app.add_option("--gamma-hi", ghi, "rate: upper end of the gamma bracket");
  auto* o_rsb = app.add_flag("--rsb", rsb, "sweep: also solve 1-RSB");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (0: hardware default)");
  auto* o_output = app.add_option("--output,-o", output, "output path (stdout when omitted)");
  auto* o_format = app.add_option("--format", format, "csv | json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw InvalidArgument(e.what());
  }

  RunConfig c;
  if (o_config->count()) {
    std::ifstream in(config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    c = config_from_json(ss.str(), c);
  }
  if (!command.empty()) c.command = parse_command(command);
  else if (!o_config->count()) throw InvalidArgument("missing command (rs, rsb, simulate, rate, ofdm-check or sweep)");
  if (o_constraint->count()) c.constraint = constraint;
  if (o_alpha->count()) {
    if (o_astart->count() || o_astop->count() || o_asteps->count())
      throw InvalidArgument("use either --alpha or --alpha-start/--alpha-stop/--alpha-steps");
    c.alpha_start = c.alpha_stop = alpha;
    c.alpha_steps = 1;
  }
  if (o_astart->count()) c.alpha_start = alpha_start;
  if (o_astop->count()) c.alpha_stop = alpha_stop;
  if (o_asteps->count()) c.alpha_steps = alpha_steps;
  if (o_gamma->count()) c.gamma = gamma;
  if (o_lambda->count()) c.lambda = lambda;
  if (o_su2->count()) c.sigma_u2 = su2;
  if (o_sn2->count()) c.sigma_n2 = sn2;
  if (o_q->count()) c.q = q;
  if (o_papr->count()) c.papr_db = papr;
  if (o_K->count()) c.K = K;
  if (o_N->count()) c.N = N;
  if (o_L->count()) c.L = L;
  if (o_trials->count()) c.trials = trials;
  if (o_seed->count()) c.seed = seed;
  if (o_nodes->count()) c.nodes = nodes;
  if (o_tol->count()) c.tol = tol;
  if (o_glo->count()) c.gamma_lo = glo;
  if (o_ghi->count()) c.gamma_hi = ghi;
  if (o_rsb->count()) c.with_rsb = rsb;
  if (o_threads->count()) c.threads = threads;
  if (o_output->count()) c.output = output;
  if (o_format->count()) c.format = parse_format(format);
  return c;
}

}  // namespace lsep::cli
