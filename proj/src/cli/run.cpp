#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsep/cli/run.hpp"
#include "lsep/error.hpp"
#include "lsep/harness/harness.hpp"
#include "lsep/harness/ofdm.hpp"
#include "lsep/harness/rate.hpp"
#include "lsep/model/rng.hpp"
#include "lsep/replica/rs.hpp"
#include "lsep/replica/rsb1.hpp"

namespace lsep::cli {
namespace {

constexpr double kOfdmKsLimit = 0.05;

ConstraintSet effective_set(const RunConfig& cfg) {
  if (cfg.papr_db) {
    // PAPR 0 dB leaves no room between average and peak: constant envelope.
    if (*cfg.papr_db <= 1e-12) return ConstraintSet::circle(*cfg.q);
    return ConstraintSet::disk(peak_from_papr(*cfg.q, *cfg.papr_db));
  }
  return ConstraintSet::parse(cfg.constraint);
}

SystemParams params_of(const RunConfig& cfg) {
  SystemParams p;
  p.gamma = cfg.gamma;
  p.lambda = cfg.lambda;
  p.sigma_u2 = cfg.sigma_u2;
  p.sigma_n2 = cfg.sigma_n2;
  return p;
}

RsOptions rs_options(const RunConfig& cfg) {
  RsOptions o;
  o.tol = cfg.tol;
  o.nodes = cfg.nodes;
  return o;
}

// RS point at the configured lambda, or with q pinned when --q is given.
RSSolution predict_rs(const RunConfig& cfg, const ConstraintSet& set, const ChannelEnsemble& ens,
                      const SystemParams& p) {
  if (!cfg.q || set.kind() == SetKind::MPSK) return rs_solve(set, ens, p, rs_options(cfg)).best();
  if (!ens.is_iid()) return pin_average_power(set, ens, p, *cfg.q, rs_options(cfg), cfg.tol);
  switch (set.kind()) {
    case SetKind::Unconstrained:
      return rs_pinned_closed_form(ens, p, std::numeric_limits<double>::infinity(), *cfg.q);
    case SetKind::Circle:
      if (std::abs(set.power() - *cfg.q) > 1e-12 * *cfg.q) throw DomainError("circle fixes q at P");
      return rs_pinned_closed_form(ens, p, set.power(), set.power());
    default:
      return rs_pinned_closed_form(ens, p, set.power(), *cfg.q);
  }
}

std::pair<int, int> sim_dims(const RunConfig& cfg, double alpha) {
  if (cfg.K > 0) return {cfg.K, std::max(1, static_cast<int>(std::lround(alpha * cfg.K)))};
  if (cfg.N > 0) return {std::max(1, static_cast<int>(std::lround(cfg.N / alpha))), cfg.N};
  return {200, std::max(1, static_cast<int>(std::lround(alpha * 200)))};
}

void fill_rs(Row& row, const RSSolution& s) {
  row.q = s.q;
  row.chi = s.chi;
  row.d_linear = s.distortion;
  row.lambda = s.lambda;
  row.converged = s.converged;
  row.note = s.note;
}

void append_note(Row& row, const std::string& msg) {
  if (msg.empty()) return;
  row.note = row.note.empty() ? msg : row.note + "; " + msg;
}

void fill_empirical(Row& row, const RunConfig& cfg, const ConstraintSet& set, double alpha, SystemParams p,
                    unsigned threads) {
  const auto [K, N] = sim_dims(cfg, alpha);
  // Circle and PSK do not depend on lambda; a pinned disk uses the predicted multiplier.
  if (row.lambda && !set.constant_modulus()) {
    if (std::isfinite(*row.lambda)) {
      p.lambda = *row.lambda;
    } else {
      p.lambda = 0.0;
      append_note(row, "simulated with lambda = 0");
    }
  }
  const EmpiricalResult e = empirical_distortion(set, ChannelEnsemble::iid(K, N), p, cfg.trials, cfg.seed, {}, threads);
  row.emp_mean = e.mean;
  row.emp_stderr = e.stderr_;
  if (e.nonconverged > 0) append_note(row, std::to_string(e.nonconverged) + " trials hit the iteration cap");
}

Row compute_row(const RunConfig& cfg, double alpha, unsigned inner_threads) {
  Row row;
  row.alpha = alpha;
  try {
    const ConstraintSet set = effective_set(cfg);
    const ChannelEnsemble ens = ChannelEnsemble::iid_load(alpha);
    const SystemParams p = params_of(cfg);
    switch (cfg.command) {
      case Command::Rs:
        fill_rs(row, predict_rs(cfg, set, ens, p));
        break;
      case Command::Rsb: {
        RsbOptions o;
        o.tol = cfg.tol;
        o.nodes = cfg.nodes;
        const RSBSolution s = rsb1_solve(set, ens, p, o).best();
        row.q = s.q1;
        row.chi = s.chi1;
        row.d_linear = s.distortion;
        row.p1 = s.p1;
        row.mu1 = s.mu1;
        row.eta1 = s.eta1;
        row.lambda = p.lambda;
        row.converged = s.converged;
        row.note = s.reduced_to_rs ? "reduced to RS" : s.note;
        break;
      }
      case Command::Simulate:
        fill_rs(row, predict_rs(cfg, set, ens, p));
        fill_empirical(row, cfg, set, alpha, p, inner_threads);
        break;
      case Command::Rate: {
        RSSolution at_opt;
        auto predict = [&](double g) {
          SystemParams pg = p;
          pg.gamma = g;
          RSSolution s = predict_rs(cfg, set, ens, pg);
          if (!s.converged) throw ConvergenceError("RS did not converge at gamma = " + std::to_string(g));
          return s.distortion;
        };
        const GammaOptimum opt = optimize_gamma(predict, p, cfg.gamma_lo, cfg.gamma_hi);
        SystemParams pg = p;
        pg.gamma = opt.gamma;
        at_opt = predict_rs(cfg, set, ens, pg);
        fill_rs(row, at_opt);
        row.rate_bits = opt.rate;
        row.gamma_opt = opt.gamma;
        break;
      }
      case Command::Sweep: {
        fill_rs(row, predict_rs(cfg, set, ens, p));
        if (row.converged) row.rate_bits = rate_lower_bound(*row.d_linear, p);
        if (cfg.with_rsb) {
          RsbOptions o;
          o.tol = cfg.tol;
          o.nodes = cfg.nodes;
          const RSBSolution s = rsb1_solve(set, ens, p, o).best();
          row.p1 = s.p1;
          row.mu1 = s.mu1;
          row.eta1 = s.eta1;
          append_note(row, "1-RSB D = " + std::to_string(s.distortion));
        }
        if (cfg.trials > 0) fill_empirical(row, cfg, set, alpha, p, inner_threads);
        break;
      }
      case Command::OfdmCheck:
        throw InvalidArgument("ofdm-check has no per-alpha rows");
    }
  } catch (const Error& e) {
    row.converged = false;
    append_note(row, e.what());
  }
  return row;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

nlohmann::json json_num(const std::optional<double>& v) {
  if (!v) return nullptr;
  if (!std::isfinite(*v)) return num(*v);
  return *v;
}

nlohmann::json meta_json(const RunConfig& cfg) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["command"] = command_name(cfg.command);
  m["constraint"] = effective_set(cfg).to_string();
  m["seed"] = cfg.seed;
  m["nodes"] = cfg.nodes;
  m["tol"] = cfg.tol;
  m["gamma"] = cfg.gamma;
  m["lambda"] = cfg.lambda;
  m["sigma_u2"] = cfg.sigma_u2;
  m["sigma_n2"] = cfg.sigma_n2;
  m["q"] = cfg.q ? nlohmann::json(*cfg.q) : nlohmann::json(nullptr);
  m["papr_db"] = cfg.papr_db ? nlohmann::json(*cfg.papr_db) : nlohmann::json(nullptr);
  m["K"] = cfg.K;
  m["N"] = cfg.N;
  m["L"] = cfg.L;
  m["trials"] = cfg.trials;
  return m;
}

std::string meta_csv(const RunConfig& cfg) {
  std::string out = "#meta";
  const nlohmann::json m = meta_json(cfg);
  for (auto it = m.begin(); it != m.end(); ++it) {
    const auto& v = it.value();
    out += "," + it.key() + "=" + (v.is_string() ? v.get<std::string>() : v.is_null() ? std::string() : v.dump());
  }
  return out + "\n";
}

struct OfdmReport {
  double ks = 0.0;
  double unitarity = 0.0;
  bool pass = false;
};

OfdmReport ofdm_check(const RunConfig& cfg) {
  const ChannelEnsemble ens = ChannelEnsemble::iid(cfg.K, cfg.N);
  std::vector<CMatrix> H_list;
  H_list.reserve(cfg.L);
  for (int k = 0; k < cfg.L; ++k) H_list.push_back(sample_channel(ens, derive_seed(cfg.seed, {static_cast<std::uint64_t>(k)})));
  const CMatrix single = sample_channel(ens, derive_seed(cfg.seed, {static_cast<std::uint64_t>(cfg.L)}));
  std::vector<double> eig_ofdm;
  {
    const CMatrix E = ofdm_equivalent_channel(H_list);
    H_list.clear();
    eig_ofdm = ofdm_gram_eigenvalues(E, cfg.L);
  }
  OfdmReport r;
  r.ks = eigen_cdf_compare(eig_ofdm, gram_eigenvalues(single));
  r.unitarity = ofdm_unitarity_residual(cfg.L);
  r.pass = r.ks <= kOfdmKsLimit && r.unitarity <= 1e-10;
  return r;
}

std::string format_ofdm(const RunConfig& cfg, const OfdmReport& r) {
  if (cfg.format == Format::Json) {
    nlohmann::json j;
    j["meta"] = meta_json(cfg);
    j["result"] = {{"L", cfg.L}, {"K", cfg.K},           {"N", cfg.N},          {"seed", cfg.seed},
                   {"ks", r.ks}, {"unitarity_residual", r.unitarity}, {"pass", r.pass}};
    return j.dump(2) + "\n";
  }
  return meta_csv(cfg) + "L,K,N,seed,ks,unitarity_residual,pass\n" + std::to_string(cfg.L) + "," +
         std::to_string(cfg.K) + "," + std::to_string(cfg.N) + "," + std::to_string(cfg.seed) + "," + num(r.ks) +
         "," + num(r.unitarity) + "," + (r.pass ? "true" : "false") + "\n";
}

}  // namespace

std::vector<Row> compute_rows(const RunConfig& cfg) {
  const std::vector<double> alphas = cfg.alphas();
  std::vector<Row> rows(alphas.size());
  unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(alphas.size()));
  // Parallelism goes to the sweep axis when there is more than one point.
  const unsigned inner = workers > 1 ? 1u : cfg.threads;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < alphas.size(); i = next.fetch_add(1))
      rows[i] = compute_row(cfg, alphas[i], inner);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string format_csv(const RunConfig& cfg, const std::vector<Row>& rows) {
  std::string out = meta_csv(cfg);
  out += "alpha,q,chi,D_linear,D_dB,p1,mu1,eta1,D_emp_mean,D_emp_stderr,rate_bits,gamma_opt,converged,lambda,note\n";
  for (const Row& r : rows) {
    const std::string db = r.d_linear ? num(to_db(*r.d_linear)) : std::string();
    out += num(r.alpha) + "," + opt_num(r.q) + "," + opt_num(r.chi) + "," + opt_num(r.d_linear) + "," + db +
           "," + opt_num(r.p1) + "," + opt_num(r.mu1) + "," + opt_num(r.eta1) + "," + opt_num(r.emp_mean) + "," +
           opt_num(r.emp_stderr) + "," + opt_num(r.rate_bits) + "," + opt_num(r.gamma_opt) + "," +
           (r.converged ? "true" : "false") + "," + opt_num(r.lambda) + "," + csv_escape(r.note) + "\n";
  }
  return out;
}

std::string format_json(const RunConfig& cfg, const std::vector<Row>& rows) {
  nlohmann::json j;
  j["meta"] = meta_json(cfg);
  j["rows"] = nlohmann::json::array();
  for (const Row& r : rows) {
    nlohmann::json o;
    o["alpha"] = r.alpha;
    o["q"] = json_num(r.q);
    o["chi"] = json_num(r.chi);
    o["D_linear"] = json_num(r.d_linear);
    o["D_dB"] = r.d_linear ? json_num(to_db(*r.d_linear)) : nlohmann::json(nullptr);
    o["p1"] = json_num(r.p1);
    o["mu1"] = json_num(r.mu1);
    o["eta1"] = json_num(r.eta1);
    o["D_emp_mean"] = json_num(r.emp_mean);
    o["D_emp_stderr"] = json_num(r.emp_stderr);
    o["rate_bits"] = json_num(r.rate_bits);
    o["gamma_opt"] = json_num(r.gamma_opt);
    o["converged"] = r.converged;
    o["lambda"] = json_num(r.lambda);
    o["note"] = r.note;
    j["rows"].push_back(o);
  }
  return j.dump(2) + "\n";
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string text;
  int status = 0;
  if (cfg.command == Command::OfdmCheck) {
    const OfdmReport r = ofdm_check(cfg);
    text = format_ofdm(cfg, r);
    if (!r.pass) {
      err << "ofdm-check: KS " << num(r.ks) << " exceeds " << kOfdmKsLimit << "\n";
      status = 1;
    }
  } else {
    const std::vector<Row> rows = compute_rows(cfg);
    text = cfg.format == Format::Json ? format_json(cfg, rows) : format_csv(cfg, rows);
  }
  if (cfg.output.empty()) {
    out << text;
  } else {
    std::ofstream f(cfg.output, std::ios::binary);
    if (!f) {
      err << "cannot open " << cfg.output << " for writing\n";
      return 2;
    }
    f << text;
  }
  return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(argc, argv, out);
    if (!cfg) return 0;
    cfg->validate();
  } catch (const Error& e) {
    err << "lsep: " << e.what() << "\n";
    return 2;
  }
  try {
    return run(*cfg, out, err);
  } catch (const std::exception& e) {
    err << "lsep: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lsep::cli
