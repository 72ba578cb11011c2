// ctlp: command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 solve failure, 3 certification
// failure, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ctlp/ctlp.hpp"

namespace {

using namespace ctlp;

enum Exit { kOk = 0, kInput = 1, kSolve = 2, kCertify = 3, kVerify = 4 };

struct RunConfig {
  std::string instance_path;
  std::size_t nodes = 64;
  double beta = 1e-2;
  std::string beta_sweep;
  std::string trajectory;
  std::string multipliers;
  std::string dual;
  std::string out;
  std::string trajectory_out;
  std::string multipliers_out;
  CertifyOptions tol;
  double gap_tol = 1e-7;
};

struct Sweep {
  double lo, hi;
  std::size_t k;
};

Sweep parse_sweep(const std::string& s) {
  const auto a = s.find(':');
  const auto b = s.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) throw InputError("--beta-sweep expects lo:hi:k");
  try {
    Sweep sw{std::stod(s.substr(0, a)), std::stod(s.substr(a + 1, b - a - 1)),
             static_cast<std::size_t>(std::stoul(s.substr(b + 1)))};
    if (!(sw.lo > 0.0) || !(sw.hi >= sw.lo) || sw.k == 0) throw InputError("--beta-sweep needs 0 < lo <= hi, k >= 1");
    return sw;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const InputError*>(&e)) throw;
    throw InputError("--beta-sweep expects lo:hi:k");
  }
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << j.dump(2) << "\n";
}

void write_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  write_trajectory_csv(f, traj);
}

CTLPInstance load_primal(const RunConfig& cfg) {
  const json doc = read_json_file(cfg.instance_path);
  if (read_sense(doc) == Sense::Dual)
    throw InputError(cfg.instance_path + " is a dual document; pass the primal instance");
  return load_instance(doc);
}

void validate(const RunConfig& cfg) {
  if (cfg.nodes < 1) throw InputError("--nodes must be at least 1");
  if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) throw InputError("--beta must be positive");
}

/// The trajectory from --trajectory, or a fresh solve on the default grid.
std::optional<Trajectory> primal_trajectory(const CTLPInstance& inst, const RunConfig& cfg, int& code) {
  if (!cfg.trajectory.empty()) return read_trajectory_file(cfg.trajectory, inst.breakpoints());
  const SolveResult r = solve(inst, cfg.nodes);
  if (!r.ok()) {
    std::cerr << "error: pointwise LP " << to_string(r.status) << " at t = " << r.grid[*r.witness_node].t << "\n";
    code = kSolve;
    return std::nullopt;
  }
  return *r.z;
}

int cmd_solve(const RunConfig& cfg) {
  validate(cfg);
  const CTLPInstance inst = load_primal(cfg);
  const SolveResult r = solve(inst, cfg.nodes);
  emit(to_json(r), cfg.out);
  if (!r.ok()) {
    std::cerr << "error: pointwise LP " << to_string(r.status) << " at node " << *r.witness_node
              << " (t = " << r.grid[*r.witness_node].t << ")\n";
    return kSolve;
  }
  if (!cfg.trajectory_out.empty()) write_csv(*r.z, cfg.trajectory_out);
  if (!cfg.multipliers_out.empty()) write_csv(*r.u, cfg.multipliers_out);
  return kOk;
}

int cmd_certify(const RunConfig& cfg) {
  validate(cfg);
  const CTLPInstance inst = load_primal(cfg);
  int code = kOk;
  const auto z = primal_trajectory(inst, cfg, code);
  if (!z) return code;
  const TimeGrid& grid = z->grid();

  json j = report_header("certify");
  try {
    const RegularityCertificate fr = check_beta_fr(inst, *z, cfg.beta, grid, cfg.tol);
    const RegularityCertificate rc = check_beta_rc(inst, *z, cfg.beta, grid, cfg.tol);
    const bool beta_a = (rc.holds() && rc.isharp_in_I0) || fr.holds();
    j["beta"] = cfg.beta;
    j["active_tol"] = cfg.tol.active_tol;
    j["fr_floor"] = cfg.tol.fr_floor;
    j["BetaFR"] = to_json(fr);
    j["BetaRC"] = to_json(rc);
    j["BetaA"] = beta_a;
    j["lemma1"] = to_json(lemma1_witness(inst, *z, cfg.beta, grid, cfg.tol));
    if (!cfg.beta_sweep.empty()) {
      const Sweep sw = parse_sweep(cfg.beta_sweep);
      j["beta_sweep"] = to_json(beta_sweep(inst, *z, grid, sw.lo, sw.hi, sw.k, cfg.tol));
    }
    emit(j, cfg.out);
    return fr.holds() || rc.holds() ? kOk : kCertify;
  } catch (const InfeasibleTrajectory& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerify;
  }
}

int cmd_check(const RunConfig& cfg) {
  validate(cfg);
  const CTLPInstance inst = load_primal(cfg);
  int code = kOk;
  const auto z = primal_trajectory(inst, cfg, code);
  if (!z) return code;
  const TimeGrid& grid = z->grid();

  json j = report_header("check");
  try {
    const RegularityCertificate cert = satisfies_beta_a(inst, *z, cfg.beta, grid, cfg.tol);
    j["certificate"] = json{{"kind", to_string(cert.kind)}, {"via", to_string(cert.tested)}, {"beta", cfg.beta}};
    std::optional<Trajectory> u;
    if (!cfg.multipliers.empty()) {
      u = read_trajectory_file(cfg.multipliers, inst.breakpoints());
    } else {
      RegularityCertificate use = cert;
      if (!use.holds()) {
        use = check_beta_rc(inst, *z, cfg.beta, grid, cfg.tol);
        if (!use.holds()) use = check_beta_fr(inst, *z, cfg.beta, grid, cfg.tol);
      }
      if (!use.holds()) {
        j["error"] = "no regularity certificate; cannot recover multipliers";
        emit(j, cfg.out);
        return kCertify;
      }
      const MultiplierRecovery rec = recover_multipliers(inst, *z, use, cfg.tol);
      j["multipliers"] = to_json(rec);
      u = rec.u;
    }
    const Trajectory w = cfg.dual.empty() ? multiplier_to_dual(*u) : read_trajectory_file(cfg.dual, inst.breakpoints());

    const KKTReport kkt = check_kkt(inst, *z, *u, grid, cfg.tol.kkt_tol);
    const DualityReport dr = duality_report(inst, *z, w, grid, &cert, {cfg.gap_tol, cfg.tol.kkt_tol});
    const CSReport cs = complementary_slackness(inst, *z, w, grid, &cert);
    j["kkt"] = to_json(kkt);
    j["duality"] = to_json(dr);
    j["complementary_slackness"] = to_json(cs);
    emit(j, cfg.out);
    const bool ok = kkt.pass && cs.fc1 && cs.fc2 && cs.fc3 && std::abs(dr.gap) <= cfg.gap_tol &&
                    dr.verdict != DualityVerdict::Withheld;
    return ok ? kOk : kVerify;
  } catch (const InfeasibleTrajectory& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerify;
  }
}

int cmd_dual(const RunConfig& cfg) {
  const json doc = read_json_file(cfg.instance_path);
  if (read_sense(doc) == Sense::Dual) {
    std::cerr << "error: " << cfg.instance_path << " is already a dual document; the bidual is not defined here\n";
    return kInput;
  }
  const CTLPInstance inst = load_instance(doc);
  json out = save_instance(build_dual(inst).primal(), Sense::Dual);
  out["variables"] = inst.m();
  out["equality_rows"] = inst.n();
  emit(out, cfg.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-time linear programs: pointwise solve, regularity certificates, duality checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kGenerator);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) {
    sub->add_option("instance", cfg.instance_path, "Instance JSON")->required();
    sub->add_option("-o,--out", cfg.out, "Report path (default stdout)");
  };
  auto grid_opts = [&](CLI::App* sub) {
    sub->add_option("--nodes", cfg.nodes, "Nodes per breakpoint interval")->capture_default_str();
  };
  auto cert_opts = [&](CLI::App* sub) {
    sub->add_option("--beta", cfg.beta, "beta for the beta-active set")->capture_default_str();
    sub->add_option("--active-tol", cfg.tol.active_tol, "Activity tolerance")->capture_default_str();
    sub->add_option("--fr-floor", cfg.tol.fr_floor, "Smallest accepted Gram determinant")->capture_default_str();
    sub->add_option("--trajectory", cfg.trajectory, "Primal trajectory CSV (default: solve)");
  };

  CLI::App* s = app.add_subcommand("solve", "Solve pointwise and write the summary");
  common(s);
  grid_opts(s);
  s->add_option("--trajectory-out", cfg.trajectory_out, "Write z as CSV");
  s->add_option("--multipliers-out", cfg.multipliers_out, "Write LP duals u as CSV");

  CLI::App* c = app.add_subcommand("certify", "beta-FR / beta-RC / beta-A certificates");
  common(c);
  grid_opts(c);
  cert_opts(c);
  c->add_option("--beta-sweep", cfg.beta_sweep, "lo:hi:k log-spaced beta values");

  CLI::App* k = app.add_subcommand("check", "KKT, duality and complementary slackness checks");
  common(k);
  grid_opts(k);
  cert_opts(k);
  k->add_option("--multipliers", cfg.multipliers, "Multiplier CSV (default: recover)");
  k->add_option("--dual", cfg.dual, "Dual trajectory CSV (default: -u)");
  k->add_option("--kkt-tol", cfg.tol.kkt_tol, "KKT tolerance")->capture_default_str();
  k->add_option("--gap-tol", cfg.gap_tol, "Duality gap tolerance")->capture_default_str();

  CLI::App* d = app.add_subcommand("dual", "Write the dual instance");
  common(d);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (s->parsed()) return cmd_solve(cfg);
    if (c->parsed()) return cmd_certify(cfg);
    if (k->parsed()) return cmd_check(cfg);
    if (d->parsed()) return cmd_dual(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
