#ifndef CTLP_REPORT_HPP
#define CTLP_REPORT_HPP

// JSON views of solver, certificate and verification results. Payloads are
// deterministic: no timestamps, versions only in the "generator" field.

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "ctlp/certify.hpp"
#include "ctlp/duality.hpp"
#include "ctlp/io.hpp"
#include "ctlp/solver.hpp"

namespace ctlp {

inline constexpr int kReportSchema = 1;
inline constexpr const char* kGenerator = "ctlp 0.1.0";

inline json report_header(const std::string& kind) {
  return json{{"schema", kReportSchema}, {"generator", kGenerator}, {"report", kind}};
}

inline json node_json(const GridNode& n) { return json{{"t", n.t}, {"interval", n.interval}}; }

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const SolveResult& r) {
  json j = report_header("solve");
  j["status"] = to_string(r.status);
  j["objective"] = r.ok() ? json(r.objective) : json(nullptr);
  j["nodes"] = r.grid.size();
  if (r.witness_node) j["witness"] = node_json(r.grid[*r.witness_node]);
  json st = json::array();
  for (auto s : r.per_node_status) st.push_back(to_string(s));
  j["per_node_status"] = st;
  j["interpolation"] = "piecewise_linear";
  return j;
}

inline json to_json(const ActiveSetProfile& p) {
  json nodes = json::array();
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    json n = node_json(p.grid[k]);
    n["I0"] = p.I0[k];
    n["Ibeta"] = p.Ibeta[k];
    nodes.push_back(n);
  }
  return json{{"beta", p.beta}, {"active_tol", p.active_tol}, {"nodes", nodes}};
}

inline json to_json(const RegularityCertificate& c) {
  json j{{"kind", to_string(c.kind)},
         {"tested", to_string(c.tested)},
         {"holds", c.holds()},
         {"beta", c.beta},
         {"det_lower_bound", c.det_lower_bound},
         {"sigma_min_lower_bound", optional_json(c.sigma_min_lower_bound)},
         {"isharp_in_I0", c.isharp_in_I0},
         {"cone_equality", c.cone_equality}};
  if (c.tested == CertificateKind::BetaRC) j["lemma3_residual"] = c.lemma3_residual;
  if (c.witness_node) j["witness"] = node_json(c.profile.grid[*c.witness_node]);
  if (!c.reason.empty()) j["reason"] = c.reason;
  json nodes = json::array();
  for (std::size_t k = 0; k < c.profile.grid.size(); ++k) {
    json n = node_json(c.profile.grid[k]);
    n["I0"] = c.profile.I0[k];
    n["Ibeta"] = c.profile.Ibeta[k];
    n["isharp"] = c.isharp[k];
    n["det"] = c.node_det[k];
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  return j;
}

inline json to_json(const MultiplierRecovery& r) {
  return json{{"method", to_string(r.method)},
              {"min_multiplier", r.min_multiplier},
              {"negative_nodes", r.negative_nodes},
              {"lambda_min_entry", r.lambda_min_entry},
              {"lambda_reconstruction_residual", r.lambda_reconstruction_residual},
              {"lambda_negative_nodes", r.lambda_negative_nodes}};
}

inline json to_json(const KKTReport& r) {
  return json{{"stationarity_residual", r.stationarity_residual},
              {"min_multiplier", r.min_multiplier},
              {"complementarity_residual", r.complementarity_residual},
              {"tol", r.tol},
              {"pass", r.pass}};
}

inline json to_json(const Lemma1Witness& w) {
  return json{{"C", w.C},
              {"Khat", w.Khat},
              {"full_rank_everywhere", w.full_rank_everywhere},
              {"forward_consistent", w.forward_consistent},
              {"converse_consistent", w.converse_consistent},
              {"corrected_converse_consistent", w.corrected_consistent},
              {"consistent", w.consistent}};
}

inline json to_json(const std::vector<BetaSweepRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back(json{{"beta", r.beta},
                       {"BetaFR", r.fr},
                       {"BetaRC", r.rc},
                       {"isharp_in_I0", r.isharp_in_I0},
                       {"BetaA", r.beta_a},
                       {"fr_det", r.fr_det},
                       {"rc_det", r.rc_det}});
  return out;
}

inline json to_json(const DualityReport& r) {
  return json{{"F", r.F},
              {"G", r.G},
              {"gap", r.gap},
              {"primal_residual", r.primal_residual},
              {"dual_eq_residual", r.dual_eq_residual},
              {"dual_sign_violation", r.dual_sign_violation},
              {"cs_residual", r.cs_residual},
              {"verdict", to_string(r.verdict)}};
}

inline json to_json(const CSReport& r) {
  return json{{"min_slack", r.min_slack},
              {"dual_eq_residual", r.dual_eq_residual},
              {"dual_sign_violation", r.dual_sign_violation},
              {"fc3_residual", r.fc3_residual},
              {"FC1", r.fc1},
              {"FC2", r.fc2},
              {"FC3", r.fc3},
              {"tol", r.tol},
              {"verdict", to_string(r.verdict)}};
}

inline json to_json(const HypothesisHReport& r) {
  return json{{"det_lower_bound", r.det_lower_bound}, {"holds", r.holds}};
}

}  // namespace ctlp

#endif  // CTLP_REPORT_HPP
