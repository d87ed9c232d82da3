#include "core/serialize.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace berknash {

namespace {

using nlohmann::json;

json vec(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json equilibrium_json(const EquilibriumResult& result) {
  json doc;
  doc["kind"] = equilibrium_kind_token(result.kind);
  doc["x"] = vec(result.x);
  doc["theta"] = result.theta.has_value() ? vec(*result.theta) : json();
  doc["gamma"] = result.gamma.has_value() ? vec(*result.gamma) : json();
  doc["residual"] = result.residual;
  return doc;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void append_vector_columns(std::string& header, const char* stem, int n) {
  for (int i = 1; i <= n; ++i) {
    header += ',';
    header += stem;
    header += '_';
    header += std::to_string(i);
  }
}

void append_values(std::string& line, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    line += ',';
    line += fmt_double(v(i));
  }
}

}  // namespace

std::string equilibrium_to_json(const EquilibriumResult& result) {
  return dump(equilibrium_json(result));
}

std::string vom_to_json(const VomReport& report) {
  json doc;
  doc["vom"] = report.vom;
  doc["cost_ne"] = report.cost_ne;
  doc["cost_bn"] = report.cost_bn;
  doc["cost_diff"] = report.cost_diff;
  doc["action_deviation"] = report.action_deviation;
  doc["delta_g_norm"] = report.delta_g_norm;
  doc["stable"] = report.stable;
  doc["k1"] = report.k1;
  doc["k4"] = report.k4;
  doc["sign_caveat"] = report.sign_caveat;
  doc["ne"] = equilibrium_json(report.ne);
  doc["bn"] = equilibrium_json(report.bn);
  return dump(doc);
}

std::string bound_check_csv(const BoundCheckReport& report) {
  std::string csv = "scale,vom,cost_ne,cost_bn,delta_g_norm,bound_ok\n";
  for (const BoundCheckRow& row : report.rows) {
    csv += fmt_double(row.scale);
    csv += ',';
    csv += fmt_double(row.vom);
    csv += ',';
    csv += fmt_double(report.cost_ne);
    csv += ',';
    csv += fmt_double(row.cost_bn);
    csv += ',';
    csv += fmt_double(row.scale * report.delta_g_norm);
    csv += ',';
    csv += row.bound_ok ? "true" : "false";
    csv += '\n';
  }
  return csv;
}

std::string arbitrage_to_json(const QcqpData& q, const DistortionPlan& plan,
                              const KktReport& kkt,
                              const EquilibriumResult& induced) {
  json doc;
  doc["delta"] = vec(plan.delta);
  doc["rho"] = vec(plan.rho);
  doc["lambda"] = plan.lambda;
  doc["active"] = plan.active;
  doc["gamma_budget"] = plan.gamma_budget;
  doc["budget_used"] = plan.delta.dot(plan.a_weights.cwiseProduct(plan.delta));
  doc["f_opt"] = designer_objective(q, plan.delta);
  doc["x_induced"] = vec(induced.x);
  doc["theta_induced"] =
      induced.theta.has_value() ? vec(*induced.theta) : json();
  doc["kkt"] = {{"stationarity", kkt.stationarity},
                {"primal_slack", kkt.primal_slack},
                {"dual_value", kkt.dual_value},
                {"complementarity", kkt.complementarity},
                {"ok", kkt.ok}};
  return dump(doc);
}

std::string trace_csv(const Trace& trace) {
  std::string csv = "k";
  append_vector_columns(csv, "x", trace.n);
  append_vector_columns(csv, "theta", trace.n);
  csv += ",dx_norm,dtheta_norm\n";
  for (const TraceRow& row : trace.rows) {
    std::string line = std::to_string(row.k);
    append_values(line, row.x);
    append_values(line, row.theta);
    line += ',';
    line += fmt_double(row.dx_norm);
    line += ',';
    line += fmt_double(row.dtheta_norm);
    line += '\n';
    csv += line;
  }
  return csv;
}

std::string run_report_to_json(const RunReport& report) {
  json doc;
  doc["verdict"] = verdict_token(report.verdict);
  doc["steps"] = report.steps;
  doc["window_met"] = report.window_met;
  doc["dist_ne"] = report.dist_ne;
  doc["dist_bn"] = report.dist_bn;
  doc["tol"] = report.tol;
  doc["threshold"] = report.threshold;
  doc["ne_residual"] = report.ne_residual;
  doc["z_min"] = report.z_min;
  doc["stability_warning"] = report.stability_warning;
  doc["x_final"] = vec(report.final_state.x);
  doc["theta_final"] = vec(report.final_state.theta);
  doc["x_ne"] = vec(report.ne.x);
  doc["x_bn"] = vec(report.bn.x);
  doc["bn_kind"] = equilibrium_kind_token(report.bn.kind);
  return dump(doc);
}

std::string two_scale_trace_csv(const TwoScaleTrace& trace) {
  std::string csv = "k";
  append_vector_columns(csv, "x", trace.n);
  append_vector_columns(csv, "theta", trace.n);
  append_vector_columns(csv, "delta", trace.n);
  csv += ",dx_norm,dtheta_norm,ddelta_norm\n";
  for (const TwoScaleRow& row : trace.rows) {
    std::string line = std::to_string(row.k);
    append_values(line, row.x);
    append_values(line, row.theta);
    append_values(line, row.delta);
    line += ',';
    line += fmt_double(row.dx_norm);
    line += ',';
    line += fmt_double(row.dtheta_norm);
    line += ',';
    line += fmt_double(row.ddelta_norm);
    line += '\n';
    csv += line;
  }
  return csv;
}

std::string two_scale_report_to_json(const TwoScaleReport& report) {
  json doc;
  doc["x_final"] = vec(report.x);
  doc["theta_final"] = vec(report.theta);
  doc["delta_final"] = vec(report.delta);
  doc["delta_star"] = vec(report.delta_star);
  doc["x_star"] = vec(report.x_star);
  doc["f_terminal"] = report.f_terminal;
  doc["f_star"] = report.f_star;
  doc["dist_delta_star"] = report.dist_delta_star;
  doc["dist_x_star"] = report.dist_x_star;
  doc["dist_x_bn_final"] = report.dist_x_bn_final;
  doc["dist_x_ne_final"] = report.dist_x_ne_final;
  doc["last_cross_x"] = report.last_cross_x;
  doc["last_cross_theta"] = report.last_cross_theta;
  doc["last_cross_delta"] = report.last_cross_delta;
  doc["eps"] = report.eps;
  doc["budget_active"] = report.budget_active;
  doc["lambda"] = report.lambda;
  doc["stability_warning"] = report.stability_warning;
  doc["steps"] = report.steps;
  return dump(doc);
}

std::string validation_to_json(const ValidationReport& report) {
  json doc;
  doc["r_min"] = report.r_min;
  doc["rho_g"] = report.rho_g;
  doc["rho_r_inv_g"] = report.rho_r_inv_g;
  doc["stable"] = report.stable;
  doc["rho_r_inv_g_tilde"] = report.rho_r_inv_g_tilde.has_value()
                                 ? json(*report.rho_r_inv_g_tilde)
                                 : json();
  return dump(doc);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) fail(ErrorKind::IoError, "failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace berknash
