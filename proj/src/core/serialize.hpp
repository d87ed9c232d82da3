#pragma once

#include <string>

#include "core/arbitrage.hpp"
#include "core/equilibrium.hpp"
#include "core/learning.hpp"
#include "core/model.hpp"
#include "core/timescale.hpp"

namespace berknash {

std::string equilibrium_to_json(const EquilibriumResult& result);

std::string vom_to_json(const VomReport& report);

// One row per scale: scale, vom, cost_ne, cost_bn, delta_g_norm, bound_ok.
// delta_g_norm is the norm of the applied distortion, scale * ||Gt - G||.
std::string bound_check_csv(const BoundCheckReport& report);

std::string arbitrage_to_json(const QcqpData& q, const DistortionPlan& plan,
                              const KktReport& kkt,
                              const EquilibriumResult& induced);

// Columns k, x_1..x_n, theta_1..theta_n, dx_norm, dtheta_norm.
std::string trace_csv(const Trace& trace);

std::string run_report_to_json(const RunReport& report);

// Columns k, x_1..x_n, theta_1..theta_n, delta_1..delta_n, dx_norm,
// dtheta_norm, ddelta_norm.
std::string two_scale_trace_csv(const TwoScaleTrace& trace);

std::string two_scale_report_to_json(const TwoScaleReport& report);

std::string validation_to_json(const ValidationReport& report);

// Throws IoError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace berknash
