#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "engset/asymptotics.hpp"
#include "engset/model.hpp"
#include "engset/sim.hpp"

namespace engset {

inline constexpr int kSchemaVersion = 1;

/// Shortest text that round-trips through strtod ("%.17g").
std::string format_real(double v);

nlohmann::json params_to_json(const ModelParams& p);
nlohmann::json sim_config_to_json(const SimConfig& c);

/// Counts and moments of a sample set, plus censoring information.
nlohmann::json sample_summary_json(const SimulationOutput& out);

/**
 * CSV dump: comment lines carrying schema_version and config_digest, then a
 * header row and one value per row (hitting times, or terminal states).
 */
void write_samples_csv(std::ostream& os, const SimConfig& c, const SimulationOutput& out);

/// N, alpha, exact_lt, limit_lt, gap.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergencePoint>& rows);

} // namespace engset
