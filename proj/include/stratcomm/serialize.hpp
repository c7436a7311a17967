#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratcomm/dsbs.hpp"
#include "stratcomm/info.hpp"
#include "stratcomm/simulate.hpp"
#include "stratcomm/splitting.hpp"

namespace stratcomm {

/// Locale-independent shortest-round-trip formatting used by every CSV and
/// text record the tool emits.
std::string format_double(double v);

nlohmann::json solve_result_to_json(const SolveResult& r);
nlohmann::json dsbs_solution_to_json(const DsbsSolution& s);
nlohmann::json trial_stats_to_json(const TrialStats& s);
nlohmann::json capacity_result_to_json(const CapacityResult& r);

const char* dsbs_regime_name(DsbsRegime regime);

/// Writes rows as CSV with LF line endings and a fixed column order.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Minimal polyline plot (axes plus one path) as a self-contained SVG.
void write_svg_polyline(const std::string& path,
                        const std::vector<std::pair<double, double>>& points,
                        const std::string& x_label, const std::string& y_label);

}  // namespace stratcomm
