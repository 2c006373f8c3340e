#ifndef YAMABE_IO_HPP
#define YAMABE_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "yamabe/analysis.hpp"
#include "yamabe/geometry.hpp"
#include "yamabe/ode.hpp"

namespace yamabe::io {

/// Shortest-roundtrip style formatting with a fixed significant-digit count
/// ("%.Ng"); all file output goes through this so repeated runs are
/// byte-identical.
std::string format_float(double v, int precision = 17);

/// Solution CSV: header "r,u,du", one row per sample.
void write_solution_csv(const std::filesystem::path& path, const RadialSolution& sol,
                        int precision = 17);

/// Reads a solution CSV back; params / warp name / u0 are supplied by the
/// caller (normally from the sidecar metadata).
RadialSolution read_solution_csv(const std::filesystem::path& path,
                                 const ModelParams& params, std::string warp_name,
                                 Termination termination, double r_stop);

/// Sidecar metadata for a solution run.
nlohmann::json solution_metadata(const RadialSolution& sol);

/// Sweep CSV: header
/// "u0,class,witness_r,length_numeric,length_total,verdict,decay_c,decay_C,termination".
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows,
                     int precision = 17);

/// JSON mirror of the sweep table.
nlohmann::json sweep_report(const std::vector<SweepRow>& rows);

/// Loads a tabulated warp from CSV with header "r,f,df,d2f" (strictly
/// increasing r from 0). Interpolation is the monotone cubic documented on
/// WarpingFunction; the df/d2f columns are validated at the origin.
WarpingFunction load_warp_table_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace yamabe::io

#endif
