#pragma once

#include "dnls/evolver.hpp"
#include "dnls/experiment.hpp"
#include "dnls/linop.hpp"
#include "dnls/modulation.hpp"
#include "dnls/soliton.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dnls::io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;
inline constexpr const char* output_dir_env = "DNLS_OUTPUT_DIR";

/// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const json& config);

/// $DNLS_OUTPUT_DIR if set and non-empty, otherwise ./dnls_out.
std::filesystem::path default_output_dir();

/// Shortest round-trip decimal representation.
std::string format_double(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;  ///< extra "# key: value" lines
};

/**
 * CSV with a '#'-prefixed header block: schema version, config hash, grid
 * description and any table metadata, followed by the column names.
 */
void write_csv(const std::filesystem::path& path, const Table& table, const json& config, const Grid* grid);
Table read_csv(const std::filesystem::path& path);

/// JSON report wrapped with schema_version, config_hash, config and grid.
void write_json(const std::filesystem::path& path, const json& report, const json& config, const Grid* grid);
json read_json(const std::filesystem::path& path);

json to_json(const Grid& g);
json to_json(const SolitonParams& p);
json to_json(const ConservedTriple& c);
json to_json(const EvolveConfig& c);
json to_json(const InstabilityReport& r);

Table profile_table(const Soliton& sol);
Table snapshot_table(const ComplexField& u);
Table conserved_table(const Trajectory& traj);
Table eigenvalue_table(const SpectralData& sd);
Table chi_table(const SpectralData& sd);
Table track_table(const ModulationTrack& trk);
Table instability_table(const InstabilityReport& r);

} // namespace dnls::io
