#pragma once

// CSV / JSON serialisation for harness and oracle outputs. Doubles are written
// with 17 significant digits (CSV) or shortest round-trip form (JSON); nothing
// time- or host-dependent is ever emitted, so identical runs give identical bytes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymer_lab/mc_harness.hpp"

namespace plab {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

inline constexpr const char* kReplicaCsvHeader = "replica_id,seed,d,N,c,Z,K,msd,linear,remainder";

void write_replicas_csv(std::ostream& out, int d, const std::vector<GridPointRun>& runs);
std::string replicas_csv(int d, const std::vector<GridPointRun>& runs);

/// Resolved configuration. Worker count and output directory are left out:
/// they cannot change any result.
Json to_json(const ExperimentConfig& config);
Json to_json(const DistributionStats& s);
Json to_json(const NormalityStats& s);
Json to_json(const ConcentrationStats& s);
Json to_json(const ZMomentStats& s);

/// Two-space indent plus trailing newline.
std::string dump(const Json& j);

/// Creates parent directories. Throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace plab
