#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "ergolab/attractors.hpp"
#include "ergolab/entropy_mixing.hpp"
#include "ergolab/ergodic_stats.hpp"
#include "ergolab/lyapunov.hpp"
#include "ergolab/measures.hpp"
#include "ergolab/phase_space.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

using Json = nlohmann::json;

/// Finite doubles as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json number_to_json(double v);
double number_from_json(const Json& j);

Json to_json(const PhaseSpace& space);
PhaseSpace space_from_json(const Json& j);

Json to_json(const Point& p);
Point point_from_json(const PhaseSpace& space, const Json& j);

Json to_json(const Partition& partition);
Partition partition_from_json(const Json& j);

Json to_json(const GridSet& set);
GridSet grid_set_from_json(const Json& j);

/// {"type": "dirac"|"empirical"|"histogram", "space": ..., "data": ...}.
Json to_json(const Measure& mu, const PhaseSpace& space);
Measure measure_from_json(const Json& j);

Json to_json(const GroundTruth& truth);
Json to_json(const BirkhoffSeries& s);
Json to_json(const POmegaEstimate& e);
Json to_json(const LyapunovSpectrum& s);
Json to_json(const HyperbolicityReport& r);
Json to_json(const AttractorReport& r);
/// Representatives are summarized by start point, length and integrals.
Json to_json(const SRBLikeReport& r);
Json to_json(const StabilityProbe& p);
Json to_json(const CorrelationSeries& s);
Json to_json(const EntropyEstimate& e);
Json to_json(const PesinResidual& r);

/// Names, parameter schemas and ground-truth metadata of every built-in system.
Json catalog_json();

/// "n,value" CSV with a header row.
std::string series_csv(std::span<const std::size_t> n, std::span<const double> values);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ergolab
