#ifndef TWOTIME_CONFIG_HPP
#define TWOTIME_CONFIG_HPP

// Run configuration: JSON ingestion, validation and the canonical form used
// for the config hash stamped into every artifact.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "twotime/analysis.hpp"
#include "twotime/field.hpp"
#include "twotime/model.hpp"
#include "twotime/wavegroup.hpp"

namespace twotime {

enum class Scenario { InfiniteWell, FiniteWell, Barrier };
enum class OutputFormat { Csv, Pgm, Both };

const char* to_string(Scenario s);
const char* to_string(OutputFormat f);

/// Particle frozen at (x1, t1); the barrier PDF is sampled over (t2, x2).
struct AsynchSpec {
    double x1 = 0.0;
    double t1 = 0.0;
    Interval x2;
    std::size_t n2 = 2;
    Interval t2;
    std::size_t nt = 1;
};

/// Relative-energy sweep for the `coeffs` table.
struct CoeffSweep {
    double E_min = 0.0;
    double E_max = 1.0;
    std::size_t count = 11;
};

struct ConserveSpec {
    std::size_t segments = 10;
    std::uint64_t seed = 1;
    int panels = 64;
};

struct FringeSpec {
    LineAxis axis = LineAxis::AlongCols;
    std::size_t line = 0;
    Interval window;
    std::size_t time_index = 0;
};

/// Peak-b height as the half-width takes the listed values.
struct Type2Spec {
    std::vector<double> D;
    Type2Options options;
};

struct AnalysisSpec {
    double peak_threshold = 0.15;
    std::size_t min_separation = 3;
    std::optional<FringeSpec> fringe;
    std::optional<Type2Spec> type2;
};

struct OutputSpec {
    OutputFormat format = OutputFormat::Csv;
    Normalization normalization = Normalization::Raw;
    std::string prefix = "twotime";
};

using WavegroupConfig = std::variant<BarrierWavegroupConfig, WellWavegroupConfig>;

struct RunConfig {
    std::optional<std::string> preset;
    Scenario scenario = Scenario::Barrier;
    SystemParams system;
    WavegroupConfig wavegroup;
    bool include_pe_phase = false;
    GridSpec grid;
    std::vector<AsynchSpec> asynch;
    std::optional<CoeffSweep> coeffs;
    ConserveSpec conserve;
    AnalysisSpec analysis;
    OutputSpec output;
    unsigned threads = 1;
    double fd_step = 0.0; ///< 0 selects default_fd_steps

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Parses and validates a JSON document. A top-level "preset" (optionally with
/// "anchors") supplies the base configuration; every other key overrides it.
/// Throws ParseError with line and column, or ValidationError naming the field
/// for unknown keys, wrong types and inconsistent values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out; parse_config(config_to_json(c))
/// reproduces c.
nlohmann::json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical JSON minus the output block and thread count, so
/// it identifies the physics and the sampling only. 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

} // namespace twotime

#endif
