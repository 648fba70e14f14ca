#ifndef TWOTIME_COMMANDS_HPP
#define TWOTIME_COMMANDS_HPP

// The CLI subcommands. Each one writes its grids under the output prefix and
// a machine-readable `<prefix>_summary.json`.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "twotime/config.hpp"
#include "twotime/state.hpp"

namespace twotime {

enum class Command { Coeffs, Snapshot, Asynch, Conserve, Analyze, Preset };

const char* to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// The configured wavegroup as an evaluable state.
TwoTimeState build_state(const RunConfig& cfg);

/// Runs one command and returns the summary it wrote. Errors propagate; grids
/// finished before the failure stay, and no partially written file remains.
nlohmann::ordered_json run_command(Command command, const RunConfig& cfg);

/// Path of an artifact: `<prefix>_<suffix>`.
std::string artifact_path(const RunConfig& cfg, const std::string& suffix);

} // namespace twotime

#endif
