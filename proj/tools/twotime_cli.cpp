// twotime: command-line front end.
//
//   twotime snapshot --preset fig1 --out out/fig1 --format both
//   twotime conserve --config run.json --threads 8
//   twotime preset fig5

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "twotime/commands.hpp"
#include "twotime/config.hpp"
#include "twotime/error.hpp"
#include "twotime/presets.hpp"

namespace {

std::string list_presets()
{
    std::string s;
    for (const auto& name : twotime::preset_names())
        s += (s.empty() ? "" : ", ") + name;
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace twotime;

    CLI::App app{"Two-body, two-time wavefunctions for a particle and a moving well or barrier"};
    app.set_version_flag("--version", "twotime 1.0");

    std::string command;
    std::string preset_arg;
    std::string config_path;
    std::string preset;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> normalize;
    std::optional<unsigned> threads;
    std::optional<double> fd_step;
    std::optional<double> peak_threshold;

    app.add_option("command", command, "coeffs | snapshot | asynch | conserve | analyze | preset")
        ->required()
        ->check(CLI::IsMember({"coeffs", "snapshot", "asynch", "conserve", "analyze", "preset"}));
    app.add_option("name", preset_arg, "preset name for the `preset` command (" + list_presets() + ")");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--preset", preset, "start from a named figure preset (" + list_presets() + ")");
    app.add_option("--out", out, "output path prefix");
    app.add_option("--format", format, "grid format")->check(CLI::IsMember({"csv", "pgm", "both"}));
    app.add_option("--normalize", normalize, "grid normalization")->check(CLI::IsMember({"raw", "max1"}));
    app.add_option("--threads", threads, "worker threads for grid evaluation")->check(CLI::PositiveNumber);
    app.add_option("--fd-step", fd_step, "finite-difference step h (0 = automatic)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--peak-threshold", peak_threshold, "peak threshold relative to the grid maximum")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_code(ErrorKind::ValidationError);
    }

    try {
        if (!preset_arg.empty()) {
            if (command != "preset")
                throw Error(ErrorKind::ValidationError, "positional preset name is only valid for `preset`");
            if (!preset.empty() && preset != preset_arg)
                throw Error(ErrorKind::ValidationError, "conflicting preset names");
            preset = preset_arg;
        }

        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
            const RunConfig base = load_config(config_path);
            doc = config_to_json(base);
        }
        if (!preset.empty()) {
            if (config_path.empty()) {
                doc["preset"] = preset;
            } else if (!doc.contains("preset") || doc["preset"] != preset) {
                throw Error(ErrorKind::ValidationError,
                            "--preset conflicts with the config file; put \"preset\" in the file instead");
            }
        }
        if (config_path.empty() && preset.empty())
            throw Error(ErrorKind::ValidationError, "either --config or --preset is required");

        if (out)
            doc["output"]["prefix"] = *out;
        if (format)
            doc["output"]["format"] = *format;
        if (normalize)
            doc["output"]["normalize"] = *normalize;
        if (threads)
            doc["threads"] = *threads;
        if (fd_step)
            doc["fd_step"] = *fd_step;
        if (peak_threshold)
            doc["analysis"]["peak_threshold"] = *peak_threshold;

        const RunConfig cfg = parse_config(doc.dump());
        const auto cmd = parse_command(command);
        run_command(*cmd, cfg);
        std::cout << artifact_path(cfg, "summary.json") << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "twotime: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "twotime: " << e.what() << "\n";
        return 1;
    }
}
