#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "twotime/commands.hpp"
#include "twotime/config.hpp"
#include "twotime/error.hpp"
#include "twotime/grid_io.hpp"
#include "twotime/presets.hpp"

using namespace twotime;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("config was accepted: " << text);
    return ErrorKind::IoError;
}

std::string message_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

fs::path scratch(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / ("twotime_io_" + name);
    fs::remove_all(dir);
    return dir;
}

const char* small_barrier = R"({
  "scenario": "barrier",
  "system": {"m": 1, "M": 5, "PE": 0, "D": 0.5},
  "wavegroup": {"type": "barrier", "v0": 6, "dv": 0.375, "V0": 1, "dV": 0.25, "Nv": 8, "NV": 8, "x1_0": -6},
  "grid": {"x1": [-10, 4], "x2": [-2, 4], "n1": 23, "n2": 17, "times": [0, 1]}
})";

} // namespace

TEST_CASE("preset table carries the figure ratios")
{
    for (const char* name : {"fig1", "fig2", "fig3", "fig4a", "fig4b"}) {
        CAPTURE(name);
        const RunConfig c = make_preset(name);
        const auto& w = std::get<BarrierWavegroupConfig>(c.wavegroup);
        CHECK(w.dv / w.dV == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(c.system.M / c.system.m == doctest::Approx(5.0).epsilon(1e-15));
    }
    const RunConfig f1 = make_preset("fig1");
    const auto& w1 = std::get<BarrierWavegroupConfig>(f1.wavegroup);
    CHECK(w1.v0 / w1.V0 == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(energy_ratio(w1, f1.system) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(f1.system.PE < 0.0);
    CHECK(f1.scenario == Scenario::FiniteWell);
    CHECK(f1.grid.times.size() == 3);

    const RunConfig f2 = make_preset("fig2");
    const auto& w2 = std::get<BarrierWavegroupConfig>(f2.wavegroup);
    CHECK(w2.v0 / w2.V0 == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(energy_ratio(w2, f2.system) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(f2.system.PE > 0.0);
    CHECK(f2.scenario == Scenario::Barrier);

    const RunConfig a = make_preset("fig4a");
    const RunConfig b = make_preset("fig4b");
    const auto& wa = std::get<BarrierWavegroupConfig>(a.wavegroup);
    const auto& wb = std::get<BarrierWavegroupConfig>(b.wavegroup);
    CHECK(wa.v0 / wa.V0 == doctest::Approx(4.6).epsilon(1e-15));
    CHECK(wb.v0 / wb.V0 == doctest::Approx(6.1).epsilon(1e-15));
    CHECK(a.system.PE == b.system.PE);
    CHECK(a.asynch.size() == 1);
    CHECK(a.asynch[0].x1 == b.asynch[0].x1);
    CHECK(a.asynch[0].t1 == b.asynch[0].t1);

    for (const char* name : {"fig5", "fig6"}) {
        CAPTURE(name);
        const RunConfig c = make_preset(name);
        const auto& w = std::get<WellWavegroupConfig>(c.wavegroup);
        CHECK(c.scenario == Scenario::InfiniteWell);
        CHECK(w.dx == doctest::Approx(1.0 / 15.0).epsilon(1e-15));
        CHECK(w.dV / w.V0 == doctest::Approx(1.0 / 30.0).epsilon(1e-15));
        CHECK(c.system.M / c.system.m == doctest::Approx(10.0).epsilon(1e-15));
    }
    const auto& w5 = std::get<WellWavegroupConfig>(make_preset("fig5").wavegroup);
    CHECK(w5.n0 == 50.0);
    const auto& w6 = std::get<WellWavegroupConfig>(make_preset("fig6").wavegroup);
    CHECK(w6.n_min == 1);
    CHECK(w6.n_max == 1);
    CHECK(well_modes(w6) == std::vector<int>{1});
}

TEST_CASE("anchors rescale presets without changing the ratios")
{
    const RunConfig c = parse_config(R"({"preset": "fig1", "anchors": {"m": 2, "V0": 3}})");
    const auto& w = std::get<BarrierWavegroupConfig>(c.wavegroup);
    CHECK(c.system.m == 2.0);
    CHECK(w.V0 == 3.0);
    CHECK(w.v0 == doctest::Approx(18.0));
    CHECK(energy_ratio(w, c.system) == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(kind_of(R"({"anchors": {"m": 2}})") == ErrorKind::ValidationError);
    CHECK(kind_of(R"({"preset": "fig1", "anchors": {"mass": 2}})") == ErrorKind::ValidationError);
}

TEST_CASE("preset keys are overridden by the document")
{
    const RunConfig c = parse_config(R"({"preset": "fig1", "grid": {"n1": 50}, "output": {"prefix": "x/y"}})");
    CHECK(c.grid.n1 == 50);
    CHECK(c.grid.n2 == 200);
    CHECK(c.output.prefix == "x/y");
    CHECK(c.preset == std::optional<std::string>("fig1"));
    CHECK(kind_of(R"({"preset": "fig9"})") == ErrorKind::ValidationError);
}

TEST_CASE("parse errors carry line and column")
{
    const std::string text = "{\n  \"scenario\": \"barrier\",\n  \"system\": {\"m\": 1,, \"M\": 5}\n}";
    CHECK(kind_of(text) == ErrorKind::ParseError);
    CHECK(message_of(text).find("line 3, column 21") != std::string::npos);
    CHECK(kind_of("") == ErrorKind::ParseError);
    CHECK(kind_of("[1, 2]") == ErrorKind::ValidationError);
}

TEST_CASE("validation names the offending field")
{
    std::string doc = small_barrier;
    auto with = [&](const std::string& from, const std::string& to) {
        std::string s = doc;
        const auto at = s.find(from);
        REQUIRE(at != std::string::npos);
        return s.replace(at, from.size(), to);
    };
    CHECK(message_of(with("\"v0\": 6", "\"v0\": 6, \"v00\": 1")).find("wavegroup.v00: unknown key") !=
          std::string::npos);
    CHECK(message_of(with("\"n1\": 23", "\"n1\": \"23\"")).find("grid.n1") != std::string::npos);
    CHECK(message_of(with("\"PE\": 0", "\"PE\": -1")).find("system.PE") != std::string::npos);
    CHECK(message_of(with("\"scenario\": \"barrier\"", "\"scenario\": \"finite-well\"")).find("system.PE") !=
          std::string::npos);
    CHECK(message_of(with("\"scenario\": \"barrier\"", "\"scenario\": \"infinite-well\"")).find("wavegroup.type") !=
          std::string::npos);
    CHECK(message_of(with("\"M\": 5", "\"M\": 0")).find("system") != std::string::npos);
    CHECK(message_of(with("\"dv\": 0.375", "\"dv\": 0")).find("wavegroup") != std::string::npos);
    CHECK(message_of(with("\"times\": [0, 1]", "\"times\": [0, 1], \"colour\": 1")).find("grid.colour") !=
          std::string::npos);
    CHECK(message_of(with("\"scenario\": \"barrier\"", "\"scenario\": \"slab\"")).find("scenario") !=
          std::string::npos);
    CHECK(kind_of(R"({"system": {}, "wavegroup": {"type": "well"}})") == ErrorKind::ValidationError);
}

TEST_CASE("canonical JSON round-trips and the hash tracks the physics only")
{
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const RunConfig c = make_preset(name);
        const RunConfig back = parse_config(config_to_json(c).dump());
        CHECK(config_to_json(back) == config_to_json(c));
        CHECK(config_hash(back) == config_hash(c));
    }
    RunConfig c = parse_config(small_barrier);
    const std::string h = config_hash(c);
    CHECK(h.size() == 16);
    c.threads = 7;
    c.output.prefix = "elsewhere";
    c.output.format = OutputFormat::Both;
    CHECK(config_hash(c) == h);
    c.system.D = 0.6;
    CHECK(config_hash(c) != h);
}

TEST_CASE("CSV format and round trip")
{
    FieldGrid g;
    g.rows = {"x1", -1.0, 1.0, 2};
    g.cols = {"x2", 0.0, 2.0, 3};
    g.values = {1.0, 0.5, -2.25e-7, std::nan(""), 1e300, 0.0};
    const std::string text = format_csv(g, {{"t1", format_value(0.5)}});
    CHECK(text.find("# rows: x1 -1.000000000000e+00 1.000000000000e+00 2\n") != std::string::npos);
    CHECK(text.find("# t1: 5.000000000000e-01\n") != std::string::npos);
    CHECK(text.find("1.000000000000e+00,5.000000000000e-01,-2.250000000000e-07\n") != std::string::npos);
    CHECK(text.find("nan,1.000000000000e+300,0.000000000000e+00\n") != std::string::npos);
    GridMeta meta;
    const FieldGrid back = parse_csv(text, &meta);
    CHECK(back.rows.count == 2);
    CHECK(back.cols.hi == 2.0);
    CHECK(std::isnan(back.values[3]));
    CHECK(back.values[2] == -2.25e-7);
    REQUIRE(meta.size() == 1);
    CHECK(meta[0].first == "t1");
    CHECK_THROWS_AS(parse_csv("# rows: x1 0 1 2\n1,2\n"), Error);
}

TEST_CASE("PGM puts the highest row coordinate on top")
{
    FieldGrid g;
    g.rows = {"x1", 0.0, 1.0, 2};
    g.cols = {"x2", 0.0, 1.0, 2};
    g.values = {0.0, 0.25, 1.0, std::nan("")};
    CHECK(format_pgm(g, "") == "P2\n2 2\n65535\n65535 0\n0 16384\n");
}

TEST_CASE("atomic writes create directories and leave no temporaries")
{
    const fs::path dir = scratch("atomic");
    const fs::path file = dir / "a" / "b.csv";
    write_atomic(file, "one\n");
    write_atomic(file, "two\n");
    CHECK(read_file(file) == "two\n");
    CHECK_FALSE(fs::exists(file.string() + ".tmp"));
    CHECK_THROWS_AS(write_atomic(file / "under_a_file", "x"), Error);
    CHECK_THROWS_AS(load_config(dir / "missing.json"), Error);
    fs::remove_all(dir);
}

TEST_CASE("coeffs with PE = 0 gives identity rows")
{
    const fs::path dir = scratch("coeffs");
    RunConfig c = parse_config(small_barrier);
    c.coeffs = CoeffSweep{0.5, 20.0, 7};
    c.output.prefix = (dir / "z").string();
    const auto summary = run_command(Command::Coeffs, c);
    CHECK(summary["coeffs"]["rows"] == 7);
    const std::string text = read_file(dir / "z_coeffs.csv");
    std::size_t rows = 0;
    std::size_t pos = text.find("condition\n") + 10;
    while (pos < text.size()) {
        const std::size_t end = text.find('\n', pos);
        std::vector<double> v;
        std::size_t a = pos;
        while (a < end) {
            const std::size_t b = std::min(text.find(',', a), end);
            v.push_back(std::stod(text.substr(a, b - a)));
            a = b + 1;
        }
        REQUIRE(v.size() == 12);
        CHECK(std::hypot(v[1], v[2]) < 1e-12);           // B
        CHECK(std::hypot(v[3] - 1.0, v[4]) < 1e-12);     // F
        CHECK(std::hypot(v[5], v[6]) < 1e-12);           // G
        CHECK(std::hypot(v[7] - 1.0, v[8]) < 1e-12);     // H
        ++rows;
        pos = end + 1;
    }
    CHECK(rows == 7);
    fs::remove_all(dir);
}

TEST_CASE("snapshot artifacts and thread-count independence")
{
    const fs::path dir = scratch("snapshot");
    RunConfig c = parse_config(small_barrier);
    c.output.format = OutputFormat::Both;
    c.output.prefix = (dir / "one" / "s").string();
    const auto s1 = run_command(Command::Snapshot, c);
    c.threads = 3;
    c.output.prefix = (dir / "three" / "s").string();
    run_command(Command::Snapshot, c);
    for (const char* f : {"s_snapshot_t0.csv", "s_snapshot_t1.csv", "s_snapshot_t1.pgm"}) {
        CAPTURE(f);
        CHECK(read_file(dir / "one" / f) == read_file(dir / "three" / f));
    }
    CHECK(fs::exists(dir / "one" / "s_summary.json"));
    CHECK(s1["snapshots"].size() == 2);
    CHECK(s1["config_hash"] == config_hash(c));
    const FieldGrid g = parse_csv(read_file(dir / "one" / "s_snapshot_t1.csv"));
    CHECK(g.rows.count == 23);
    CHECK(g.cols.count == 17);
    fs::remove_all(dir);
}

TEST_CASE("command preconditions")
{
    RunConfig c = parse_config(small_barrier);
    c.output.prefix = (scratch("pre") / "p").string();
    CHECK_THROWS_AS(run_command(Command::Asynch, c), Error);
    CHECK_THROWS_AS(run_command(Command::Coeffs, c), Error);
    CHECK_THROWS_AS(run_command(Command::Preset, c), Error);
    CHECK(parse_command("conserve") == Command::Conserve);
    CHECK_FALSE(parse_command("plot").has_value());
}
