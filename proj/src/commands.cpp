#include "twotime/commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "twotime/analysis.hpp"
#include "twotime/eigen.hpp"
#include "twotime/error.hpp"
#include "twotime/grid_io.hpp"
#include "twotime/wavegroup.hpp"

namespace twotime {

using ojson = nlohmann::ordered_json;

namespace {

struct Prepared {
    TwoTimeState state;
    ojson info;
};

Prepared prepare(const RunConfig& cfg)
{
    if (const auto* b = std::get_if<BarrierWavegroupConfig>(&cfg.wavegroup)) {
        EigenOptions opts;
        opts.include_pe_phase = cfg.include_pe_phase;
        BarrierWavegroup wg = build_barrier_wavegroup(*b, cfg.system, opts);
        ojson info = {{"branches", wg.state.size()},
                      {"skipped_channels", wg.skipped},
                      {"ill_conditioned_channels", wg.ill_conditioned}};
        return {std::move(wg.state), std::move(info)};
    }
    TwoTimeState state = build_well_wavegroup(std::get<WellWavegroupConfig>(cfg.wavegroup), cfg.system);
    ojson info = {{"branches", state.size()}};
    return {std::move(state), std::move(info)};
}

const BarrierWavegroupConfig* barrier_group(const RunConfig& cfg)
{
    return std::get_if<BarrierWavegroupConfig>(&cfg.wavegroup);
}

ojson header(Command c, const RunConfig& cfg, const ojson& info)
{
    ojson j;
    j["command"] = to_string(c);
    j["config_hash"] = config_hash(cfg);
    j["preset"] = cfg.preset ? ojson(*cfg.preset) : ojson(nullptr);
    j["scenario"] = to_string(cfg.scenario);
    j["state"] = info;
    return j;
}

/// Writes the grid in the configured formats; returns the file names.
ojson write_grid(const RunConfig& cfg, const FieldGrid& grid, const std::string& stem, GridMeta meta)
{
    meta.emplace_back("config_hash", config_hash(cfg));
    ojson files = ojson::array();
    if (cfg.output.format != OutputFormat::Pgm) {
        const std::string path = artifact_path(cfg, stem + ".csv");
        write_atomic(path, format_csv(grid, meta));
        files.push_back(path);
    }
    if (cfg.output.format != OutputFormat::Csv) {
        const std::string path = artifact_path(cfg, stem + ".pgm");
        std::string comment = std::string(to_string(grid.kind)) + " rows " + grid.rows.name + " cols " +
                              grid.cols.name + " config_hash " + config_hash(cfg);
        write_atomic(path, format_pgm(grid, comment));
        files.push_back(path);
    }
    return files;
}

ojson peaks_json(const std::vector<Peak>& peaks)
{
    ojson out = ojson::array();
    for (const Peak& p : peaks)
        out.push_back({{"row", p.row}, {"col", p.col}, {"height", p.height}, {"width", p.width}});
    return out;
}

void require_times(const RunConfig& cfg)
{
    if (cfg.grid.times.empty())
        throw Error(ErrorKind::ValidationError, "grid.times: at least one time is required");
}

ojson run_coeffs(const RunConfig& cfg)
{
    if (cfg.scenario == Scenario::InfiniteWell)
        throw Error(ErrorKind::ValidationError, "scenario: coeffs needs a finite well or barrier");
    if (!cfg.coeffs)
        throw Error(ErrorKind::ValidationError, "coeffs: sweep block is required");
    const CoeffSweep& sweep = *cfg.coeffs;
    std::string csv = "# kind: coefficients\n# config_hash: " + config_hash(cfg) +
                      "\nE_rel,B_re,B_im,F_re,F_im,G_re,G_im,H_re,H_im,R,T,condition\n";
    std::size_t singular = 0;
    double worst_flux = 0.0;
    for (std::size_t k = 0; k < sweep.count; ++k) {
        const double E = sweep.count == 1
                             ? sweep.E_min
                             : sweep.E_min + (sweep.E_max - sweep.E_min) * static_cast<double>(k) /
                                                 static_cast<double>(sweep.count - 1);
        std::vector<double> row{E};
        try {
            const ScatteringCoefficients c = coefficients_for_energy(E, cfg.system);
            for (cdouble z : {c.B, c.F, c.G, c.H}) {
                row.push_back(z.real());
                row.push_back(z.imag());
            }
            const double R = std::norm(c.B);
            const double T = std::norm(c.H); // equal outer wavevectors
            row.insert(row.end(), {R, T, c.condition});
            worst_flux = std::max(worst_flux, std::abs(R + T - 1.0));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularMatch)
                throw;
            ++singular;
            row.resize(12, std::nan(""));
        }
        for (std::size_t i = 0; i < row.size(); ++i)
            csv += (i ? "," : "") + format_value(row[i]);
        csv += '\n';
    }
    const std::string path = artifact_path(cfg, "coeffs.csv");
    write_atomic(path, csv);
    return {{"rows", sweep.count},
            {"singular_rows", singular},
            {"max_flux_deviation", worst_flux},
            {"files", ojson::array({path})}};
}

/// `raw` collects the unnormalized grids for a following analysis.
ojson run_snapshot(const RunConfig& cfg, const TwoTimeState& state, std::vector<FieldGrid>* raw = nullptr)
{
    require_times(cfg);
    const GridSpec& g = cfg.grid;
    ojson out = ojson::array();
    for (std::size_t k = 0; k < g.times.size(); ++k) {
        const double t = g.times[k];
        FieldGrid pdf = snapshot(state, g.x1, g.n1, g.x2, g.n2, t, Normalization::Raw, cfg.threads);
        const FieldGrid grid = normalized(pdf, cfg.output.normalization);
        if (raw)
            raw->push_back(std::move(pdf));
        ojson entry;
        entry["t"] = t;
        entry["max_pdf"] = grid.max_value();
        entry["peaks"] = peaks_json(find_peaks(grid, cfg.analysis.peak_threshold, cfg.analysis.min_separation));
        entry["files"] = write_grid(cfg, grid, "snapshot_t" + std::to_string(k), {{"t1", format_value(t)},
                                                                                  {"t2", format_value(t)}});
        out.push_back(entry);
    }
    return out;
}

ojson run_asynch(const RunConfig& cfg, const TwoTimeState& state, bool write)
{
    if (cfg.asynch.empty())
        throw Error(ErrorKind::ValidationError, "asynch: at least one slice is required");
    const BarrierWavegroupConfig* bw = barrier_group(cfg);
    ojson out = ojson::array();
    for (std::size_t k = 0; k < cfg.asynch.size(); ++k) {
        const AsynchSpec& a = cfg.asynch[k];
        const FieldGrid grid =
            asynchronous_slice(state, a.x1, a.t1, a.x2, a.n2, a.t2, a.nt, cfg.output.normalization, cfg.threads);
        ojson entry = {{"x1", a.x1}, {"t1", a.t1}};
        ojson rows = ojson::array();
        for (std::size_t r = 0; r < grid.rows.count; ++r) {
            const double t2 = grid.rows.at(r);
            ojson row = {{"t2", t2}};
            row["peaks"] = peaks_json(
                find_peaks_in_row(grid, r, cfg.analysis.peak_threshold, cfg.analysis.min_separation));
            if (bw) {
                row["free_position"] = free_position(*bw, t2);
                row["recoil_position"] = reflected_centre(*bw, cfg.system, t2).x2;
            }
            rows.push_back(row);
        }
        entry["rows"] = rows;
        if (write)
            entry["files"] = write_grid(cfg, grid, "asynch_" + std::to_string(k),
                                        {{"x1", format_value(a.x1)}, {"t1", format_value(a.t1)}});
        out.push_back(entry);
    }
    return out;
}

/// Uniform double in [0, 1) from the top 53 bits; fixed across platforms.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ojson run_conserve(const RunConfig& cfg, const TwoTimeState& state)
{
    require_times(cfg);
    const GridSpec& g = cfg.grid;
    ojson out;
    ojson times = ojson::array();
    double worst = 0.0;
    std::vector<FieldGrid> pdfs;
    for (std::size_t k = 0; k < g.times.size(); ++k) {
        const double t = g.times[k];
        const ConservationReport r = conservation_grid(state, g.x1, g.n1, g.x2, g.n2, t, cfg.fd_step, cfg.threads);
        worst = std::max(worst, r.max_relative);
        ojson entry = {{"t", t},
                       {"max_relative", r.max_relative},
                       {"max_abs_residual", r.max_abs_residual},
                       {"max_scale", r.max_scale},
                       {"evaluated", r.evaluated},
                       {"excluded", r.excluded},
                       {"h", r.steps.h},
                       {"ht", r.steps.ht}};
        entry["files"] = write_grid(cfg, r.residual, "conserve_t" + std::to_string(k),
                                    {{"t1", format_value(t)}, {"t2", format_value(t)}});
        times.push_back(entry);
        pdfs.push_back(snapshot(state, g.x1, g.n1, g.x2, g.n2, t, Normalization::Raw, cfg.threads));
    }
    out["times"] = times;
    out["max_relative"] = worst;

    // Random segments anchored on cells carrying at least 10% of the peak PDF,
    // so every interval sees a non-trivial flux.
    std::mt19937_64 rng(cfg.conserve.seed);
    const double spacing = std::min(g.x1.hi - g.x1.lo, g.x2.hi - g.x2.lo) /
                           static_cast<double>(std::max(g.n1, g.n2) - 1);
    const double ht = default_fd_steps(state, spacing, cfg.fd_step).ht;
    ojson segments = ojson::array();
    double worst_segment = 0.0;
    for (std::size_t s = 0; s < cfg.conserve.segments; ++s) {
        const std::size_t k = static_cast<std::size_t>(unit(rng) * static_cast<double>(g.times.size()));
        const FieldGrid& pdf = pdfs[k];
        const double cut = 0.1 * pdf.max_value();
        std::vector<std::size_t> cells;
        for (std::size_t c = 0; c < pdf.values.size(); ++c)
            if (pdf.values[c] >= cut)
                cells.push_back(c);
        const std::size_t cell = cells[static_cast<std::size_t>(unit(rng) * static_cast<double>(cells.size()))];
        const double x1 = pdf.rows.at(cell / pdf.cols.count);
        const double x2 = pdf.cols.at(cell % pdf.cols.count);
        const int axis = unit(rng) < 0.5 ? 1 : 2;
        const Interval range = axis == 1 ? g.x1 : g.x2;
        const double centre = axis == 1 ? x1 : x2;
        const double len = (0.1 + 0.3 * unit(rng)) * (range.hi - range.lo);
        const double a = centre - len * unit(rng);
        const LabPoint p{x1, g.times[k], x2, g.times[k]};
        const SegmentBalance b = segment_balance(state, axis, a, a + len, p, ht, cfg.conserve.panels);
        worst_segment = std::max(worst_segment, b.relative());
        segments.push_back({{"axis", axis},
                            {"a", a},
                            {"b", a + len},
                            {"x1", x1},
                            {"x2", x2},
                            {"t", g.times[k]},
                            {"rate", b.rate},
                            {"flux_difference", b.flux_difference},
                            {"relative", b.relative()}});
    }
    out["segments"] = segments;
    out["segment_max_relative"] = worst_segment;
    return out;
}

/// `grids` may carry the raw snapshots at grid.times already computed.
ojson run_analyze(const RunConfig& cfg, const TwoTimeState& state, std::vector<FieldGrid> grids = {})
{
    ojson out;
    const GridSpec& g = cfg.grid;
    ojson snaps = ojson::array();
    for (std::size_t k = 0; k < g.times.size(); ++k) {
        const double t = g.times[k];
        if (k == grids.size())
            grids.push_back(snapshot(state, g.x1, g.n1, g.x2, g.n2, t, Normalization::Raw, cfg.threads));
        snaps.push_back({{"t", t},
                         {"peaks", peaks_json(find_peaks(grids[k], cfg.analysis.peak_threshold,
                                                         cfg.analysis.min_separation))}});
    }
    out["snapshots"] = snaps;

    const BarrierWavegroupConfig* bw = barrier_group(cfg);
    double v_centre = 0.0, dv = 0.0, V_centre = 0.0, dV = 0.0;
    if (bw) {
        v_centre = bw->v0;
        dv = bw->dv;
        V_centre = bw->V0;
        dV = bw->dV;
    } else {
        const auto& w = std::get<WellWavegroupConfig>(cfg.wavegroup);
        v_centre = well_mode_velocity(std::max(1, static_cast<int>(std::lround(w.n0))), w.V0, cfg.system);
        V_centre = w.V0;
        dV = w.dV;
    }
    const double lambda = 2.0 * std::numbers::pi * hbar / (cfg.system.m * std::abs(v_centre));

    if (const auto& f = cfg.analysis.fringe) {
        if (f->time_index >= grids.size())
            throw Error(ErrorKind::ValidationError, "analysis.fringe.time_index: no such snapshot time");
        const FieldGrid& grid = grids[f->time_index];
        const std::size_t lines = f->axis == LineAxis::AlongCols ? grid.rows.count : grid.cols.count;
        if (f->line >= lines)
            throw Error(ErrorKind::ValidationError, "analysis.fringe.line: outside the grid");
        const FringeReport r = fringe_spacing(grid, f->axis, f->line, f->window);
        out["fringes"] = {{"mean_spacing", r.mean_spacing},
                          {"spacing_stddev", r.spacing_stddev},
                          {"count", r.count},
                          {"maxima", r.maxima},
                          {"half_de_broglie", 0.5 * lambda}};
    }

    ojson coherence = {{"particle_wavelength", lambda}};
    if (dv > 0.0)
        coherence["particle"] = coherence_length(lambda, std::abs(v_centre), dv);
    if (V_centre != 0.0) {
        const double Lambda = 2.0 * std::numbers::pi * hbar / (cfg.system.M * std::abs(V_centre));
        coherence["barrier_wavelength"] = Lambda;
        coherence["barrier"] = coherence_length(Lambda, std::abs(V_centre), dV);
    }
    out["coherence_length"] = coherence;

    if (bw) {
        const VelocityPair after = classical_recoil({bw->v0, bw->V0}, cfg.system);
        out["classical"] = {{"v_after", after.v},
                            {"V_after", after.V},
                            {"contact_time", contact_time(*bw, cfg.system)}};
        if (!cfg.asynch.empty())
            out["asynch"] = run_asynch(cfg, state, false);
        if (const auto& t2 = cfg.analysis.type2) {
            Type2Options opts = t2->options;
            opts.threads = cfg.threads;
            ojson samples = ojson::array();
            for (const Type2Sample& s : type2_visibility(*bw, cfg.system, t2->D, opts))
                samples.push_back({{"D", s.D}, {"height", s.height}});
            out["type2"] = {{"central_barrier_wavevector", central_barrier_wavevector(*bw, cfg.system)},
                            {"samples", samples}};
        }
    } else if (!cfg.asynch.empty()) {
        out["asynch"] = run_asynch(cfg, state, false);
    }
    return out;
}

} // namespace

const char* to_string(Command c)
{
    switch (c) {
    case Command::Coeffs: return "coeffs";
    case Command::Snapshot: return "snapshot";
    case Command::Asynch: return "asynch";
    case Command::Conserve: return "conserve";
    case Command::Analyze: return "analyze";
    case Command::Preset: return "preset";
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name)
{
    for (Command c : {Command::Coeffs, Command::Snapshot, Command::Asynch, Command::Conserve, Command::Analyze,
                      Command::Preset})
        if (name == to_string(c))
            return c;
    return std::nullopt;
}

TwoTimeState build_state(const RunConfig& cfg) { return prepare(cfg).state; }

std::string artifact_path(const RunConfig& cfg, const std::string& suffix)
{
    return cfg.output.prefix + "_" + suffix;
}

ojson run_command(Command command, const RunConfig& cfg)
{
    cfg.validate();
    ojson summary;
    if (command == Command::Coeffs) {
        summary = header(command, cfg, ojson::object());
        summary["coeffs"] = run_coeffs(cfg);
    } else {
        const Prepared p = prepare(cfg);
        summary = header(command, cfg, p.info);
        switch (command) {
        case Command::Snapshot: summary["snapshots"] = run_snapshot(cfg, p.state); break;
        case Command::Asynch: summary["asynch"] = run_asynch(cfg, p.state, true); break;
        case Command::Conserve: summary["conserve"] = run_conserve(cfg, p.state); break;
        case Command::Analyze: summary["analysis"] = run_analyze(cfg, p.state); break;
        case Command::Preset:
            if (!cfg.preset)
                throw Error(ErrorKind::ValidationError, "preset: the preset command needs a named preset");
        {
            std::vector<FieldGrid> raw;
            if (!cfg.grid.times.empty())
                summary["snapshots"] = run_snapshot(cfg, p.state, &raw);
            if (!cfg.asynch.empty())
                summary["asynch"] = run_asynch(cfg, p.state, true);
            summary["analysis"] = run_analyze(cfg, p.state, std::move(raw));
        }
            break;
        case Command::Coeffs: break;
        }
    }
    write_atomic(artifact_path(cfg, "summary.json"), summary.dump(2) + "\n");
    return summary;
}

} // namespace twotime
