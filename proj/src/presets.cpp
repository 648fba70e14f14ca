#include "twotime/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twotime/analysis.hpp"
#include "twotime/error.hpp"

namespace twotime {

namespace {

/// Length and time units implied by the anchors (hbar = 1).
struct Units {
    double m;
    double V0;
    double L; ///< hbar / (m V0)
    double T; ///< L / V0
};

Units units(const PresetAnchors& a)
{
    if (!(a.m > 0.0 && a.V0 > 0.0 && a.D >= 0.0))
        throw Error(ErrorKind::ValidationError, "anchors: m and V0 must be > 0, D >= 0");
    const double L = 1.0 / (a.m * a.V0);
    return {a.m, a.V0, L, L / a.V0};
}

std::size_t samples(Interval i, double spacing)
{
    return static_cast<std::size_t>(std::lround((i.hi - i.lo) / spacing)) + 1;
}

/// Shared by figs. 1-4: v0/V0 = 6, dv/dV = 1.5, M/m = 5. The particle group
/// (PDF width about 1.9 L) is a few times the default half-width 0.5 L.
RunConfig barrier_family(const PresetAnchors& a, double default_D, double contact)
{
    const Units u = units(a);
    RunConfig cfg;
    cfg.system.m = u.m;
    cfg.system.M = 5.0 * u.m;
    cfg.system.D = a.D > 0.0 ? a.D : default_D * u.L;
    BarrierWavegroupConfig w;
    w.V0 = u.V0;
    w.v0 = 6.0 * u.V0;
    w.dV = 0.25 * u.V0;
    w.dv = 1.5 * w.dV;
    w.Nv = 64;
    w.NV = 64;
    w.x2_0 = 0.0;
    // incident centre reaches x_rel = -D at t = contact
    w.x1_0 = w.x2_0 - cfg.system.D - (w.v0 - w.V0) * contact * u.T;
    cfg.wavegroup = w;
    cfg.grid.x1 = {-16.0 * u.L, 19.0 * u.L};
    cfg.grid.x2 = {-2.5 * u.L, 10.0 * u.L};
    cfg.grid.n1 = 200;
    cfg.grid.n2 = 200;
    cfg.grid.times = {0.0, contact * u.T, 2.0 * contact * u.T};
    return cfg;
}

/// PE such that (KE_rel - PE)/|PE| = ratio with PE of the given sign.
double pe_for_ratio(const BarrierWavegroupConfig& w, const SystemParams& s, double ratio, bool negative)
{
    const double ke = mean_relative_energy(w, s);
    return negative ? -ke / (ratio - 1.0) : ke / (ratio + 1.0);
}

RunConfig fig1(const PresetAnchors& a)
{
    RunConfig cfg = barrier_family(a, 0.5, 1.9);
    cfg.scenario = Scenario::FiniteWell;
    cfg.system.PE = pe_for_ratio(std::get<BarrierWavegroupConfig>(cfg.wavegroup), cfg.system, 1.4, true);
    return cfg;
}

RunConfig fig2(const PresetAnchors& a)
{
    // group wider than the barrier: twice fig1's half-width
    RunConfig cfg = barrier_family(a, 1.0, 1.9);
    cfg.scenario = Scenario::Barrier;
    cfg.system.PE = pe_for_ratio(std::get<BarrierWavegroupConfig>(cfg.wavegroup), cfg.system, 0.3, false);
    return cfg;
}

/// Particle frozen on peak b of fig. 1's last snapshot; t2 advances.
RunConfig fig3(const PresetAnchors& a)
{
    RunConfig cfg = fig1(a);
    const Units u = units(a);
    const auto& w = std::get<BarrierWavegroupConfig>(cfg.wavegroup);
    const double t1 = cfg.grid.times.back();
    AsynchSpec s;
    s.t1 = t1;
    s.x1 = reflected_centre(w, cfg.system, t1).x1;
    s.x2 = {-2.5 * u.L, 20.0 * u.L};
    s.n2 = samples(s.x2, 0.0625 * u.L);
    s.t2 = {t1, t1 + 4.0 * u.T};
    s.nt = 5;
    cfg.grid.times = {t1};
    cfg.asynch = {s};
    return cfg;
}

/// Particle frozen in the type I overlap at contact, 1 L to the incident side
/// of the surface so the interior (x_rel in [-D, D]) part of the slice sits
/// in the tail of the barrier group. The potential is fig. 1's; only v0
/// changes between 4a and 4b.
RunConfig fig4(const PresetAnchors& a, double v0_ratio)
{
    const Units u = units(a);
    const double contact = 2.0;
    RunConfig cfg = barrier_family(a, 0.5, contact);
    cfg.scenario = Scenario::FiniteWell;
    cfg.system.PE = fig1(a).system.PE;
    auto& w = std::get<BarrierWavegroupConfig>(cfg.wavegroup);
    w.v0 = v0_ratio * u.V0;
    w.x1_0 = w.x2_0 - cfg.system.D - (w.v0 - w.V0) * contact * u.T;
    const double tc = contact * u.T;
    AsynchSpec s;
    s.t1 = tc;
    s.x1 = w.x2_0 + w.V0 * tc - cfg.system.D - 1.0 * u.L;
    s.x2 = {-2.5 * u.L, 22.5 * u.L};
    s.n2 = samples(s.x2, 0.125 * u.L);
    s.t2 = {tc, tc + 5.0 * u.T};
    s.nt = 6;
    cfg.grid.times = {tc};
    cfg.asynch = {s};
    return cfg;
}

/// Figs. 5 and 6: M/m = 10, dV/V0 = 1/30, mode width dx = 1/15 in units of D.
/// The default D = 30 L keeps the well group (PDF width about 2 L) well
/// inside the well.
RunConfig well_family(const PresetAnchors& a)
{
    const Units u = units(a);
    RunConfig cfg;
    cfg.scenario = Scenario::InfiniteWell;
    cfg.system.kind = PotentialKind::InfiniteWell;
    cfg.system.m = u.m;
    cfg.system.M = 10.0 * u.m;
    cfg.system.D = a.D > 0.0 ? a.D : 30.0 * u.L;
    WellWavegroupConfig w;
    w.V0 = u.V0;
    w.dV = u.V0 / 30.0;
    w.dx = 1.0 / 15.0;
    w.NV = 64;
    cfg.wavegroup = w;
    return cfg;
}

/// Covers the relative range [-D, D] around the centre of mass, which moves
/// at the mean channel speed (m v + M V0) / M_tot.
void well_grid(RunConfig& cfg, const Units& u, double t_end)
{
    const SystemParams& s = cfg.system;
    const auto& w = std::get<WellWavegroupConfig>(cfg.wavegroup);
    const int n = std::max(1, static_cast<int>(std::lround(w.n0)));
    const double V_cm = (s.m * well_mode_velocity(n, w.V0, s) + s.M * w.V0) / s.total_mass();
    const double end = V_cm * t_end;
    const double r1 = s.D * s.M / s.total_mass();
    const double r2 = s.D * s.m / s.total_mass();
    cfg.grid.x1 = {-r1 - 10.0 * u.L, end + r1 + 10.0 * u.L};
    cfg.grid.x2 = {-r2 - 10.0 * u.L, end + r2 + 10.0 * u.L};
    cfg.grid.n1 = samples(cfg.grid.x1, 0.25 * u.L);
    cfg.grid.n2 = samples(cfg.grid.x2, 0.25 * u.L);
}

/// Relative group starts at the centre of the well, so the walls are met at
/// the second and fourth of six equally spaced snapshots (and, by the same
/// period, again at the sixth).
RunConfig fig5(const PresetAnchors& a)
{
    const Units u = units(a);
    RunConfig cfg = well_family(a);
    auto& w = std::get<WellWavegroupConfig>(cfg.wavegroup);
    w.n0 = 50.0;
    const double v_rel = well_mode_velocity(50, 0.0, cfg.system);
    const double step = cfg.system.D / v_rel;
    for (int k = 0; k < 6; ++k)
        cfg.grid.times.push_back(k * step);
    well_grid(cfg, u, cfg.grid.times.back());
    return cfg;
}

/// Ground state only; the asynchronous rows share t1 with the first snapshot.
/// At fixed x1 the slice vanishes once the well leaves [x1 - D, x1 + D], so
/// t2 advances by at most D / (1.5 V0).
RunConfig fig6(const PresetAnchors& a)
{
    const Units u = units(a);
    RunConfig cfg = well_family(a);
    auto& w = std::get<WellWavegroupConfig>(cfg.wavegroup);
    w.n0 = 1.0;
    w.n_min = 1;
    w.n_max = 1;
    const double D = cfg.system.D;
    const double step = D / (6.0 * w.V0);
    cfg.grid.times = {0.0, step, 2.0 * step};
    well_grid(cfg, u, cfg.grid.times.back());
    for (double x1 : {-0.5 * D, 0.0, 0.5 * D}) {
        AsynchSpec s;
        s.x1 = x1;
        s.t1 = 0.0;
        s.x2 = {-D - 15.0 * u.L, D + 15.0 * u.L};
        s.n2 = samples(s.x2, 0.25 * u.L);
        s.t2 = {0.0, 4.0 * step};
        s.nt = 5;
        cfg.asynch.push_back(s);
    }
    return cfg;
}

} // namespace

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4a", "fig4b", "fig5", "fig6"}; }

RunConfig make_preset(std::string_view name, const PresetAnchors& anchors)
{
    RunConfig cfg;
    if (name == "fig1")
        cfg = fig1(anchors);
    else if (name == "fig2")
        cfg = fig2(anchors);
    else if (name == "fig3")
        cfg = fig3(anchors);
    else if (name == "fig4a")
        cfg = fig4(anchors, 4.6);
    else if (name == "fig4b")
        cfg = fig4(anchors, 6.1);
    else if (name == "fig5")
        cfg = fig5(anchors);
    else if (name == "fig6")
        cfg = fig6(anchors);
    else
        throw Error(ErrorKind::ValidationError, "preset: unknown name '" + std::string(name) + "'");
    cfg.preset = std::string(name);
    cfg.output.prefix = std::string(name);
    cfg.validate();
    return cfg;
}

double energy_ratio(const BarrierWavegroupConfig& cfg, const SystemParams& params)
{
    return (mean_relative_energy(cfg, params) - params.PE) / std::abs(params.PE);
}

} // namespace twotime
