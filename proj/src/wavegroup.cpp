#include "twotime/wavegroup.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twotime/error.hpp"

namespace twotime {

namespace {

void require(bool ok, const char* field, const char* rule)
{
    if (!ok)
        throw Error(ErrorKind::InvalidParams, std::string(field) + " " + rule);
}

// e^{-i(k x1_0 + K x2_0)} moves the incident group's t = 0 centre to (x1_0, x2_0).
cdouble placement_phase(double v, double V, const SystemParams& params, double x1_0, double x2_0)
{
    const double phase = (params.m * v * x1_0 + params.M * V * x2_0) / hbar;
    return {std::cos(phase), -std::sin(phase)};
}

} // namespace

void BarrierWavegroupConfig::validate() const
{
    require(std::isfinite(v0) && std::isfinite(V0), "v0/V0", "must be finite");
    require(dv > 0.0, "dv", "must be > 0");
    require(dV > 0.0, "dV", "must be > 0");
    require(Nv >= 2, "Nv", "must be >= 2");
    require(NV >= 2, "NV", "must be >= 2");
    require(span > 0.0, "span", "must be > 0");
}

void WellWavegroupConfig::validate() const
{
    require(dx > 0.0, "dx", "must be > 0");
    require(dV > 0.0, "dV", "must be > 0");
    require(NV >= 2, "NV", "must be >= 2");
    require(span > 0.0, "span", "must be > 0");
    require(min_weight > 0.0 && min_weight < 1.0, "min_weight", "must lie in (0, 1)");
    require(n_max == 0 || n_max >= n_min, "n_max", "must be >= n_min");
}

std::vector<QuadratureNode> gaussian_trapezoid(double center, double width, int count, double span)
{
    std::vector<QuadratureNode> nodes(static_cast<std::size_t>(count));
    const double lo = center - span * width;
    const double step = 2.0 * span * width / (count - 1);
    const double norm = 1.0 / std::sqrt(width);
    for (int i = 0; i < count; ++i) {
        const double x = lo + step * i;
        const double z = (x - center) / width;
        const double end = (i == 0 || i == count - 1) ? 0.5 : 1.0;
        nodes[static_cast<std::size_t>(i)] = {x, end * step * norm * std::exp(-0.5 * z * z)};
    }
    return nodes;
}

std::vector<WavegroupNode> barrier_nodes(const BarrierWavegroupConfig& cfg)
{
    cfg.validate();
    const auto vs = gaussian_trapezoid(cfg.v0, cfg.dv, cfg.Nv, cfg.span);
    const auto Vs = gaussian_trapezoid(cfg.V0, cfg.dV, cfg.NV, cfg.span);
    std::vector<WavegroupNode> nodes;
    nodes.reserve(vs.size() * Vs.size());
    for (const auto& V : Vs)
        for (const auto& v : vs)
            nodes.push_back({v.x, V.x, v.weight * V.weight});
    return nodes;
}

BarrierWavegroup build_barrier_wavegroup(std::span<const WavegroupNode> nodes, const SystemParams& params,
                                         double x1_0, double x2_0, const EigenOptions& opts)
{
    params.validate();
    BarrierWavegroup wg{TwoTimeState(params)};
    for (const WavegroupNode& node : nodes) {
        const VelocityPair vp{node.v, node.V};
        if (node.v == node.V) {
            ++wg.skipped;
            continue;
        }
        const ScatteringCoefficients c = barrier_coefficients(vp, params);
        if (c.ill_conditioned())
            ++wg.ill_conditioned;
        wg.state.append(barrier_state(vp, c, params, opts),
                        node.weight * placement_phase(node.v, node.V, params, x1_0, x2_0));
    }
    return wg;
}

BarrierWavegroup build_barrier_wavegroup(const BarrierWavegroupConfig& cfg, const SystemParams& params,
                                         const EigenOptions& opts)
{
    const auto nodes = barrier_nodes(cfg);
    return build_barrier_wavegroup(nodes, params, cfg.x1_0, cfg.x2_0, opts);
}

cdouble barrier_wavegroup(const BarrierWavegroupConfig& cfg, const SystemParams& params, const LabPoint& p)
{
    return evaluate(build_barrier_wavegroup(cfg, params).state, p);
}

double well_mode_weight(const WellWavegroupConfig& cfg, int n)
{
    const double z = (n - cfg.n0) * std::numbers::pi * cfg.dx;
    return std::exp(-z * z);
}

std::vector<int> well_modes(const WellWavegroupConfig& cfg)
{
    cfg.validate();
    std::vector<int> modes;
    if (cfg.n_max > 0) {
        if (cfg.n_min < 1)
            throw Error(ErrorKind::InvalidMode, "mode range starts at n = " + std::to_string(cfg.n_min));
        for (int n = cfg.n_min; n <= cfg.n_max; ++n)
            modes.push_back(n);
        return modes;
    }
    // weight >= min_weight  <=>  |n - n0| <= sqrt(-ln min_weight) / (pi dx)
    const double reach = std::sqrt(-std::log(cfg.min_weight)) / (std::numbers::pi * cfg.dx);
    const int lo = std::max(1, static_cast<int>(std::ceil(cfg.n0 - reach)));
    const int hi = static_cast<int>(std::floor(cfg.n0 + reach));
    for (int n = lo; n <= hi; ++n)
        if (well_mode_weight(cfg, n) >= cfg.min_weight)
            modes.push_back(n);
    if (modes.empty())
        throw Error(ErrorKind::InvalidMode, "no mode n >= 1 carries weight >= min_weight");
    return modes;
}

TwoTimeState build_well_wavegroup(const WellWavegroupConfig& cfg, const SystemParams& params)
{
    params.validate();
    const auto modes = well_modes(cfg);
    const auto Vs = gaussian_trapezoid(cfg.V0, cfg.dV, cfg.NV, cfg.span);
    // Unshifted, the modes sin(k_n (x_rel + D)) add up at the wall x_rel = -D;
    // move the relative origin by D while keeping the centre of mass.
    const double x1_0 = cfg.x1_0 + params.D * params.M / params.total_mass();
    const double x2_0 = cfg.x2_0 - params.D * params.m / params.total_mass();
    TwoTimeState state(params);
    for (int n : modes) {
        const double wn = well_mode_weight(cfg, n);
        for (const auto& V : Vs) {
            const double v = well_mode_velocity(n, V.x, params);
            state.append(well_state(n, V.x, params),
                         wn * V.weight * placement_phase(v, V.x, params, x1_0, x2_0));
        }
    }
    return state;
}

cdouble well_wavegroup(const WellWavegroupConfig& cfg, const SystemParams& params, const LabPoint& p)
{
    return evaluate(build_well_wavegroup(cfg, params), p);
}

double mean_relative_energy(const BarrierWavegroupConfig& cfg, const SystemParams& params)
{
    // |exp(-x^2/2w^2)|^2 has variance w^2/2
    const double dvel = cfg.v0 - cfg.V0;
    return 0.5 * params.reduced_mass() * (dvel * dvel + 0.5 * (cfg.dv * cfg.dv + cfg.dV * cfg.dV));
}

} // namespace twotime
