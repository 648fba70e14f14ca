#include "twotime/model.hpp"

#include <cmath>
#include <string>

#include "twotime/error.hpp"

namespace twotime {

void SystemParams::validate() const
{
    auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!positive(m))
        throw Error(ErrorKind::InvalidParams, "particle mass m must be positive, got " + std::to_string(m));
    if (!positive(M))
        throw Error(ErrorKind::InvalidParams, "well/barrier mass M must be positive, got " + std::to_string(M));
    if (!positive(D))
        throw Error(ErrorKind::InvalidParams, "half-width D must be positive, got " + std::to_string(D));
    if (!std::isfinite(PE))
        throw Error(ErrorKind::InvalidParams, "potential energy PE must be finite");
}

CmRelPoint to_cm_rel(const LabPoint& p, const SystemParams& params)
{
    const double mt = params.total_mass();
    return {(params.m * p.x1 + params.M * p.x2) / mt, p.x1 - p.x2, p.t2, p.t1};
}

LabPoint from_cm_rel(const CmRelPoint& p, const SystemParams& params)
{
    const double mt = params.total_mass();
    // x1 = x_cm + (M/M_tot) x_rel, x2 = x_cm - (m/M_tot) x_rel
    return {p.x_cm + params.M / mt * p.x_rel, p.t_rel, p.x_cm - params.m / mt * p.x_rel, p.t_cm};
}

ChannelWavevectors channel_wavevectors(const VelocityPair& vp, const SystemParams& params)
{
    const double m = params.m;
    const double M = params.M;
    const double mt = params.total_mass();
    const double mu = params.reduced_mass();

    ChannelWavevectors c;
    c.k = m * vp.v / hbar;
    c.K = M * vp.V / hbar;
    c.K_cm = c.k + c.K;
    // (M k - m K)/M_tot written as mu (v - V)/hbar, which is exactly zero for v == V
    c.K_rel = mu * (vp.v - vp.V) / hbar;
    c.E_cm = hbar * hbar * c.K_cm * c.K_cm / (2.0 * mt);
    c.E_rel = hbar * hbar * c.K_rel * c.K_rel / (2.0 * mu);
    return c;
}

} // namespace twotime
