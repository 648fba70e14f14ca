#include "twotime/eigen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twotime/error.hpp"

namespace twotime {

namespace {

using Matrix4 = std::array<std::array<cdouble, 4>, 4>;
using Vector4 = std::array<cdouble, 4>;

// LU factorisation with partial pivoting of a fixed 4x4 complex matrix.
class Lu4 {
public:
    explicit Lu4(const Matrix4& a) : lu_(a)
    {
        for (std::size_t k = 0; k < 4; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < 4; ++i)
                if (std::abs(lu_[i][k]) > std::abs(lu_[piv][k]))
                    piv = i;
            if (!(std::abs(lu_[piv][k]) > 0.0)) {
                singular_ = true;
                return;
            }
            std::swap(lu_[k], lu_[piv]);
            std::swap(perm_[k], perm_[piv]);
            for (std::size_t i = k + 1; i < 4; ++i) {
                lu_[i][k] /= lu_[k][k];
                for (std::size_t j = k + 1; j < 4; ++j)
                    lu_[i][j] -= lu_[i][k] * lu_[k][j];
            }
        }
    }

    bool singular() const { return singular_; }

    Vector4 solve(const Vector4& b) const
    {
        Vector4 x;
        for (std::size_t i = 0; i < 4; ++i) {
            x[i] = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j)
                x[i] -= lu_[i][j] * x[j];
        }
        for (std::size_t i = 4; i-- > 0;) {
            for (std::size_t j = i + 1; j < 4; ++j)
                x[i] -= lu_[i][j] * x[j];
            x[i] /= lu_[i][i];
        }
        return x;
    }

private:
    Matrix4 lu_;
    std::array<std::size_t, 4> perm_{0, 1, 2, 3};
    bool singular_ = false;
};

double norm1(const Matrix4& a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            col += std::abs(a[i][j]);
        best = std::max(best, col);
    }
    return best;
}

Support region_support(Region r, int direction)
{
    switch (r) {
    case Region::Before: return direction > 0 ? Support::Below : Support::Above;
    case Region::After: return direction > 0 ? Support::Above : Support::Below;
    case Region::Barrier: return Support::Inside;
    case Region::Well: return Support::WellInterior;
    }
    return Support::Everywhere;
}

cdouble barrier_wavevector(double E_rel, const SystemParams& params)
{
    const double mu = params.reduced_mass();
    const double d = E_rel - params.PE;
    if (d >= 0.0)
        return {std::sqrt(2.0 * mu * d) / hbar, 0.0};
    // evanescent: F e^{i q x} decays toward +x_rel
    return {0.0, std::sqrt(-2.0 * mu * d) / hbar};
}

BranchKinematics kinematics_for(BranchId id, Region region, cdouble q, const ChannelWavevectors& ch,
                                const SystemParams& params)
{
    const double v_cm = ch.K_cm / params.total_mass();
    BranchKinematics k;
    k.id = id;
    k.region = region;
    k.q = q;
    k.p1 = hbar * (params.m * v_cm + q);
    k.p2 = hbar * (params.M * v_cm - q);
    k.KE1 = k.p1 * k.p1 / (2.0 * params.m);
    k.KE2 = k.p2 * k.p2 / (2.0 * params.M);
    return k;
}

Branch make_branch(const BranchKinematics& k, cdouble amplitude, Support support)
{
    Branch b;
    b.amplitude = amplitude;
    b.p1 = k.p1 / hbar;
    b.p2 = k.p2 / hbar;
    b.e1 = k.KE1 / hbar;
    b.e2 = k.KE2 / hbar;
    b.support = support;
    return b;
}

} // namespace

ScatteringCoefficients coefficients_for_energy(double E_rel, const SystemParams& params)
{
    params.validate();
    if (!(E_rel > 0.0))
        throw Error(ErrorKind::ZeroRelativeMotion, "relative energy must be positive");

    const double mu = params.reduced_mass();
    const double D = params.D;
    const cdouble i{0.0, 1.0};
    const cdouble k = std::sqrt(2.0 * mu * E_rel) / hbar;
    const cdouble q = barrier_wavevector(E_rel, params);

    const cdouble ek_m = std::exp(-i * k * D); // e^{-ikD}
    const cdouble ek_p = std::exp(i * k * D);
    const cdouble eq_m = std::exp(-i * q * D);
    const cdouble eq_p = std::exp(i * q * D);

    // unknowns (B, F, G, H); rows: u(-D), u'(-D)/i, u(D), u'(D)/i
    const Matrix4 a{{
        {ek_p, -eq_m, -eq_p, 0.0},
        {-k * ek_p, -q * eq_m, q * eq_p, 0.0},
        {0.0, eq_p, eq_m, -ek_p},
        {0.0, q * eq_p, -q * eq_m, -k * ek_p},
    }};
    const Vector4 rhs{-ek_m, -k * ek_m, 0.0, 0.0};

    const Lu4 lu(a);
    if (lu.singular())
        throw Error(ErrorKind::SingularMatch, "matching system is singular at E_rel = " + std::to_string(E_rel));

    Matrix4 inv;
    for (std::size_t j = 0; j < 4; ++j) {
        Vector4 e{};
        e[j] = 1.0;
        const Vector4 col = lu.solve(e);
        for (std::size_t r = 0; r < 4; ++r)
            inv[r][j] = col[r];
    }
    const double cond = norm1(a) * norm1(inv);
    const Vector4 x = lu.solve(rhs);
    for (const cdouble& c : x) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            std::ostringstream msg;
            msg << "matching system is numerically singular (condition " << cond << ")";
            throw Error(ErrorKind::SingularMatch, msg.str());
        }
    }

    ScatteringCoefficients c;
    c.B = x[0];
    c.F = x[1];
    c.G = x[2];
    c.H = x[3];
    c.K_before = k;
    c.K_barrier = q;
    c.K_after = k;
    c.E_rel = E_rel;
    c.condition = cond;
    return c;
}

ScatteringCoefficients barrier_coefficients(const VelocityPair& vp, const SystemParams& params)
{
    const ChannelWavevectors ch = channel_wavevectors(vp, params);
    if (ch.K_rel == 0.0)
        throw Error(ErrorKind::ZeroRelativeMotion, "v == V: no relative motion in this channel");
    ScatteringCoefficients c = coefficients_for_energy(ch.E_rel, params);
    c.direction = ch.K_rel > 0.0 ? 1 : -1;
    return c;
}

double well_mode_velocity(int n, double V, const SystemParams& params)
{
    params.validate();
    if (n < 1)
        throw Error(ErrorKind::InvalidMode, "mode index must be >= 1, got " + std::to_string(n));
    const double m = params.m;
    const double M = params.M;
    return V + n * std::numbers::pi * hbar * (m + M) / (2.0 * params.D * m * M);
}

BranchKinematics branch_kinematics(BranchId id, const VelocityPair& vp, const SystemParams& params)
{
    const ChannelWavevectors ch = channel_wavevectors(vp, params);
    const double s = ch.K_rel >= 0.0 ? 1.0 : -1.0;
    const double k = std::abs(ch.K_rel);
    // q = K_rel reproduces the free momenta; set them exactly rather than via V_cm.
    auto free = [&](Region region) {
        BranchKinematics b = kinematics_for(id, region, ch.K_rel, ch, params);
        b.p1 = params.m * vp.v;
        b.p2 = params.M * vp.V;
        b.KE1 = b.p1 * b.p1 / (2.0 * params.m);
        b.KE2 = b.p2 * b.p2 / (2.0 * params.M);
        return b;
    };
    switch (id) {
    case BranchId::Incident: return free(Region::Before);
    case BranchId::Reflected: return kinematics_for(id, Region::Before, -s * k, ch, params);
    case BranchId::Transmitted: return free(Region::After);
    case BranchId::BarrierRight:
        return kinematics_for(id, Region::Barrier, s * barrier_wavevector(ch.E_rel, params), ch, params);
    case BranchId::BarrierLeft:
        return kinematics_for(id, Region::Barrier, -s * barrier_wavevector(ch.E_rel, params), ch, params);
    case BranchId::WellRightward: return free(Region::Well);
    case BranchId::WellLeftward: return kinematics_for(id, Region::Well, -ch.K_rel, ch, params);
    }
    return {};
}

TwoTimeState plane_wave_state(const VelocityPair& vp, const SystemParams& params)
{
    params.validate();
    TwoTimeState state(params);
    state.add(make_branch(branch_kinematics(BranchId::Incident, vp, params), 1.0, Support::Everywhere));
    return state;
}

TwoTimeState barrier_state(const VelocityPair& vp, const SystemParams& params, const EigenOptions& opts)
{
    return barrier_state(vp, barrier_coefficients(vp, params), params, opts);
}

TwoTimeState barrier_state(const VelocityPair& vp, const ScatteringCoefficients& c, const SystemParams& params,
                           const EigenOptions& opts)
{
    TwoTimeState state(params);
    const double mt = params.total_mass();
    auto add = [&](BranchId id, cdouble amplitude) {
        const BranchKinematics k = branch_kinematics(id, vp, params);
        Branch b = make_branch(k, amplitude, region_support(k.region, c.direction));
        if (opts.include_pe_phase && k.region == Region::Barrier) {
            b.e1 += params.PE * params.M / mt / hbar;
            b.e2 += params.PE * params.m / mt / hbar;
        }
        state.add(b);
    };
    add(BranchId::Incident, c.A);
    add(BranchId::Reflected, c.B);
    add(BranchId::BarrierRight, c.F);
    add(BranchId::BarrierLeft, c.G);
    add(BranchId::Transmitted, c.H);
    return state;
}

TwoTimeState well_state(int n, double V, const SystemParams& params)
{
    const double v = well_mode_velocity(n, V, params);
    const VelocityPair vp{v, V};
    const double Kn = n * std::numbers::pi / (2.0 * params.D);
    const cdouble i{0.0, 1.0};
    // sin(K (x + D)) = (e^{iK(x+D)} - e^{-iK(x+D)}) / 2i
    TwoTimeState state(params);
    state.add(make_branch(branch_kinematics(BranchId::WellRightward, vp, params), std::exp(i * Kn * params.D) / (2.0 * i),
                          Support::WellInterior));
    state.add(make_branch(branch_kinematics(BranchId::WellLeftward, vp, params),
                          -std::exp(-i * Kn * params.D) / (2.0 * i), Support::WellInterior));
    return state;
}

cdouble barrier_eigenstate(const VelocityPair& vp, const SystemParams& params, const LabPoint& p,
                           const EigenOptions& opts)
{
    return evaluate(barrier_state(vp, params, opts), p);
}

cdouble well_eigenstate(int n, double V, const SystemParams& params, const LabPoint& p)
{
    return evaluate(well_state(n, V, params), p);
}

} // namespace twotime
