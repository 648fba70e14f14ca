#ifndef TWOTIME_EIGEN_HPP
#define TWOTIME_EIGEN_HPP

// Exact two-body, two-time energy eigenstates for the square well/barrier
// and the infinite well.
//
// Every eigenstate is e^{i K_cm x_cm} u(x_rel) with u a sum of exponentials
// e^{i q x_rel}. In lab coordinates each exponential (a "branch") has its own
// phase gradients p1 = m V_cm + q and p2 = M V_cm - q, and the kinetic
// energies p1^2/2m and p2^2/2M are attached to t1 and t2 respectively.

#include "twotime/model.hpp"
#include "twotime/state.hpp"

namespace twotime {

/// Amplitudes of the three-region solution of the relative equation with A = 1:
///   before:  A e^{i k x} + B e^{-i k x}
///   barrier: F e^{i q x} + G e^{-i q x}
///   after:   H e^{i k x}
/// written for a wave incident along +x_rel. When v < V the physical state is
/// the mirror image u(-x_rel); `direction` records that sign.
struct ScatteringCoefficients {
    cdouble A{1.0, 0.0};
    cdouble B{};
    cdouble F{};
    cdouble G{};
    cdouble H{};
    cdouble K_before{};
    cdouble K_barrier{};
    cdouble K_after{};
    double E_rel = 0.0;
    int direction = 1;
    /// 1-norm condition number of the matching system.
    double condition = 1.0;

    bool ill_conditioned() const { return condition > 1e12; }
};

/// Solves the matching conditions at x_rel = -D and +D for the channel (v, V).
/// Throws ZeroRelativeMotion when v == V and SingularMatch when the 4x4 system
/// cannot be solved (e.g. E_rel == PE exactly).
ScatteringCoefficients barrier_coefficients(const VelocityPair& vp, const SystemParams& params);

/// Same as barrier_coefficients for a given relative energy, incident along +x_rel.
ScatteringCoefficients coefficients_for_energy(double E_rel, const SystemParams& params);

/// Particle velocity of mode n for well velocity V: v = V + n pi hbar (m + M)/(2 D m M).
double well_mode_velocity(int n, double V, const SystemParams& params);

enum class BranchId {
    Incident,
    Reflected,
    BarrierRight, ///< F term
    BarrierLeft,  ///< G term
    Transmitted,
    WellRightward,
    WellLeftward,
};

enum class Region { Before, Barrier, After, Well };

struct BranchKinematics {
    BranchId id = BranchId::Incident;
    Region region = Region::Before;
    cdouble q{};   ///< relative wavevector of the branch (signed, complex when evanescent)
    cdouble p1{};  ///< hbar dphi/dx1
    cdouble p2{};  ///< hbar dphi/dx2
    cdouble KE1{}; ///< p1^2 / 2m
    cdouble KE2{}; ///< p2^2 / 2M
};

/// Closed-form phase gradients and kinetic energies of one branch. Well
/// branches need the channel velocities to satisfy well_mode_velocity.
BranchKinematics branch_kinematics(BranchId id, const VelocityPair& vp, const SystemParams& params);

struct EigenOptions {
    /// Attach the potential energy inside the barrier to the time label
    /// t_PE = (M t1 + m t2)/M_tot. Off by default: the factor is common to
    /// every barrier-region term and leaves all PDFs and currents unchanged.
    /// With it on, the state solves the two-time equation including PE.
    bool include_pe_phase = false;
};

/// Free two-body plane wave exp(i(k x1 - KE1 t1 + K x2 - KE2 t2)).
TwoTimeState plane_wave_state(const VelocityPair& vp, const SystemParams& params);

/// Barrier/finite-well eigenstate as a five-branch state (A, B, F, G, H).
TwoTimeState barrier_state(const VelocityPair& vp, const SystemParams& params, const EigenOptions& opts = {});
TwoTimeState barrier_state(const VelocityPair& vp, const ScatteringCoefficients& coeffs,
                           const SystemParams& params, const EigenOptions& opts = {});

/// Infinite-well eigenstate of mode n (n-1 interior nodes) with v tied to V.
/// Throws InvalidMode for n < 1.
TwoTimeState well_state(int n, double V, const SystemParams& params);

cdouble barrier_eigenstate(const VelocityPair& vp, const SystemParams& params, const LabPoint& p,
                           const EigenOptions& opts = {});
cdouble well_eigenstate(int n, double V, const SystemParams& params, const LabPoint& p);

} // namespace twotime

#endif
