#ifndef TWOTIME_MODEL_HPP
#define TWOTIME_MODEL_HPP

// Physical parameters and the lab <-> centre-of-mass/relative transforms.
// Simulation units throughout: hbar = 1, dimensionless masses and lengths.

namespace twotime {

inline constexpr double hbar = 1.0;

enum class PotentialKind {
    Square,       ///< finite well (PE < 0), barrier (PE > 0) or free (PE == 0)
    InfiniteWell, ///< hard walls at x_rel = +-D, PE ignored
};

/// Particle mass m, well/barrier mass M, potential height PE and half-width D.
/// The interaction region is x_rel in [-D, +D].
struct SystemParams {
    double m = 1.0;
    double M = 1.0;
    double PE = 0.0;
    double D = 1.0;
    PotentialKind kind = PotentialKind::Square;

    double total_mass() const { return m + M; }
    double reduced_mass() const { return m * M / (m + M); }

    /// Throws Error(InvalidParams) unless m, M, D are positive and finite.
    void validate() const;
};

/// Particle at (x1, t1), well/barrier at (x2, t2).
struct LabPoint {
    double x1 = 0.0;
    double t1 = 0.0;
    double x2 = 0.0;
    double t2 = 0.0;
};

struct CmRelPoint {
    double x_cm = 0.0;
    double x_rel = 0.0;
    double t_cm = 0.0;
    double t_rel = 0.0;
};

/// Initial particle velocity v and well/barrier velocity V.
struct VelocityPair {
    double v = 0.0;
    double V = 0.0;
};

/// x_cm = (m x1 + M x2)/M_tot, x_rel = x1 - x2. Time labels pass through
/// unmixed: t_cm carries t2 and t_rel carries t1.
CmRelPoint to_cm_rel(const LabPoint& p, const SystemParams& params);
LabPoint from_cm_rel(const CmRelPoint& p, const SystemParams& params);

struct ChannelWavevectors {
    double k = 0.0;      ///< particle wavevector m v / hbar
    double K = 0.0;      ///< well/barrier wavevector M V / hbar
    double K_cm = 0.0;   ///< k + K
    double K_rel = 0.0;  ///< (M k - m K) / M_tot, signed
    double E_cm = 0.0;
    double E_rel = 0.0;
};

ChannelWavevectors channel_wavevectors(const VelocityPair& vp, const SystemParams& params);

} // namespace twotime

#endif
