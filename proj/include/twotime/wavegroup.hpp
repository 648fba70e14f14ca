#ifndef TWOTIME_WAVEGROUP_HPP
#define TWOTIME_WAVEGROUP_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "twotime/eigen.hpp"
#include "twotime/model.hpp"
#include "twotime/state.hpp"

namespace twotime {

/// Gaussian velocity distributions for the particle (v0, dv) and the barrier
/// (V0, dV), each sampled on a uniform trapezoid grid of `span` widths either
/// side of the centre. (x1_0, x2_0) place the incident group at t = 0.
struct BarrierWavegroupConfig {
    double v0 = 0.0;
    double dv = 1.0;
    double V0 = 0.0;
    double dV = 1.0;
    int Nv = 64;
    int NV = 64;
    double span = 4.0;
    double x1_0 = 0.0;
    double x2_0 = 0.0;

    void validate() const;
};

/// Mode weights exp(-((n - n0) pi dx)^2) times a Gaussian in the well velocity.
/// Modes are those in [n_min, n_max] when n_max > 0, otherwise every n >= 1
/// whose weight is at least `min_weight`. At t = 0 the rightward-moving
/// relative group is centred on (x1_0, x2_0); keep |x1_0 - x2_0| < D.
struct WellWavegroupConfig {
    double n0 = 1.0;
    double dx = 1.0;
    double V0 = 0.0;
    double dV = 1.0;
    int NV = 64;
    double span = 4.0;
    int n_min = 0;
    int n_max = 0;
    double min_weight = 1e-8;
    double x1_0 = 0.0;
    double x2_0 = 0.0;

    void validate() const;
};

/// One (v, V) channel and its quadrature weight.
struct WavegroupNode {
    double v = 0.0;
    double V = 0.0;
    double weight = 0.0;
};

struct QuadratureNode {
    double x = 0.0;
    double weight = 0.0;
};

/// Uniform trapezoid nodes on [center - span*width, center + span*width] carrying
/// the weight exp(-(x - center)^2 / 2 width^2) / sqrt(width).
std::vector<QuadratureNode> gaussian_trapezoid(double center, double width, int count, double span);

/// Channel list in summation order: V-major, both axes ascending.
std::vector<WavegroupNode> barrier_nodes(const BarrierWavegroupConfig& cfg);

struct BarrierWavegroup {
    TwoTimeState state;
    std::size_t skipped = 0;         ///< nodes dropped because v == V
    std::size_t ill_conditioned = 0; ///< nodes whose matching condition number exceeds 1e12
};

BarrierWavegroup build_barrier_wavegroup(const BarrierWavegroupConfig& cfg, const SystemParams& params,
                                         const EigenOptions& opts = {});
/// Weighted sum of barrier eigenstates over explicit nodes, each shifted so the
/// incident group sits at (x1_0, x2_0) when t1 = t2 = 0.
BarrierWavegroup build_barrier_wavegroup(std::span<const WavegroupNode> nodes, const SystemParams& params,
                                         double x1_0, double x2_0, const EigenOptions& opts = {});

cdouble barrier_wavegroup(const BarrierWavegroupConfig& cfg, const SystemParams& params, const LabPoint& p);

/// Modes retained by the configuration, ascending. Throws InvalidMode if any is < 1.
std::vector<int> well_modes(const WellWavegroupConfig& cfg);
double well_mode_weight(const WellWavegroupConfig& cfg, int n);

TwoTimeState build_well_wavegroup(const WellWavegroupConfig& cfg, const SystemParams& params);
cdouble well_wavegroup(const WellWavegroupConfig& cfg, const SystemParams& params, const LabPoint& p);

/// Mean relative kinetic energy mu <(v - V)^2> / 2 under the probability
/// distributions |weight|^2 of the two Gaussians.
double mean_relative_energy(const BarrierWavegroupConfig& cfg, const SystemParams& params);

} // namespace twotime

#endif
