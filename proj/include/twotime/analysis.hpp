#ifndef TWOTIME_ANALYSIS_HPP
#define TWOTIME_ANALYSIS_HPP

// Extractors that turn grids into numbers: peaks, fringe spacing, and the
// classical-kinematics and coherence-length estimates they are compared with.

#include <cstddef>
#include <span>
#include <vector>

#include "twotime/field.hpp"
#include "twotime/model.hpp"
#include "twotime/wavegroup.hpp"

namespace twotime {

/// Local maximum of a grid. `row`/`col` are axis coordinates after parabolic
/// refinement; `width` is the full width at half maximum along the columns.
struct Peak {
    double row = 0.0;
    double col = 0.0;
    double height = 0.0;
    double width = 0.0;
    std::size_t i = 0; ///< grid row index
    std::size_t j = 0; ///< grid column index
};

/// Strict 8-neighbourhood maxima above threshold * global max, taken greedily
/// by height and kept only if at least `min_separation` cells (Chebyshev
/// distance) from every stronger peak. Sorted by descending height.
std::vector<Peak> find_peaks(const FieldGrid& grid, double threshold = 0.15, std::size_t min_separation = 3);

/// One-dimensional variant along a single grid row (e.g. a t2 row of an
/// asynchronous slice); the threshold is relative to that row's maximum.
std::vector<Peak> find_peaks_in_row(const FieldGrid& grid, std::size_t row, double threshold = 0.15,
                                    std::size_t min_separation = 3);

struct FringeReport {
    double mean_spacing = 0.0;
    double spacing_stddev = 0.0;
    std::size_t count = 0; ///< maxima used
    std::vector<double> maxima;
};

enum class LineAxis { AlongRows, AlongCols };

/// Spacing between successive local maxima of the sampled profile (`x`
/// ascending) restricted to `window`. Maxima below 10% of the window maximum
/// are ignored and positions are refined with a three-point parabola.
/// Throws TooFewFringes when fewer than 3 maxima remain.
FringeReport fringe_spacing(std::span<const double> x, std::span<const double> values, Interval window);

/// Profile of one grid line: AlongCols takes row `line` (varying column
/// coordinate), AlongRows takes column `line`.
FringeReport fringe_spacing(const FieldGrid& grid, LineAxis axis, std::size_t line, Interval window);

/// Velocities after a 1-D elastic collision.
VelocityPair classical_recoil(const VelocityPair& vp, const SystemParams& params);

/// l_c = lambda V / dV. Throws DivisionByZeroWidth unless dV > 0.
double coherence_length(double lambda, double V, double dV);

/// Time at which the incident group's centre reaches the entrance surface
/// x_rel = -D (or +D when the particle is slower than the barrier).
double contact_time(const BarrierWavegroupConfig& cfg, const SystemParams& params);

/// Lab position at time t >= contact_time of a group that reflected
/// classically off the entrance surface.
LabPoint reflected_centre(const BarrierWavegroupConfig& cfg, const SystemParams& params, double t);

/// Barrier centre at t2 without any interaction.
double free_position(const BarrierWavegroupConfig& cfg, double t2);

struct Type2Options {
    /// Observation time after contact; <= 0 picks the time at which the
    /// incident group is 8 PDF widths past the entrance surface.
    double delay = 0.0;
    std::size_t box = 41;        ///< samples per side of the search box
    double box_widths = 2.5;     ///< box half-size in spatial group widths
    unsigned threads = 1;
};

struct Type2Sample {
    double D = 0.0;
    double height = 0.0; ///< peak-b PDF maximum (raw)
};

/// Height of the reflected group (peak b) as the barrier half-width varies,
/// everything else fixed. Peak b is searched for in a box around the
/// classically reflected centre at contact_time + delay, restricted to the
/// incident side of the interaction region.
std::vector<Type2Sample> type2_visibility(const BarrierWavegroupConfig& cfg, const SystemParams& params,
                                          std::span<const double> D_values, const Type2Options& opts = {});

/// Relative wavevector inside the barrier for the group's central channel.
double central_barrier_wavevector(const BarrierWavegroupConfig& cfg, const SystemParams& params);

} // namespace twotime

#endif
