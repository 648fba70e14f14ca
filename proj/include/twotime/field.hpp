#ifndef TWOTIME_FIELD_HPP
#define TWOTIME_FIELD_HPP

// Joint PDFs, probability currents and the local conservation law evaluated
// on points and grids.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "twotime/model.hpp"
#include "twotime/state.hpp"

namespace twotime {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    double step() const { return count > 1 ? (hi - lo) / static_cast<double>(count - 1) : 0.0; }
    double at(std::size_t i) const { return lo + step() * static_cast<double>(i); }
    std::vector<double> points() const;
};

/// Synchronous grid over (x1, x2) at one or more common times t1 = t2.
struct GridSpec {
    Interval x1;
    Interval x2;
    std::size_t n1 = 2;
    std::size_t n2 = 2;
    std::vector<double> times;

    void validate() const;
};

enum class FieldKind { Pdf, J1, J2, Residual };
enum class Normalization { Raw, Max1 };

const char* to_string(FieldKind kind);
const char* to_string(Normalization n);

/// Row-major real field; rows along `rows`, columns along `cols`.
struct FieldGrid {
    Axis rows;
    Axis cols;
    FieldKind kind = FieldKind::Pdf;
    Normalization normalization = Normalization::Raw;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * cols.count + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols.count + j]; }
    double max_value() const;
};

/// Rescales so the largest |value| is 1 (no-op for an all-zero grid).
FieldGrid normalized(FieldGrid grid, Normalization n);

double joint_pdf(const TwoTimeState& state, const LabPoint& p);

struct Currents {
    double j1 = 0.0;
    double j2 = 0.0;
};

/// j1 = hbar Im(Psi* dPsi/dx1)/m and j2 likewise with M, from the analytic
/// branch derivatives.
Currents currents(const TwoTimeState& state, const LabPoint& p);

/// Central-difference currents with step h. Throws StepTooCoarse when the h
/// and h/2 estimates disagree by more than 1%.
Currents currents_fd(const TwoTimeState& state, const LabPoint& p, double h);

/// Finite-difference steps: spatial h = min(grid spacing, lambda_min/50) with
/// lambda_min = 2 pi / (2 k_max), the shortest beat length between branches;
/// temporal step h / (fastest branch speed).
struct FdSteps {
    double h = 0.0;
    double ht = 0.0;
};
FdSteps default_fd_steps(const TwoTimeState& state, double grid_spacing, double h_override = 0.0);

struct ResidualSample {
    double residual = 0.0; ///< dPDF/dt1 + dPDF/dt2 + dj1/dx1 + dj2/dx2
    double scale = 0.0;    ///< largest magnitude among the four terms
    double dpdf_dt1 = 0.0;
    double dpdf_dt2 = 0.0;
    double dj1_dx1 = 0.0;
    double dj2_dx2 = 0.0;

    double relative() const { return scale > 0.0 ? std::abs(residual) / scale : 0.0; }
};

/// Local conservation residual by central differences. Throws StepTooCoarse
/// when any term changes by more than 1% of the scale between steps and 2x
/// steps (terms at the rounding-noise level of Psi are exempt).
ResidualSample conservation_residual(const TwoTimeState& state, const LabPoint& p, const FdSteps& steps);

FieldGrid snapshot(const TwoTimeState& state, Interval x1, std::size_t n1, Interval x2, std::size_t n2, double t,
                   Normalization norm = Normalization::Raw, unsigned threads = 1);

/// Currents on a synchronous grid: {j1, j2}.
std::pair<FieldGrid, FieldGrid> current_snapshot(const TwoTimeState& state, Interval x1, std::size_t n1,
                                                 Interval x2, std::size_t n2, double t, unsigned threads = 1);

/// PDF over (t2 rows, x2 columns) with the particle fixed at (x1, t1).
FieldGrid asynchronous_slice(const TwoTimeState& state, double x1, double t1, Interval x2, std::size_t n2,
                             Interval t2, std::size_t nt, Normalization norm = Normalization::Raw,
                             unsigned threads = 1);

struct ConservationReport {
    FieldGrid residual;          ///< signed residual, NaN where excluded
    double max_abs_residual = 0.0;
    double max_scale = 0.0;      ///< largest term magnitude anywhere on the grid
    double max_relative = 0.0;   ///< max_abs_residual / max_scale
    std::size_t evaluated = 0;
    std::size_t excluded = 0;    ///< stencils straddling x_rel = +-D
    FdSteps steps;
};

/// Residual of the local conservation law on a synchronous grid at time t.
ConservationReport conservation_grid(const TwoTimeState& state, Interval x1, std::size_t n1, Interval x2,
                                     std::size_t n2, double t, double h_override = 0.0, unsigned threads = 1);

struct SegmentBalance {
    double rate = 0.0;            ///< d/dt of the PDF integrated over the segment
    double flux_difference = 0.0; ///< j(b) - j(a)
    double scale = 0.0;

    double residual() const { return rate + flux_difference; }
    double relative() const { return scale > 0.0 ? std::abs(residual()) / scale : 0.0; }
};

/// Integrated conservation over a <= x_axis <= b with the other coordinate
/// and both times fixed at `p`. axis = 1 integrates x1 and differentiates in
/// t1; axis = 2 integrates x2 and differentiates in t2. Gauss-Legendre panels
/// are split at x_rel = +-D.
SegmentBalance segment_balance(const TwoTimeState& state, int axis, double a, double b, const LabPoint& p,
                               double ht, int panels = 64);

} // namespace twotime

#endif
