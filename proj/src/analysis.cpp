#include "twotime/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <numeric>

#include "twotime/error.hpp"

namespace twotime {

namespace {

// Vertex offset in cells of the parabola through (-1, a), (0, b), (1, c).
double parabolic_offset(double a, double b, double c)
{
    const double den = a - 2.0 * b + c;
    if (!(den < 0.0))
        return 0.0;
    return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

double parabolic_height(double a, double b, double c)
{
    const double off = parabolic_offset(a, b, c);
    return b - 0.25 * (a - c) * off;
}

// FWHM of the profile around index k by linear interpolation of the half-height crossings.
double half_width(const std::vector<double>& f, const std::vector<double>& x, std::size_t k, double height)
{
    const double half = 0.5 * height;
    double left = x.front();
    for (std::size_t j = k; j > 0; --j) {
        if (f[j - 1] < half) {
            left = x[j - 1] + (half - f[j - 1]) / (f[j] - f[j - 1]) * (x[j] - x[j - 1]);
            break;
        }
    }
    double right = x.back();
    for (std::size_t j = k; j + 1 < f.size(); ++j) {
        if (f[j + 1] < half) {
            right = x[j] + (f[j] - half) / (f[j] - f[j + 1]) * (x[j + 1] - x[j]);
            break;
        }
    }
    return right - left;
}

std::vector<double> row_values(const FieldGrid& g, std::size_t i)
{
    return {g.values.begin() + static_cast<std::ptrdiff_t>(i * g.cols.count),
            g.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * g.cols.count)};
}

std::vector<Peak> select(std::vector<Peak> candidates, std::size_t min_separation)
{
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Peak& a, const Peak& b) { return a.height > b.height; });
    std::vector<Peak> kept;
    for (const Peak& c : candidates) {
        bool far = true;
        for (const Peak& k : kept) {
            const std::size_t di = c.i > k.i ? c.i - k.i : k.i - c.i;
            const std::size_t dj = c.j > k.j ? c.j - k.j : k.j - c.j;
            if (std::max(di, dj) < min_separation) {
                far = false;
                break;
            }
        }
        if (far)
            kept.push_back(c);
    }
    return kept;
}

} // namespace

std::vector<Peak> find_peaks(const FieldGrid& grid, double threshold, std::size_t min_separation)
{
    const std::size_t nr = grid.rows.count;
    const std::size_t nc = grid.cols.count;
    double top = 0.0;
    for (double v : grid.values)
        if (std::isfinite(v))
            top = std::max(top, v);
    if (!(top > 0.0))
        return {};
    const double floor = threshold * top;
    const auto xs = grid.cols.points();

    std::vector<Peak> candidates;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nc; ++j) {
            const double v = grid(i, j);
            if (!(v > 0.0) || v < floor)
                continue;
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di) {
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0)
                        continue;
                    const long ii = static_cast<long>(i) + di;
                    const long jj = static_cast<long>(j) + dj;
                    if (ii < 0 || jj < 0 || ii >= static_cast<long>(nr) || jj >= static_cast<long>(nc))
                        continue;
                    const double w = grid(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                    // ties go to the first cell in raster order
                    const bool before = di < 0 || (di == 0 && dj < 0);
                    if (before ? w >= v : w > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (!is_max)
                continue;
            Peak p;
            p.i = i;
            p.j = j;
            double oi = 0.0, oj = 0.0;
            double h = v;
            if (i > 0 && i + 1 < nr) {
                oi = parabolic_offset(grid(i - 1, j), v, grid(i + 1, j));
                h = std::max(h, parabolic_height(grid(i - 1, j), v, grid(i + 1, j)));
            }
            if (j > 0 && j + 1 < nc) {
                oj = parabolic_offset(grid(i, j - 1), v, grid(i, j + 1));
                h = std::max(h, parabolic_height(grid(i, j - 1), v, grid(i, j + 1)));
            }
            p.row = grid.rows.at(i) + oi * grid.rows.step();
            p.col = grid.cols.at(j) + oj * grid.cols.step();
            p.height = h;
            p.width = half_width(row_values(grid, i), xs, j, v);
            candidates.push_back(p);
        }
    }
    return select(std::move(candidates), min_separation);
}

std::vector<Peak> find_peaks_in_row(const FieldGrid& grid, std::size_t row, double threshold,
                                    std::size_t min_separation)
{
    if (row >= grid.rows.count)
        throw Error(ErrorKind::InvalidParams, "row index out of range");
    const auto f = row_values(grid, row);
    const auto xs = grid.cols.points();
    const double top = *std::max_element(f.begin(), f.end());
    if (!(top > 0.0))
        return {};
    std::vector<Peak> candidates;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double v = f[j];
        if (!(v > 0.0) || v < threshold * top)
            continue;
        if ((j > 0 && f[j - 1] >= v) || (j + 1 < f.size() && f[j + 1] > v))
            continue;
        Peak p;
        p.i = row;
        p.j = j;
        p.row = grid.rows.at(row);
        p.col = xs[j];
        p.height = v;
        if (j > 0 && j + 1 < f.size()) {
            p.col += parabolic_offset(f[j - 1], v, f[j + 1]) * grid.cols.step();
            p.height = parabolic_height(f[j - 1], v, f[j + 1]);
        }
        p.width = half_width(f, xs, j, v);
        candidates.push_back(p);
    }
    return select(std::move(candidates), min_separation);
}

FringeReport fringe_spacing(std::span<const double> x, std::span<const double> values, Interval window)
{
    if (x.size() != values.size())
        throw Error(ErrorKind::InvalidParams, "fringe profile: coordinate and value counts differ");
    std::size_t lo = x.size(), hi = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] >= window.lo && x[k] <= window.hi) {
            lo = std::min(lo, k);
            hi = k + 1;
        }
    }
    if (lo >= hi)
        throw Error(ErrorKind::TooFewFringes, "fringe window contains no samples");
    double top = 0.0;
    for (std::size_t k = lo; k < hi; ++k)
        top = std::max(top, values[k]);

    FringeReport rep;
    for (std::size_t k = std::max<std::size_t>(lo, 1); k + 1 < hi && k + 1 < x.size(); ++k) {
        const double a = values[k - 1], b = values[k], c = values[k + 1];
        if (b < 0.1 * top || !(b > a) || b < c)
            continue;
        rep.maxima.push_back(x[k] + parabolic_offset(a, b, c) * (x[k + 1] - x[k]));
    }
    rep.count = rep.maxima.size();
    if (rep.count < 3)
        throw Error(ErrorKind::TooFewFringes,
                    "found " + std::to_string(rep.count) + " fringe maxima, need at least 3");
    std::vector<double> gaps(rep.count - 1);
    for (std::size_t k = 0; k + 1 < rep.count; ++k)
        gaps[k] = rep.maxima[k + 1] - rep.maxima[k];
    rep.mean_spacing = std::accumulate(gaps.begin(), gaps.end(), 0.0) / static_cast<double>(gaps.size());
    double var = 0.0;
    for (double g : gaps)
        var += (g - rep.mean_spacing) * (g - rep.mean_spacing);
    rep.spacing_stddev = std::sqrt(var / static_cast<double>(gaps.size()));
    return rep;
}

FringeReport fringe_spacing(const FieldGrid& grid, LineAxis axis, std::size_t line, Interval window)
{
    std::vector<double> x, f;
    if (axis == LineAxis::AlongCols) {
        if (line >= grid.rows.count)
            throw Error(ErrorKind::InvalidParams, "fringe line index out of range");
        x = grid.cols.points();
        f = row_values(grid, line);
    } else {
        if (line >= grid.cols.count)
            throw Error(ErrorKind::InvalidParams, "fringe line index out of range");
        x = grid.rows.points();
        for (std::size_t i = 0; i < grid.rows.count; ++i)
            f.push_back(grid(i, line));
    }
    return fringe_spacing(x, f, window);
}

VelocityPair classical_recoil(const VelocityPair& vp, const SystemParams& params)
{
    const double m = params.m;
    const double M = params.M;
    const double mt = m + M;
    return {((m - M) * vp.v + 2.0 * M * vp.V) / mt, ((M - m) * vp.V + 2.0 * m * vp.v) / mt};
}

double coherence_length(double lambda, double V, double dV)
{
    if (!(dV > 0.0))
        throw Error(ErrorKind::DivisionByZeroWidth, "velocity width must be > 0");
    return lambda * (V / dV);
}

double contact_time(const BarrierWavegroupConfig& cfg, const SystemParams& params)
{
    const double vr = cfg.v0 - cfg.V0;
    if (vr == 0.0)
        throw Error(ErrorKind::ZeroRelativeMotion, "central channel has v0 == V0");
    const double surface = vr > 0.0 ? -params.D : params.D;
    return (surface - (cfg.x1_0 - cfg.x2_0)) / vr;
}

LabPoint reflected_centre(const BarrierWavegroupConfig& cfg, const SystemParams& params, double t)
{
    const double tc = contact_time(cfg, params);
    const VelocityPair after = classical_recoil({cfg.v0, cfg.V0}, params);
    const double x1c = cfg.x1_0 + cfg.v0 * tc;
    const double x2c = cfg.x2_0 + cfg.V0 * tc;
    return {x1c + after.v * (t - tc), t, x2c + after.V * (t - tc), t};
}

double free_position(const BarrierWavegroupConfig& cfg, double t2) { return cfg.x2_0 + cfg.V0 * t2; }

double central_barrier_wavevector(const BarrierWavegroupConfig& cfg, const SystemParams& params)
{
    const double E = channel_wavevectors({cfg.v0, cfg.V0}, params).E_rel;
    return std::sqrt(2.0 * params.reduced_mass() * std::abs(E - params.PE)) / hbar;
}

std::vector<Type2Sample> type2_visibility(const BarrierWavegroupConfig& cfg, const SystemParams& params,
                                          std::span<const double> D_values, const Type2Options& opts)
{
    const double w = opts.box_widths * std::max(1.0 / (params.m * cfg.dv), 1.0 / (params.M * cfg.dV));
    double delay = opts.delay;
    if (!(delay > 0.0)) {
        // PDF standard deviations of the incident group along x1 and x2
        const double s1 = 1.0 / (std::numbers::sqrt2 * params.m * cfg.dv);
        const double s2 = 1.0 / (std::numbers::sqrt2 * params.M * cfg.dV);
        delay = 8.0 * std::hypot(s1, s2) / std::abs(cfg.v0 - cfg.V0);
    }
    const std::size_t n = std::max<std::size_t>(opts.box, 5);
    std::vector<Type2Sample> out;
    out.reserve(D_values.size());
    for (double D : D_values) {
        SystemParams p = params;
        p.D = D;
        const TwoTimeState state = build_barrier_wavegroup(cfg, p).state;
        const double t = contact_time(cfg, p) + delay;
        const LabPoint c = reflected_centre(cfg, p, t);
        // peak b lies on the incident side of the barrier; this keeps the
        // transmitted group out of the search box
        const double side = cfg.v0 > cfg.V0 ? -1.0 : 1.0;
        auto masked_max = [&](const FieldGrid& g) {
            std::size_t best = g.values.size();
            for (std::size_t k = 0; k < g.values.size(); ++k) {
                const double x_rel = g.rows.at(k / g.cols.count) - g.cols.at(k % g.cols.count);
                if (side * x_rel > D && (best == g.values.size() || g.values[k] > g.values[best]))
                    best = k;
            }
            return best;
        };
        const FieldGrid coarse = snapshot(state, {c.x1 - w, c.x1 + w}, n, {c.x2 - w, c.x2 + w}, n, t,
                                          Normalization::Raw, opts.threads);
        const std::size_t k = masked_max(coarse);
        if (k == coarse.values.size()) {
            out.push_back({D, 0.0});
            continue;
        }
        const double r = coarse.rows.at(k / n);
        const double s = coarse.cols.at(k % n);
        const double h1 = coarse.rows.step();
        const double h2 = coarse.cols.step();
        const FieldGrid fine =
            snapshot(state, {r - h1, r + h1}, 21, {s - h2, s + h2}, 21, t, Normalization::Raw, opts.threads);
        const std::size_t f = masked_max(fine);
        out.push_back({D, f == fine.values.size() ? coarse.values[k] : fine.values[f]});
    }
    return out;
}

} // namespace twotime
