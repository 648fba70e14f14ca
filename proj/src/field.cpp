#include "twotime/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "twotime/error.hpp"

namespace twotime {

namespace {

double pdf_of(cdouble psi) { return std::norm(psi); }

double current_of(cdouble psi, cdouble dpsi, double mass) { return hbar * (std::conj(psi) * dpsi).imag() / mass; }

std::vector<SideCoord> side(const Axis& axis, double t, double shift = 0.0)
{
    std::vector<SideCoord> out(axis.count);
    for (std::size_t i = 0; i < axis.count; ++i)
        out[i] = {axis.at(i) + shift, t};
    return out;
}

std::vector<SideCoord> side_time(const Axis& axis, double t) { return side(axis, t, 0.0); }

void require_grid(Interval r, std::size_t n, const char* name)
{
    if (!(r.hi > r.lo) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
        throw Error(ErrorKind::InvalidParams, std::string(name) + " range must be non-degenerate");
    if (n < 2)
        throw Error(ErrorKind::InvalidParams, std::string(name) + " count must be >= 2");
}

// Size below which finite-difference terms are dominated by rounding of Psi
// (absolute error ~ eps * sum |amplitude|), with a safety factor of 100.
double rounding_floor(const TwoTimeState& state, const LabPoint& p, const FdSteps& steps)
{
    const double err = 4.0 * std::numeric_limits<double>::epsilon() * state.amplitude_norm();
    const double psi = std::abs(evaluate(state, p));
    const double rate = std::max(1.0 / steps.ht, state.max_wavevector() * state.max_speed() / steps.h);
    return 100.0 * err * (2.0 * psi + err) * rate;
}

} // namespace

std::vector<double> Axis::points() const
{
    std::vector<double> p(count);
    for (std::size_t i = 0; i < count; ++i)
        p[i] = at(i);
    return p;
}

void GridSpec::validate() const
{
    require_grid(x1, n1, "x1");
    require_grid(x2, n2, "x2");
    for (double t : times)
        if (!std::isfinite(t))
            throw Error(ErrorKind::InvalidParams, "snapshot times must be finite");
}

const char* to_string(FieldKind kind)
{
    switch (kind) {
    case FieldKind::Pdf: return "pdf";
    case FieldKind::J1: return "j1";
    case FieldKind::J2: return "j2";
    case FieldKind::Residual: return "residual";
    }
    return "unknown";
}

const char* to_string(Normalization n) { return n == Normalization::Max1 ? "max1" : "raw"; }

double FieldGrid::max_value() const
{
    double best = 0.0;
    for (double v : values)
        if (std::isfinite(v))
            best = std::max(best, std::abs(v));
    return best;
}

FieldGrid normalized(FieldGrid grid, Normalization n)
{
    if (n == Normalization::Max1) {
        const double peak = grid.max_value();
        if (peak > 0.0)
            for (double& v : grid.values)
                v /= peak;
    }
    grid.normalization = n;
    return grid;
}

double joint_pdf(const TwoTimeState& state, const LabPoint& p) { return pdf_of(evaluate(state, p)); }

Currents currents(const TwoTimeState& state, const LabPoint& p)
{
    const Jet j = evaluate_jet(state, p);
    return {current_of(j.psi, j.d_x1, state.params().m), current_of(j.psi, j.d_x2, state.params().M)};
}

Currents currents_fd(const TwoTimeState& state, const LabPoint& p, double h)
{
    const double m = state.params().m;
    const double M = state.params().M;
    const cdouble psi = evaluate(state, p);
    auto estimate = [&](double step) {
        LabPoint a = p, b = p, c = p, d = p;
        a.x1 += step;
        b.x1 -= step;
        c.x2 += step;
        d.x2 -= step;
        const cdouble d1 = (evaluate(state, a) - evaluate(state, b)) / (2.0 * step);
        const cdouble d2 = (evaluate(state, c) - evaluate(state, d)) / (2.0 * step);
        return Currents{current_of(psi, d1, m), current_of(psi, d2, M)};
    };
    const Currents fine = estimate(0.5 * h);
    const Currents coarse = estimate(h);
    const double scale = std::max(pdf_of(psi) * state.max_speed(), std::numeric_limits<double>::min());
    const double diff = std::max(std::abs(fine.j1 - coarse.j1), std::abs(fine.j2 - coarse.j2));
    if (diff > 0.01 * scale)
        throw Error(ErrorKind::StepTooCoarse, "finite-difference currents disagree between h and h/2");
    return fine;
}

FdSteps default_fd_steps(const TwoTimeState& state, double grid_spacing, double h_override)
{
    FdSteps s;
    if (h_override > 0.0) {
        s.h = h_override;
    } else {
        const double kmax = std::max(state.max_wavevector(), 1e-12);
        const double lambda_min = 2.0 * std::numbers::pi / (2.0 * kmax);
        s.h = lambda_min / 50.0;
        if (grid_spacing > 0.0)
            s.h = std::min(s.h, grid_spacing);
    }
    s.ht = s.h / std::max(state.max_speed(), 1e-12);
    return s;
}

ResidualSample conservation_residual(const TwoTimeState& state, const LabPoint& p, const FdSteps& steps)
{
    auto terms = [&](double h, double ht) {
        ResidualSample r;
        LabPoint a = p, b = p;
        a.t1 += ht;
        b.t1 -= ht;
        r.dpdf_dt1 = (joint_pdf(state, a) - joint_pdf(state, b)) / (2.0 * ht);
        a = p, b = p;
        a.t2 += ht;
        b.t2 -= ht;
        r.dpdf_dt2 = (joint_pdf(state, a) - joint_pdf(state, b)) / (2.0 * ht);
        a = p, b = p;
        a.x1 += h;
        b.x1 -= h;
        r.dj1_dx1 = (currents(state, a).j1 - currents(state, b).j1) / (2.0 * h);
        a = p, b = p;
        a.x2 += h;
        b.x2 -= h;
        r.dj2_dx2 = (currents(state, a).j2 - currents(state, b).j2) / (2.0 * h);
        r.residual = r.dpdf_dt1 + r.dpdf_dt2 + r.dj1_dx1 + r.dj2_dx2;
        r.scale = std::max({std::abs(r.dpdf_dt1), std::abs(r.dpdf_dt2), std::abs(r.dj1_dx1), std::abs(r.dj2_dx2)});
        return r;
    };
    const ResidualSample r = terms(steps.h, steps.ht);
    const ResidualSample coarse = terms(2.0 * steps.h, 2.0 * steps.ht);
    const double diff = std::max({std::abs(r.dpdf_dt1 - coarse.dpdf_dt1), std::abs(r.dpdf_dt2 - coarse.dpdf_dt2),
                                  std::abs(r.dj1_dx1 - coarse.dj1_dx1), std::abs(r.dj2_dx2 - coarse.dj2_dx2)});
    if (diff > 0.01 * std::max(r.scale, rounding_floor(state, p, steps)))
        throw Error(ErrorKind::StepTooCoarse, "conservation stencil changes by more than 1% between h and 2h");
    return r;
}

FieldGrid snapshot(const TwoTimeState& state, Interval x1, std::size_t n1, Interval x2, std::size_t n2, double t,
                   Normalization norm, unsigned threads)
{
    require_grid(x1, n1, "x1");
    require_grid(x2, n2, "x2");
    FieldGrid g;
    g.rows = {"x1", x1.lo, x1.hi, n1};
    g.cols = {"x2", x2.lo, x2.hi, n2};
    g.kind = FieldKind::Pdf;
    const auto rows = side_time(g.rows, t);
    const auto cols = side_time(g.cols, t);
    const auto psi = evaluate_outer(state, rows, cols, threads);
    g.values.resize(psi.size());
    std::transform(psi.begin(), psi.end(), g.values.begin(), pdf_of);
    return normalized(std::move(g), norm);
}

std::pair<FieldGrid, FieldGrid> current_snapshot(const TwoTimeState& state, Interval x1, std::size_t n1,
                                                 Interval x2, std::size_t n2, double t, unsigned threads)
{
    require_grid(x1, n1, "x1");
    require_grid(x2, n2, "x2");
    FieldGrid j1;
    j1.rows = {"x1", x1.lo, x1.hi, n1};
    j1.cols = {"x2", x2.lo, x2.hi, n2};
    j1.kind = FieldKind::J1;
    FieldGrid j2 = j1;
    j2.kind = FieldKind::J2;
    const auto jets = evaluate_outer_jet(state, side_time(j1.rows, t), side_time(j1.cols, t), threads);
    j1.values.resize(jets.size());
    j2.values.resize(jets.size());
    for (std::size_t k = 0; k < jets.size(); ++k) {
        j1.values[k] = current_of(jets[k].psi, jets[k].d_x1, state.params().m);
        j2.values[k] = current_of(jets[k].psi, jets[k].d_x2, state.params().M);
    }
    return {std::move(j1), std::move(j2)};
}

FieldGrid asynchronous_slice(const TwoTimeState& state, double x1, double t1, Interval x2, std::size_t n2,
                             Interval t2, std::size_t nt, Normalization norm, unsigned threads)
{
    require_grid(x2, n2, "x2");
    if (nt == 1) {
        if (t2.lo != t2.hi || !std::isfinite(t2.lo))
            throw Error(ErrorKind::InvalidParams, "a single t2 row needs lo == hi");
    } else {
        require_grid(t2, nt, "t2");
    }
    FieldGrid g;
    g.rows = {"t2", t2.lo, t2.hi, nt};
    g.cols = {"x2", x2.lo, x2.hi, n2};
    g.kind = FieldKind::Pdf;
    const SideCoord particle{x1, t1};
    std::vector<SideCoord> cols;
    cols.reserve(nt * n2);
    for (std::size_t k = 0; k < nt; ++k)
        for (std::size_t j = 0; j < n2; ++j)
            cols.push_back({g.cols.at(j), g.rows.at(k)});
    const auto psi = evaluate_outer(state, {&particle, 1}, cols, threads);
    g.values.resize(psi.size());
    std::transform(psi.begin(), psi.end(), g.values.begin(), pdf_of);
    return normalized(std::move(g), norm);
}

ConservationReport conservation_grid(const TwoTimeState& state, Interval x1, std::size_t n1, Interval x2,
                                     std::size_t n2, double t, double h_override, unsigned threads)
{
    require_grid(x1, n1, "x1");
    require_grid(x2, n2, "x2");
    ConservationReport rep;
    FieldGrid& res = rep.residual;
    res.rows = {"x1", x1.lo, x1.hi, n1};
    res.cols = {"x2", x2.lo, x2.hi, n2};
    res.kind = FieldKind::Residual;
    rep.steps = default_fd_steps(state, std::min(res.rows.step(), res.cols.step()), h_override);
    const double h = rep.steps.h;
    const double ht = rep.steps.ht;
    const double m = state.params().m;
    const double M = state.params().M;
    const double D = state.params().D;

    auto pdf_grid = [&](const std::vector<SideCoord>& r, const std::vector<SideCoord>& c) {
        const auto psi = evaluate_outer(state, r, c, threads);
        std::vector<double> out(psi.size());
        std::transform(psi.begin(), psi.end(), out.begin(), pdf_of);
        return out;
    };
    const auto r0 = side(res.rows, t);
    const auto c0 = side(res.cols, t);

    const auto p_t1p = pdf_grid(side(res.rows, t + ht), c0);
    const auto p_t1m = pdf_grid(side(res.rows, t - ht), c0);
    const auto p_t2p = pdf_grid(r0, side(res.cols, t + ht));
    const auto p_t2m = pdf_grid(r0, side(res.cols, t - ht));
    const auto j_x1p = evaluate_outer_jet(state, side(res.rows, t, h), c0, threads);
    const auto j_x1m = evaluate_outer_jet(state, side(res.rows, t, -h), c0, threads);
    const auto j_x2p = evaluate_outer_jet(state, r0, side(res.cols, t, h), threads);
    const auto j_x2m = evaluate_outer_jet(state, r0, side(res.cols, t, -h), threads);

    res.values.assign(n1 * n2, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < n1; ++i) {
        const double a1 = res.rows.at(i);
        for (std::size_t j = 0; j < n2; ++j) {
            const double a2 = res.cols.at(j);
            const unsigned mask = active_supports(a1 - a2, D);
            if (active_supports(a1 + h - a2, D) != mask || active_supports(a1 - h - a2, D) != mask ||
                active_supports(a1 - a2 - h, D) != mask || active_supports(a1 - a2 + h, D) != mask) {
                ++rep.excluded;
                continue;
            }
            const std::size_t k = i * n2 + j;
            const double t1 = (p_t1p[k] - p_t1m[k]) / (2.0 * ht);
            const double t2 = (p_t2p[k] - p_t2m[k]) / (2.0 * ht);
            const double x1t = (current_of(j_x1p[k].psi, j_x1p[k].d_x1, m) - current_of(j_x1m[k].psi, j_x1m[k].d_x1, m)) /
                               (2.0 * h);
            const double x2t = (current_of(j_x2p[k].psi, j_x2p[k].d_x2, M) - current_of(j_x2m[k].psi, j_x2m[k].d_x2, M)) /
                               (2.0 * h);
            const double r = t1 + t2 + x1t + x2t;
            res.values[k] = r;
            rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
            rep.max_scale = std::max({rep.max_scale, std::abs(t1), std::abs(t2), std::abs(x1t), std::abs(x2t)});
            ++rep.evaluated;
        }
    }
    rep.max_relative = rep.max_scale > 0.0 ? rep.max_abs_residual / rep.max_scale : 0.0;
    return rep;
}

SegmentBalance segment_balance(const TwoTimeState& state, int axis, double a, double b, const LabPoint& p,
                               double ht, int panels)
{
    if (axis != 1 && axis != 2)
        throw Error(ErrorKind::InvalidParams, "segment axis must be 1 or 2");
    if (!(b > a))
        throw Error(ErrorKind::InvalidParams, "segment requires a < b");
    const double D = state.params().D;
    // x_rel = +-D in terms of the integration variable
    const double other = axis == 1 ? p.x2 : p.x1;
    std::vector<double> cuts{a, b};
    for (double c : {other - D, other + D})
        if (c > a && c < b)
            cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());

    using rule = boost::math::quadrature::gauss<double, 10>;
    std::vector<double> xs, ws;
    const double panel_width = (b - a) / std::max(panels, 1);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s], hi = cuts[s + 1];
        const int np = std::max(1, static_cast<int>(std::ceil((hi - lo) / panel_width)));
        const double w = (hi - lo) / np;
        for (int k = 0; k < np; ++k) {
            const double mid = lo + (k + 0.5) * w;
            const auto& abs = rule::abscissa();
            const auto& wts = rule::weights();
            for (std::size_t q = 0; q < abs.size(); ++q) {
                if (abs[q] == 0.0) {
                    xs.push_back(mid);
                    ws.push_back(wts[q] * 0.5 * w);
                    continue;
                }
                xs.push_back(mid - abs[q] * 0.5 * w);
                ws.push_back(wts[q] * 0.5 * w);
                xs.push_back(mid + abs[q] * 0.5 * w);
                ws.push_back(wts[q] * 0.5 * w);
            }
        }
    }

    auto integral = [&](double dt) {
        std::vector<SideCoord> moving(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k)
            moving[k] = {xs[k], (axis == 1 ? p.t1 : p.t2) + dt};
        const SideCoord fixed = axis == 1 ? SideCoord{p.x2, p.t2} : SideCoord{p.x1, p.t1};
        const auto psi = axis == 1 ? evaluate_outer(state, moving, {&fixed, 1})
                                   : evaluate_outer(state, {&fixed, 1}, moving);
        double sum = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k)
            sum += ws[k] * pdf_of(psi[k]);
        return sum;
    };
    auto current_at = [&](double x) {
        LabPoint q = p;
        (axis == 1 ? q.x1 : q.x2) = x;
        const Currents c = currents(state, q);
        return axis == 1 ? c.j1 : c.j2;
    };

    SegmentBalance sb;
    sb.rate = (integral(ht) - integral(-ht)) / (2.0 * ht);
    const double jb = current_at(b);
    const double ja = current_at(a);
    sb.flux_difference = jb - ja;
    sb.scale = std::max({std::abs(sb.rate), std::abs(jb), std::abs(ja)});
    return sb;
}

} // namespace twotime
