#ifndef TWOTIME_TESTS_ORACLES_HPP
#define TWOTIME_TESTS_ORACLES_HPP

// Independent reference computations used by the unit and acceptance tests.
// None of them call into the library's evaluation engine.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "twotime/eigen.hpp"
#include "twotime/model.hpp"
#include "twotime/state.hpp"

namespace oracle {

using twotime::cdouble;
using Mat2 = std::array<std::array<cdouble, 2>, 2>;

inline Mat2 matmul(const Mat2& a, const Mat2& b)
{
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

inline Mat2 inverse(const Mat2& a)
{
    const cdouble det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return {{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

// Columns map (right-mover, left-mover) amplitudes to (psi, psi') at x.
inline Mat2 interface_matrix(cdouble k, double x)
{
    const cdouble i{0.0, 1.0};
    const cdouble ep = std::exp(i * k * x), em = std::exp(-i * k * x);
    return {{{ep, em}, {i * k * ep, -i * k * em}}};
}

struct TransferResult {
    cdouble B, F, G, H;
};

/// Square barrier of height PE on [-D, D], reduced mass mu, incident from the left with A = 1.
inline TransferResult transfer_matrix(double E, double PE, double D, double mu)
{
    const cdouble k = std::sqrt(cdouble(2.0 * mu * E));
    cdouble q = std::sqrt(cdouble(2.0 * mu * (E - PE)));
    if (q.imag() < 0.0)
        q = -q;
    const Mat2 left = matmul(inverse(interface_matrix(q, -D)), interface_matrix(k, -D));
    const Mat2 total = matmul(matmul(inverse(interface_matrix(k, D)), interface_matrix(q, D)), left);
    // (H, 0) = total (1, B)
    const cdouble B = -total[1][0] / total[1][1];
    const cdouble H = total[0][0] + total[0][1] * B;
    const cdouble F = left[0][0] + left[0][1] * B;
    const cdouble G = left[1][0] + left[1][1] * B;
    return {B, F, G, H};
}

/// Direct sum over the branches whose support covers x_rel, one std::exp per term.
inline cdouble direct_sum(const twotime::TwoTimeState& s, const twotime::LabPoint& p)
{
    const unsigned mask = twotime::active_supports(p.x1 - p.x2, s.params().D);
    const cdouble i{0.0, 1.0};
    cdouble sum{};
    for (std::size_t g = 0; g < twotime::support_count; ++g) {
        if (!(mask & (1u << g)))
            continue;
        for (const auto& b : s.group(static_cast<twotime::Support>(g)))
            sum += b.amplitude * std::exp(i * (b.p1 * p.x1 + b.p2 * p.x2 - b.e1 * p.t1 - b.e2 * p.t2));
    }
    return sum;
}

/// Sum restricted to one support group (ignores region selection).
inline cdouble group_sum(const twotime::TwoTimeState& s, twotime::Support g, const twotime::LabPoint& p)
{
    const cdouble i{0.0, 1.0};
    cdouble sum{};
    for (const auto& b : s.group(g))
        sum += b.amplitude * std::exp(i * (b.p1 * p.x1 + b.p2 * p.x2 - b.e1 * p.t1 - b.e2 * p.t2));
    return sum;
}

struct PdeResidual {
    double residual = 0.0;
    double scale = 0.0;
    double relative() const { return residual / scale; }
};

/// i dPsi/dt1 + i dPsi/dt2 + Psi_x1x1/2m + Psi_x2x2/2M - PE(x_rel) Psi by finite
/// differences: 5-point second derivatives in x, 2-point central first derivatives in t.
template <class F>
PdeResidual pde_residual(F&& psi, const twotime::LabPoint& p, const twotime::SystemParams& par, double PE,
                         double hx, double ht)
{
    const cdouble i{0.0, 1.0};
    auto at = [&](double dx1, double dt1, double dx2, double dt2) {
        return psi(twotime::LabPoint{p.x1 + dx1, p.t1 + dt1, p.x2 + dx2, p.t2 + dt2});
    };
    const cdouble c = at(0, 0, 0, 0);
    const cdouble dt1 = (at(0, ht, 0, 0) - at(0, -ht, 0, 0)) / (2.0 * ht);
    const cdouble dt2 = (at(0, 0, 0, ht) - at(0, 0, 0, -ht)) / (2.0 * ht);
    auto second = [&](int axis) {
        auto f = [&](double d) { return axis == 1 ? at(d, 0, 0, 0) : at(0, 0, d, 0); };
        return (-f(2 * hx) + 16.0 * f(hx) - 30.0 * c + 16.0 * f(-hx) - f(-2 * hx)) / (12.0 * hx * hx);
    };
    const cdouble t1 = i * dt1, t2 = i * dt2;
    const cdouble k1 = second(1) / (2.0 * par.m), k2 = second(2) / (2.0 * par.M);
    const cdouble v = -PE * c;
    const cdouble r = t1 + t2 + k1 + k2 + v;
    return {std::abs(r), std::max({std::abs(t1), std::abs(t2), std::abs(k1), std::abs(k2), std::abs(v)})};
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double a = std::log(x[k]), b = std::log(y[k]);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracle

#endif
