#include "twotime/state.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace twotime {

namespace {

constexpr std::size_t table_budget = std::size_t{1} << 28; // bytes for the long-lived factor table
constexpr std::size_t short_block = 64;
constexpr std::size_t tile_points = 8;
constexpr std::size_t branch_tile = 512;
constexpr std::size_t lanes = 4;

// Plain complex product; avoids the Annex G NaN/inf recovery of operator*.
inline cdouble mul(cdouble a, cdouble b)
{
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

inline cdouble expi(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Propagating branches are separable into a row factor amplitude*e^{i(p1 x1 - e1 t1)}
// and a column factor e^{i(p2 x2 - e2 t2)}; each support group owns one
// contiguous range of the factor tables. Evanescent branches are summed
// directly after the group's separable range. Every point therefore adds the
// same terms in the same order whichever evaluation path produced it.
struct Prepared {
    std::vector<const Branch*> separable;
    std::vector<double> p1, p2, e1, e2;
    std::array<std::size_t, support_count + 1> begin{};
    std::array<std::vector<const Branch*>, support_count> direct;
};

Prepared prepare(const TwoTimeState& state)
{
    Prepared prep;
    for (std::size_t g = 0; g < support_count; ++g) {
        prep.begin[g] = prep.separable.size();
        for (const Branch& b : state.group(static_cast<Support>(g))) {
            if (b.propagating()) {
                prep.separable.push_back(&b);
                prep.p1.push_back(b.p1.real());
                prep.p2.push_back(b.p2.real());
                prep.e1.push_back(b.e1.real());
                prep.e2.push_back(b.e2.real());
            } else {
                prep.direct[g].push_back(&b);
            }
        }
    }
    prep.begin[support_count] = prep.separable.size();
    return prep;
}

cdouble direct_term(const Branch& b, const SideCoord& r, const SideCoord& c)
{
    const cdouble phase = (b.p1 * r.x + b.p2 * c.x) - (b.e1 * r.t + b.e2 * c.t);
    return mul(b.amplitude, std::exp(cdouble{-phase.imag(), phase.real()}));
}

// Factor tables in split real/imaginary layout.
struct Factors {
    std::vector<double> re, im;
    void resize(std::size_t n)
    {
        re.assign(n, 0.0);
        im.assign(n, 0.0);
    }
};

// Separable terms go to lane (table index mod 4) in ascending index order,
// so the result does not depend on how the branch range is tiled. The lanes
// are folded once, then the direct terms are added in group order.
struct ValueKernel {
    using Out = cdouble;
    double lr[lanes] = {}, li[lanes] = {};
    double re = 0.0, im = 0.0;

    void one(const Prepared&, const double* rr, const double* ri, const double* cr, const double* ci, std::size_t s)
    {
        const std::size_t l = s & (lanes - 1);
        lr[l] += rr[s] * cr[s] - ri[s] * ci[s];
        li[l] += rr[s] * ci[s] + ri[s] * cr[s];
    }
    void quad(const Prepared&, const double* rr, const double* ri, const double* cr, const double* ci, std::size_t s)
    {
        for (std::size_t l = 0; l < lanes; ++l) {
            lr[l] += rr[s + l] * cr[s + l] - ri[s + l] * ci[s + l];
            li[l] += rr[s + l] * ci[s + l] + ri[s + l] * cr[s + l];
        }
    }
    void fold()
    {
        re = (lr[0] + lr[1]) + (lr[2] + lr[3]);
        im = (li[0] + li[1]) + (li[2] + li[3]);
    }
    void add(const Branch&, cdouble t)
    {
        re += t.real();
        im += t.imag();
    }
    Out result() const { return {re, im}; }
};

struct JetKernel {
    using Out = Jet;
    // psi, then the sums of p1 t, p2 t, e1 t, e2 t
    double lr[5][lanes] = {}, li[5][lanes] = {};
    double re[5] = {}, im[5] = {};

    void one(const Prepared& prep, const double* rr, const double* ri, const double* cr, const double* ci,
             std::size_t s)
    {
        const std::size_t l = s & (lanes - 1);
        const double tr = rr[s] * cr[s] - ri[s] * ci[s];
        const double ti = rr[s] * ci[s] + ri[s] * cr[s];
        lr[0][l] += tr;
        li[0][l] += ti;
        lr[1][l] += prep.p1[s] * tr;
        li[1][l] += prep.p1[s] * ti;
        lr[2][l] += prep.p2[s] * tr;
        li[2][l] += prep.p2[s] * ti;
        lr[3][l] += prep.e1[s] * tr;
        li[3][l] += prep.e1[s] * ti;
        lr[4][l] += prep.e2[s] * tr;
        li[4][l] += prep.e2[s] * ti;
    }
    void quad(const Prepared& prep, const double* rr, const double* ri, const double* cr, const double* ci,
              std::size_t s)
    {
        double tr[lanes], ti[lanes];
        for (std::size_t l = 0; l < lanes; ++l) {
            tr[l] = rr[s + l] * cr[s + l] - ri[s + l] * ci[s + l];
            ti[l] = rr[s + l] * ci[s + l] + ri[s + l] * cr[s + l];
        }
        const double* w[4] = {prep.p1.data() + s, prep.p2.data() + s, prep.e1.data() + s, prep.e2.data() + s};
        for (std::size_t l = 0; l < lanes; ++l) {
            lr[0][l] += tr[l];
            li[0][l] += ti[l];
        }
        for (std::size_t q = 0; q < 4; ++q) {
            for (std::size_t l = 0; l < lanes; ++l) {
                lr[q + 1][l] += w[q][l] * tr[l];
                li[q + 1][l] += w[q][l] * ti[l];
            }
        }
    }
    void fold()
    {
        for (std::size_t q = 0; q < 5; ++q) {
            re[q] = (lr[q][0] + lr[q][1]) + (lr[q][2] + lr[q][3]);
            im[q] = (li[q][0] + li[q][1]) + (li[q][2] + li[q][3]);
        }
    }
    void add(const Branch& b, cdouble t)
    {
        const cdouble v[5] = {t, mul(b.p1, t), mul(b.p2, t), mul(b.e1, t), mul(b.e2, t)};
        for (std::size_t q = 0; q < 5; ++q) {
            re[q] += v[q].real();
            im[q] += v[q].imag();
        }
    }
    Out result() const
    {
        const cdouble i{0.0, 1.0};
        auto c = [&](std::size_t q) { return cdouble{re[q], im[q]}; };
        return {c(0), mul(i, c(1)), mul(i, c(2)), mul(-i, c(3)), mul(-i, c(4))};
    }
};

template <class Kernel>
void accumulate(Kernel& k, const Prepared& prep, const double* rr, const double* ri, const double* cr,
                const double* ci, std::size_t lo, std::size_t hi)
{
    std::size_t s = lo;
    for (; s < hi && (s & (lanes - 1)) != 0; ++s)
        k.one(prep, rr, ri, cr, ci, s);
    for (; s + lanes <= hi; s += lanes)
        k.quad(prep, rr, ri, cr, ci, s);
    for (; s < hi; ++s)
        k.one(prep, rr, ri, cr, ci, s);
}

void fill_rows(const Prepared& prep, std::span<const SideCoord> rows, std::size_t r0, std::size_t n, Factors& t,
               unsigned threads)
{
    const std::size_t nsep = prep.separable.size();
    t.resize(n * nsep);
    parallel_for(n, threads, [&](std::size_t ii) {
        const SideCoord& r = rows[r0 + ii];
        for (std::size_t s = 0; s < nsep; ++s) {
            const cdouble f = mul(prep.separable[s]->amplitude, expi(prep.p1[s] * r.x - prep.e1[s] * r.t));
            t.re[ii * nsep + s] = f.real();
            t.im[ii * nsep + s] = f.imag();
        }
    });
}

void fill_cols(const Prepared& prep, std::span<const SideCoord> cols, std::size_t c0, std::size_t n, Factors& t,
               unsigned threads)
{
    const std::size_t nsep = prep.separable.size();
    t.resize(n * nsep);
    parallel_for(n, threads, [&](std::size_t jj) {
        const SideCoord& c = cols[c0 + jj];
        for (std::size_t s = 0; s < nsep; ++s) {
            const cdouble f = expi(prep.p2[s] * c.x - prep.e2[s] * c.t);
            t.re[jj * nsep + s] = f.real();
            t.im[jj * nsep + s] = f.imag();
        }
    });
}

template <class Kernel>
std::vector<typename Kernel::Out> outer_kernel(const TwoTimeState& state, std::span<const SideCoord> rows,
                                               std::span<const SideCoord> cols, unsigned threads)
{
    const Prepared prep = prepare(state);
    const std::size_t nsep = prep.separable.size();
    const std::size_t n1 = rows.size();
    const std::size_t n2 = cols.size();
    const double D = state.params().D;
    std::vector<typename Kernel::Out> out(n1 * n2);

    // The smaller side is tabulated in large blocks (usually whole), the
    // larger one in short blocks, so each factor is computed about once.
    const std::size_t budget = std::max<std::size_t>(1, table_budget / (16 * std::max<std::size_t>(nsep, 1)));
    const bool rows_outer = n1 <= n2;
    const std::size_t outer_block = std::min(budget, rows_outer ? n1 : n2);
    const std::size_t inner_block = short_block;

    Factors row_table, col_table;
    auto block = [&](std::size_t r0, std::size_t nr, std::size_t c0, std::size_t nc) {
        const std::size_t ti = (nr + tile_points - 1) / tile_points;
        const std::size_t tj = (nc + tile_points - 1) / tile_points;
        parallel_for(ti * tj, threads, [&](std::size_t task) {
            const std::size_t i0 = (task / tj) * tile_points;
            const std::size_t j0 = (task % tj) * tile_points;
            const std::size_t ni = std::min(tile_points, nr - i0);
            const std::size_t nj = std::min(tile_points, nc - j0);
            std::array<Kernel, tile_points * tile_points> acc{};
            std::array<unsigned, tile_points * tile_points> mask{};
            for (std::size_t a = 0; a < ni; ++a)
                for (std::size_t b = 0; b < nj; ++b)
                    mask[a * tile_points + b] = active_supports(rows[r0 + i0 + a].x - cols[c0 + j0 + b].x, D);
            for (std::size_t e0 = 0; e0 < nsep; e0 += branch_tile) {
                const std::size_t e1 = std::min(nsep, e0 + branch_tile);
                for (std::size_t a = 0; a < ni; ++a) {
                    const double* rr = row_table.re.data() + (i0 + a) * nsep;
                    const double* ri = row_table.im.data() + (i0 + a) * nsep;
                    for (std::size_t b = 0; b < nj; ++b) {
                        const double* cr = col_table.re.data() + (j0 + b) * nsep;
                        const double* ci = col_table.im.data() + (j0 + b) * nsep;
                        const unsigned m = mask[a * tile_points + b];
                        Kernel& k = acc[a * tile_points + b];
                        for (std::size_t g = 0; g < support_count; ++g) {
                            if (!(m & (1u << g)))
                                continue;
                            const std::size_t lo = std::max(e0, prep.begin[g]);
                            const std::size_t hi = std::min(e1, prep.begin[g + 1]);
                            if (lo < hi)
                                accumulate(k, prep, rr, ri, cr, ci, lo, hi);
                        }
                    }
                }
            }
            for (std::size_t a = 0; a < ni; ++a) {
                const SideCoord& r = rows[r0 + i0 + a];
                for (std::size_t b = 0; b < nj; ++b) {
                    const SideCoord& c = cols[c0 + j0 + b];
                    Kernel& k = acc[a * tile_points + b];
                    k.fold();
                    const unsigned m = mask[a * tile_points + b];
                    for (std::size_t g = 0; g < support_count; ++g)
                        if (m & (1u << g))
                            for (const Branch* br : prep.direct[g])
                                k.add(*br, direct_term(*br, r, c));
                    out[(r0 + i0 + a) * n2 + (c0 + j0 + b)] = k.result();
                }
            }
        });
    };

    if (rows_outer) {
        for (std::size_t r0 = 0; r0 < n1; r0 += outer_block) {
            const std::size_t nr = std::min(outer_block, n1 - r0);
            fill_rows(prep, rows, r0, nr, row_table, threads);
            for (std::size_t c0 = 0; c0 < n2; c0 += inner_block) {
                const std::size_t nc = std::min(inner_block, n2 - c0);
                fill_cols(prep, cols, c0, nc, col_table, threads);
                block(r0, nr, c0, nc);
            }
        }
    } else {
        for (std::size_t c0 = 0; c0 < n2; c0 += outer_block) {
            const std::size_t nc = std::min(outer_block, n2 - c0);
            fill_cols(prep, cols, c0, nc, col_table, threads);
            for (std::size_t r0 = 0; r0 < n1; r0 += inner_block) {
                const std::size_t nr = std::min(inner_block, n1 - r0);
                fill_rows(prep, rows, r0, nr, row_table, threads);
                block(r0, nr, c0, nc);
            }
        }
    }
    return out;
}

} // namespace

unsigned active_supports(double x_rel, double D)
{
    unsigned mask = 1u << static_cast<unsigned>(Support::Everywhere);
    if (x_rel < -D)
        mask |= 1u << static_cast<unsigned>(Support::Below);
    else if (x_rel > D)
        mask |= 1u << static_cast<unsigned>(Support::Above);
    else
        mask |= 1u << static_cast<unsigned>(Support::Inside);
    if (x_rel > -D && x_rel < D)
        mask |= 1u << static_cast<unsigned>(Support::WellInterior);
    return mask;
}

bool Branch::propagating() const
{
    return p1.imag() == 0.0 && p2.imag() == 0.0 && e1.imag() == 0.0 && e2.imag() == 0.0;
}

TwoTimeState::TwoTimeState(const SystemParams& params) : params_(params) {}

void TwoTimeState::add(const Branch& b) { groups_[static_cast<std::size_t>(b.support)].push_back(b); }

void TwoTimeState::append(const TwoTimeState& other, cdouble scale)
{
    for (const auto& g : other.groups_) {
        for (Branch b : g) {
            b.amplitude = mul(b.amplitude, scale);
            add(b);
        }
    }
}

std::size_t TwoTimeState::size() const
{
    std::size_t n = 0;
    for (const auto& g : groups_)
        n += g.size();
    return n;
}

double TwoTimeState::max_wavevector() const
{
    double k = 0.0;
    for (const auto& g : groups_)
        for (const Branch& b : g)
            k = std::max({k, std::abs(b.p1.real()), std::abs(b.p2.real())});
    return k;
}

double TwoTimeState::max_speed() const
{
    double v = 0.0;
    for (const auto& g : groups_)
        for (const Branch& b : g)
            v = std::max({v, std::abs(b.p1.real()) / params_.m, std::abs(b.p2.real()) / params_.M});
    return v;
}

double TwoTimeState::amplitude_norm() const
{
    double a = 0.0;
    for (const auto& g : groups_)
        for (const Branch& b : g)
            a += std::abs(b.amplitude);
    return a;
}

std::vector<cdouble> evaluate_outer(const TwoTimeState& state, std::span<const SideCoord> rows,
                                    std::span<const SideCoord> cols, unsigned threads)
{
    return outer_kernel<ValueKernel>(state, rows, cols, threads);
}

std::vector<Jet> evaluate_outer_jet(const TwoTimeState& state, std::span<const SideCoord> rows,
                                    std::span<const SideCoord> cols, unsigned threads)
{
    return outer_kernel<JetKernel>(state, rows, cols, threads);
}

cdouble evaluate(const TwoTimeState& state, const LabPoint& p)
{
    const SideCoord r{p.x1, p.t1};
    const SideCoord c{p.x2, p.t2};
    return evaluate_outer(state, {&r, 1}, {&c, 1}, 1).front();
}

Jet evaluate_jet(const TwoTimeState& state, const LabPoint& p)
{
    const SideCoord r{p.x1, p.t1};
    const SideCoord c{p.x2, p.t2};
    return evaluate_outer_jet(state, {&r, 1}, {&c, 1}, 1).front();
}

unsigned resolve_threads(unsigned threads)
{
    if (threads != 0)
        return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace twotime
