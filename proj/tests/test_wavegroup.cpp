#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "twotime/error.hpp"
#include "twotime/field.hpp"
#include "twotime/wavegroup.hpp"

using namespace twotime;

namespace {

BarrierWavegroupConfig group(double v0, double V0)
{
    BarrierWavegroupConfig c;
    c.v0 = v0;
    c.V0 = V0;
    c.dv = 0.1875;
    c.dV = 0.125;
    c.x1_0 = -20.0;
    c.x2_0 = 0.0;
    return c;
}

} // namespace

TEST_CASE("trapezoid nodes")
{
    const auto n = gaussian_trapezoid(2.0, 0.5, 9, 4.0);
    REQUIRE(n.size() == 9);
    CHECK(n.front().x == doctest::Approx(0.0));
    CHECK(n.back().x == doctest::Approx(4.0));
    CHECK(n[4].x == doctest::Approx(2.0));
    // interior weight at the centre is step / sqrt(width)
    CHECK(n[4].weight == doctest::Approx(0.5 / std::sqrt(0.5)));
    CHECK(n[0].weight == doctest::Approx(0.5 * 0.5 / std::sqrt(0.5) * std::exp(-8.0)));
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(n[k].weight == doctest::Approx(n[8 - k].weight));
}

TEST_CASE("channel order is V-major and ascending")
{
    BarrierWavegroupConfig c = group(6.0, 1.0);
    c.Nv = 3;
    c.NV = 4;
    const auto nodes = barrier_nodes(c);
    REQUIRE(nodes.size() == 12);
    for (std::size_t k = 1; k < nodes.size(); ++k) {
        if (k % 3 == 0)
            CHECK(nodes[k].V > nodes[k - 1].V);
        else {
            CHECK(nodes[k].V == nodes[k - 1].V);
            CHECK(nodes[k].v > nodes[k - 1].v);
        }
    }
}

TEST_CASE("configuration validation")
{
    BarrierWavegroupConfig c = group(6.0, 1.0);
    c.dv = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = group(6.0, 1.0);
    c.NV = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    WellWavegroupConfig w;
    w.dx = -1.0;
    CHECK_THROWS_AS(w.validate(), Error);
    w = WellWavegroupConfig{};
    w.n_min = 0;
    w.n_max = 3;
    try {
        well_modes(w);
        FAIL("expected InvalidMode");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidMode);
    }
}

TEST_CASE("a single node is the eigenstate times a constant")
{
    const SystemParams p{1.0, 5.0, 12.0, 1.0};
    const WavegroupNode node{6.0, 1.0, 0.37};
    const auto wg = build_barrier_wavegroup(std::span<const WavegroupNode>(&node, 1), p, -3.0, 2.0);
    const TwoTimeState eig = barrier_state({6.0, 1.0}, p);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> x(-5.0, 5.0);
    const LabPoint ref{0.3, 0.1, -0.2, 0.4};
    const cdouble ratio = evaluate(wg.state, ref) / evaluate(eig, ref);
    for (int k = 0; k < 50; ++k) {
        const LabPoint q{x(rng), x(rng), x(rng), x(rng)};
        const cdouble r = evaluate(wg.state, q) / evaluate(eig, q);
        CHECK(std::abs(r - ratio) < 1e-12 * std::abs(ratio));
    }
}

TEST_CASE("nodes with v == V are skipped and reported")
{
    const SystemParams p{1.0, 5.0, 12.0, 1.0};
    const std::vector<WavegroupNode> nodes{{2.0, 2.0, 1.0}, {6.0, 1.0, 1.0}};
    const auto wg = build_barrier_wavegroup(nodes, p, 0.0, 0.0);
    CHECK(wg.skipped == 1);
    CHECK(wg.state.size() == 5);
}

TEST_CASE("superposition is linear in the weights")
{
    const SystemParams p{1.0, 5.0, -20.0, 1.0};
    std::vector<WavegroupNode> a = barrier_nodes(group(6.0, 1.0));
    std::vector<WavegroupNode> b = a, sum = a;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k].weight = u(rng);
        b[k].weight = u(rng);
        sum[k].weight = a[k].weight + b[k].weight;
    }
    const auto sa = build_barrier_wavegroup(a, p, -20.0, 0.0).state;
    const auto sb = build_barrier_wavegroup(b, p, -20.0, 0.0).state;
    const auto ss = build_barrier_wavegroup(sum, p, -20.0, 0.0).state;
    std::uniform_real_distribution<double> x1(-25.0, 5.0), x2(-3.0, 3.0), t(0.0, 5.0);
    for (int k = 0; k < 20; ++k) {
        const LabPoint q{x1(rng), t(rng), x2(rng), t(rng)};
        const cdouble lhs = evaluate(ss, q);
        const cdouble rhs = evaluate(sa, q) + evaluate(sb, q);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("quadrature converges when node counts double")
{
    SystemParams p{1.0, 5.0, 0.0, 1.0};
    BarrierWavegroupConfig c = group(6.0, 1.0);
    p.PE = -mean_relative_energy(c, p) / 0.4;
    const auto coarse = build_barrier_wavegroup(c, p).state;
    c.Nv *= 2;
    c.NV *= 2;
    const auto fine = build_barrier_wavegroup(c, p).state;
    const FieldGrid g = snapshot(fine, {-30.0, 10.0}, 60, {-4.0, 8.0}, 40, 3.8);
    const double top = g.max_value();
    std::mt19937_64 rng(8);
    int probes = 0;
    double worst = 0.0;
    std::uniform_int_distribution<std::size_t> pick(0, g.values.size() - 1);
    while (probes < 50) {
        const std::size_t k = pick(rng);
        if (g.values[k] < 0.05 * top)
            continue;
        const LabPoint q{g.rows.at(k / g.cols.count), 3.8, g.cols.at(k % g.cols.count), 3.8};
        const double a = joint_pdf(coarse, q), b = joint_pdf(fine, q);
        worst = std::max(worst, std::abs(a - b) / b);
        ++probes;
    }
    CHECK(worst < 0.005);
}

TEST_CASE("free group centroid moves with (v0, V0)")
{
    const SystemParams p{1.0, 5.0, 0.0, 1.0};
    BarrierWavegroupConfig c = group(6.0, 1.0);
    const auto s = build_barrier_wavegroup(c, p).state;
    auto centroid = [&](double t) {
        const FieldGrid g = snapshot(s, {-20.0 + 6.0 * t - 25.0, -20.0 + 6.0 * t + 25.0}, 201,
                                     {t - 12.0, t + 12.0}, 121, t);
        double w = 0.0, a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < g.rows.count; ++i)
            for (std::size_t j = 0; j < g.cols.count; ++j) {
                w += g(i, j);
                a += g(i, j) * g.rows.at(i);
                b += g(i, j) * g.cols.at(j);
            }
        return std::pair{a / w, b / w};
    };
    const auto [x1a, x2a] = centroid(0.0);
    const auto [x1b, x2b] = centroid(2.0);
    CHECK(x1a == doctest::Approx(-20.0).epsilon(0.01));
    CHECK((x1b - x1a) / 2.0 == doctest::Approx(6.0).epsilon(0.02));
    CHECK((x2b - x2a) / 2.0 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mean relative energy matches the node average")
{
    const SystemParams p{1.0, 5.0, 0.0, 1.0};
    BarrierWavegroupConfig c = group(6.0, 1.0);
    c.Nv = c.NV = 200;
    c.span = 6.0;
    double w = 0.0, e = 0.0;
    for (const auto& n : barrier_nodes(c)) {
        const double prob = n.weight * n.weight;
        w += prob;
        e += prob * channel_wavevectors({n.v, n.V}, p).E_rel;
    }
    CHECK(e / w == doctest::Approx(mean_relative_energy(c, p)).epsilon(1e-6));
}

TEST_CASE("infinite-well wavegroup")
{
    const SystemParams p{1.0, 10.0, 0.0, 1.0, PotentialKind::InfiniteWell};
    WellWavegroupConfig c;
    c.n0 = 50;
    c.dx = 1.0 / 15.0;
    c.V0 = 30.0;
    c.dV = 1.0;
    c.NV = 16;
    SUBCASE("mode truncation keeps weights >= 1e-8")
    {
        const auto modes = well_modes(c);
        CHECK(modes.front() >= 1);
        for (int n : modes)
            CHECK(well_mode_weight(c, n) >= 1e-8);
        CHECK(well_mode_weight(c, modes.front() - 1) < 1e-8);
        CHECK(well_mode_weight(c, modes.back() + 1) < 1e-8);
        CHECK(well_mode_weight(c, 50) == 1.0);
    }
    SUBCASE("vanishes outside the walls")
    {
        const auto s = build_well_wavegroup(c, p);
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> x(-3.0, 3.0), t(-0.3, 0.3), side(1.0, 3.0);
        for (int k = 0; k < 50; ++k) {
            const double x2 = x(rng);
            const double sgn = k % 2 ? 1.0 : -1.0;
            CHECK(evaluate(s, {x2 + sgn * side(rng), t(rng), x2, t(rng)}) == cdouble(0.0));
            // dyadic coordinates so that x1 - x2 is exactly +-D
            const double wall = -3.0 + 0.125 * k;
            CHECK(evaluate(s, {wall + sgn * 1.0, t(rng), wall, t(rng)}) == cdouble(0.0));
        }
    }
    SUBCASE("one (n, V) node is proportional to that eigenstate")
    {
        WellWavegroupConfig one = c;
        one.n_min = one.n_max = 3;
        one.NV = 2;
        one.span = 1e-9;
        const auto s = build_well_wavegroup(one, p);
        const auto e = well_state(3, 30.0, p);
        const LabPoint ref{0.2, 0.0, 0.1, 0.0};
        const cdouble ratio = evaluate(s, ref) / evaluate(e, ref);
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> x(-0.45, 0.45), t(-0.1, 0.1);
        for (int k = 0; k < 20; ++k) {
            const double x2 = x(rng);
            const LabPoint q{x2 + x(rng), t(rng), x2, t(rng)};
            const cdouble r = evaluate(s, q) / evaluate(e, q);
            CHECK(std::abs(r - ratio) < 1e-6 * std::abs(ratio));
        }
    }
}
