#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "twotime/error.hpp"
#include "twotime/model.hpp"

using namespace twotime;

TEST_CASE("cm/rel transform by direct substitution")
{
    const SystemParams p{1.0, 5.0, 0.0, 1.0};
    const CmRelPoint c = to_cm_rel({2.0, 0.3, 1.0, 0.7}, p);
    CHECK(c.x_cm == doctest::Approx(7.0 / 6.0).epsilon(1e-15));
    CHECK(c.x_rel == 1.0);
    CHECK(c.t_rel == 0.3);
    CHECK(c.t_cm == 0.7);

    const SystemParams eq{2.0, 2.0, 0.0, 1.0};
    const CmRelPoint s = to_cm_rel({3.5, 0.0, 3.5, 0.0}, eq);
    CHECK(s.x_cm == 3.5);
    CHECK(s.x_rel == 0.0);
}

TEST_CASE("round trip is exact to 1e-13 for coordinates up to 1e6")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mass(0.01, 100.0), coord(-1e6, 1e6);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SystemParams p{mass(rng), mass(rng), 0.0, 1.0};
        const LabPoint a{coord(rng), coord(rng), coord(rng), coord(rng)};
        const LabPoint b = from_cm_rel(to_cm_rel(a, p), p);
        const double scale = std::max(std::abs(a.x1), std::abs(a.x2));
        worst = std::max({worst, std::abs(a.x1 - b.x1) / scale, std::abs(a.x2 - b.x2) / scale});
        CHECK(a.t1 == b.t1);
        CHECK(a.t2 == b.t2);
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("channel wavevectors")
{
    SUBCASE("comoving pair has no relative motion")
    {
        const auto ch = channel_wavevectors({2.5, 2.5}, {1.0, 7.0, 0.0, 1.0});
        CHECK(ch.K_rel == 0.0);
        CHECK(ch.E_rel == 0.0);
    }
    SUBCASE("equal masses, v = 2, V = 0")
    {
        const auto ch = channel_wavevectors({2.0, 0.0}, {1.0, 1.0, 0.0, 1.0});
        CHECK(ch.k == 2.0);
        CHECK(ch.K == 0.0);
        CHECK(ch.K_cm == 2.0);
        CHECK(ch.K_rel == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(ch.E_rel == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(ch.E_cm == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("K_rel matches (M k - m K) / M_tot")
    {
        const SystemParams p{1.0, 5.0, 0.0, 1.0};
        const auto ch = channel_wavevectors({6.0, 1.0}, p);
        CHECK(ch.K_rel == doctest::Approx((5.0 * 6.0 - 1.0 * 5.0) / 6.0).epsilon(1e-15));
    }
    SUBCASE("energy bookkeeping over random draws")
    {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> mass(0.01, 100.0), vel(-50.0, 50.0);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const SystemParams p{mass(rng), mass(rng), 0.0, 1.0};
            const VelocityPair vp{vel(rng), vel(rng)};
            const auto ch = channel_wavevectors(vp, p);
            const double lab = ch.k * ch.k / (2.0 * p.m) + ch.K * ch.K / (2.0 * p.M);
            worst = std::max(worst, std::abs(lab - ch.E_rel - ch.E_cm) / lab);
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("parameter validation")
{
    CHECK_NOTHROW(SystemParams{}.validate());
    const SystemParams p{1.0, 5.0, 0.0, 1.0};
    CHECK(p.reduced_mass() < std::min(p.m, p.M));
    CHECK(std::min(p.m, p.M) < p.total_mass());
    for (SystemParams bad : {SystemParams{0.0, 1.0, 0.0, 1.0}, SystemParams{1.0, -1.0, 0.0, 1.0},
                             SystemParams{1.0, 1.0, 0.0, 0.0}, SystemParams{1.0, 1.0, NAN, 1.0}}) {
        try {
            bad.validate();
            FAIL("expected InvalidParams");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidParams);
        }
    }
}
