#include "pcon/isochronous.hpp"
#include "pcon/poincare.hpp"

#include <catch_amalgamated.hpp>

using namespace pcon;
using Catch::Matchers::WithinAbs;

namespace {

const ModelParams kParams(3.0, 0.58, 3, 0.58);
constexpr double kTau = 0.58;

NetworkState ir4(double s1, double s2, double s3)
{
    const double sigma[] = {s1, s2, s3};
    return section_embedding(RegionKind::IR4, sigma, kParams);
}

}  // namespace

TEST_CASE("one return of S(0.30, 0.10, 0.40) lands on S(g(sigma))", "[poincare]")
{
    const auto r = poincare_map(ir4(0.30, 0.10, 0.40), kParams);
    // g(0.30, 0.10, 0.40) = (0.30, 0.20, 0.48); H(0.30) from the 40-digit reference.
    CHECK_THAT(r.state.phases[0], WithinAbs(0.78874141619897, 1e-12));
    CHECK_THAT(r.state.phases[1], WithinAbs(0.20, 1e-12));
    CHECK(r.state.phases[2] == 0.0);
    REQUIRE(r.state.ftds[0].size() == 1);
    REQUIRE(r.state.ftds[1].size() == 1);
    REQUIRE(r.state.ftds[2].size() == 2);
    CHECK_THAT(r.state.ftds[0][0], WithinAbs(0.30, 1e-12));
    CHECK_THAT(r.state.ftds[1][0], WithinAbs(0.20, 1e-12));
    CHECK(r.state.ftds[2][0] == 0.0);
    CHECK_THAT(r.state.ftds[2][1], WithinAbs(0.48, 1e-12));
    CHECK_THAT(r.return_time, WithinAbs(kTau - 0.10, 1e-12));
    CHECK(is_section_state(r.state));
}

TEST_CASE("the center is a fixed point of period 3 tau / 4", "[poincare]")
{
    const auto res = detect_periodicity(ir4(kTau / 2, kTau / 4, 3 * kTau / 4), kParams);
    REQUIRE(res);
    CHECK(res->transient_iters == 0);
    CHECK(res->poincare_period == 1);
    CHECK_THAT(res->orbit_period, WithinAbs(0.75 * kTau, 1e-9));
}

TEST_CASE("the line (tau/2, s, tau/2 + s) has period 3 tau / 2", "[poincare]")
{
    for (double s2 : {0.10, 0.12, 0.16, 0.18}) {
        const auto res = detect_periodicity(ir4(kTau / 2, s2, kTau / 2 + s2), kParams);
        REQUIRE(res);
        CHECK(res->poincare_period == 2);
        CHECK_THAT(res->orbit_period, WithinAbs(1.5 * kTau, 1e-9));
    }
}

TEST_CASE("generic IR4 orbits have four returns and period 3 tau", "[poincare]")
{
    const auto res = detect_periodicity(ir4(0.30, 0.10, 0.40), kParams);
    REQUIRE(res);
    CHECK(res->transient_iters == 0);
    CHECK(res->poincare_period == 4);
    CHECK(res->cycle.size() == 4);
    CHECK(res->return_times.size() == 4);
    CHECK_THAT(res->orbit_period, WithinAbs(3 * kTau, 1e-9));
}

TEST_CASE("periodicity search reports not periodic when it runs out", "[poincare]")
{
    PeriodicityOptions opt;
    opt.max_iter = 3;
    CHECK_FALSE(detect_periodicity(ir4(0.30, 0.10, 0.40), kParams, opt));
    opt.max_iter = 0;
    CHECK_THROWS(detect_periodicity(ir4(0.30, 0.10, 0.40), kParams, opt));
}

TEST_CASE("state matching compares history cardinalities first", "[poincare]")
{
    NetworkState a{{0.1, 0.2, 0.0}, {{0.1}, {}, {0.0}}};
    NetworkState b{{0.1, 0.2, 0.0}, {{0.1}, {0.3}, {0.0}}};
    CHECK_FALSE(states_match(a, b, 1.0));
    b.ftds[1].clear();
    b.phases[0] += 1e-10;
    CHECK(states_match(a, b, 1e-9));
    CHECK_FALSE(states_match(a, b, 1e-11));
    CHECK(phase_projection(a) == std::vector<double>{0.1, 0.2});
}

TEST_CASE("IR4 signatures are equivalent and differ from IR3 and IR5", "[poincare]")
{
    const auto sig_of = [](RegionKind kind, std::uint64_t seed) {
        const auto s = sample_interior(region_spec(kind, kParams), 1, seed)[0];
        const auto res = detect_periodicity(section_embedding(kind, s, kParams), kParams);
        REQUIRE(res);
        return pulse_signature(*res, kParams);
    };
    const auto a = sig_of(RegionKind::IR4, 1);
    const auto b = sig_of(RegionKind::IR4, 2);
    REQUIRE(a.receptions.size() == 24);
    for (const auto& r : a.receptions) {
        CHECK(r.multiplicity == 1);
        CHECK(r.offset >= 0.0);
        CHECK(r.offset < a.period);
    }
    CHECK(pulse_equivalent(a, b));

    const auto ir3 = sig_of(RegionKind::IR3, 1);
    const auto ir5 = sig_of(RegionKind::IR5, 1);
    CHECK_FALSE(pulse_equivalent(a, ir3));
    CHECK_FALSE(pulse_equivalent(a, ir5));
    CHECK_FALSE(pulse_equivalent(ir3, ir5));
    CHECK_THAT(ir5.period, WithinAbs(a.period, 1e-9));
    CHECK(ir5.receptions.size() == 30);
    CHECK(std::any_of(ir3.receptions.begin(), ir3.receptions.end(),
                      [](const PulseReception& r) { return r.multiplicity == 2; }));
}
