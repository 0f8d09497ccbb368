#include "pcon/event_engine.hpp"
#include "pcon/isochronous.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace pcon;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const ModelParams kParams(3.0, 0.58, 3, 0.58);

NetworkState center_state()
{
    return section_embedding(RegionKind::IR4, region_center(RegionKind::IR4, 0.58), kParams);
}

NetworkState random_state(std::mt19937_64& rng, const ModelParams& p)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    NetworkState s;
    for (int i = 0; i < p.n(); ++i) {
        s.phases.push_back(0.999 * u(rng));
        std::vector<double> d;
        if (u(rng) < 0.7) {
            d.push_back(p.tau() * u(rng));
        }
        s.ftds.push_back(d);
    }
    return s;
}

}  // namespace

TEST_CASE("engine from S(sigma_*) holds one pending pulse per firing", "[engine]")
{
    const Engine engine(center_state(), kParams);
    const auto pending = engine.pending_pulses();
    // Oscillator 3's own firing at t = 0 is in flight as well.
    REQUIRE(pending.size() == 4);
    const double expected[] = {0.145, 0.29, 0.435, 0.58};
    const int senders[] = {2, 0, 1, 2};
    for (int k = 0; k < 4; ++k) {
        CHECK_THAT(pending[k].deliver_at, WithinAbs(expected[k], 1e-15));
        CHECK(pending[k].sender == senders[k]);
    }
}

TEST_CASE("S(sigma_*) reproduces the period-tau*3/4 schedule", "[engine]")
{
    Engine engine(center_state(), kParams);
    const auto trace = engine.simulate(0.435);
    std::vector<std::string> lines;
    for (const auto& e : trace) {
        lines.push_back(format_event(e));
    }
    REQUIRE(lines.size() == 6);
    CHECK(lines[0].starts_with("P (1,2) t=0.145"));
    CHECK(lines[1].starts_with("F 1 t=0.145"));
    CHECK(lines[2] == "P (2,3) t=0.29 m=1");
    CHECK(lines[3] == "F 2 t=0.29");
    CHECK(lines[4].starts_with("P (1,3) t=0.43"));
    CHECK(lines[5].starts_with("F 3 t=0.43"));
}

TEST_CASE("exported state round-trips bit for bit", "[engine][property]")
{
    std::mt19937_64 rng(21);
    for (int k = 0; k < 2000; ++k) {
        auto s = random_state(rng, kParams);
        const Engine engine(s, kParams);
        REQUIRE(engine.export_state() == s);
    }
}

TEST_CASE("phases advance at unit rate between events", "[engine][property]")
{
    std::mt19937_64 rng(22);
    for (int k = 0; k < 500; ++k) {
        Engine engine(random_state(rng, kParams), kParams);
        for (int s = 0; s < 20; ++s) {
            const auto before = engine.phases();
            const double t0 = engine.clock();
            const double t1 = engine.next_event_time();
            const auto events = engine.step();
            REQUIRE_THAT(engine.clock(), WithinAbs(t1, 1e-15));
            // Oscillators untouched by this event moved by exactly dt.
            for (int i = 0; i < 3; ++i) {
                const bool touched = std::any_of(events.begin(), events.end(), [i](const TraceEvent& e) {
                    return std::find(e.oscillators.begin(), e.oscillators.end(), i) != e.oscillators.end();
                });
                if (!touched) {
                    REQUIRE_THAT(engine.phases()[i], WithinAbs(before[i] + (t1 - t0), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("every pulse arrives exactly tau after its firing", "[engine][property]")
{
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        const auto s = random_state(rng, kParams);
        Engine engine(s, kParams);
        std::vector<std::vector<double>> fire_times(3);
        for (int i = 0; i < 3; ++i) {
            for (double d : s.ftds[i]) {
                fire_times[i].push_back(-d);
            }
        }
        for (const auto& e : engine.simulate(5.0)) {
            if (e.kind == EventKind::Fire) {
                fire_times[e.oscillators.front()].push_back(e.time);
                continue;
            }
            for (int sender : e.senders) {
                const bool matched = std::any_of(fire_times[sender].begin(), fire_times[sender].end(),
                                                 [&](double f) { return std::abs(f + 0.58 - e.time) <= 1e-12; });
                REQUIRE(matched);
            }
        }
    }
}

TEST_CASE("memory holds exactly the firings whose pulses are in flight", "[engine][property]")
{
    std::mt19937_64 rng(24);
    for (int k = 0; k < 100; ++k) {
        const auto s = random_state(rng, kParams);
        Engine engine(s, kParams);
        std::vector<double> fired;
        for (const auto& d : s.ftds) {
            for (double x : d) {
                fired.push_back(-x);
            }
        }
        for (int step = 0; step < 2000; ++step) {
            for (const auto& e : engine.step()) {
                if (e.kind == EventKind::Fire) {
                    fired.push_back(e.time);
                }
            }
            const double now = engine.clock();
            const auto in_flight = std::count_if(fired.begin(), fired.end(),
                                                 [&](double f) { return f + 0.58 > now + 1e-12; });
            std::size_t total = 0;
            for (const auto& d : engine.export_state().ftds) {
                total += d.size();
                for (double x : d) {
                    REQUIRE(x >= 0.0);
                    REQUIRE(x <= 0.58 + 1e-12);
                }
            }
            REQUIRE(total == static_cast<std::size_t>(in_flight));
        }
    }
}

TEST_CASE("uncoupled oscillators with empty history fire at integer times", "[engine]")
{
    const ModelParams p(3.0, 0.0, 3, 0.3);
    Engine engine(NetworkState{{0.0, 0.0, 0.0}, {{}, {}, {}}}, p);
    int fires = 0;
    for (const auto& e : engine.simulate(3.0)) {
        if (e.kind == EventKind::Fire) {
            ++fires;
            CHECK_THAT(e.time, WithinAbs(std::round(e.time), 1e-12));
        }
    }
    CHECK(fires == 9);
}

TEST_CASE("invalid states are rejected with the violated invariant", "[engine]")
{
    auto bad = center_state();
    bad.ftds[0] = {0.7};
    CHECK_THROWS_WITH(Engine(bad, kParams), ContainsSubstring("[0, tau"));
    bad = center_state();
    bad.phases[1] = 1.0;
    CHECK_THROWS_WITH(Engine(bad, kParams), ContainsSubstring("[0,1)"));
    bad = center_state();
    bad.ftds[2] = {0.4, 0.1};
    CHECK_THROWS_WITH(Engine(bad, kParams), ContainsSubstring("sorted"));
    bad = center_state();
    bad.ftds[2] = {0.1, 0.1};
    CHECK_THROWS_WITH(Engine(bad, kParams), ContainsSubstring("twice"));
    bad = center_state();
    bad.phases.pop_back();
    CHECK_THROWS_AS(Engine(bad, kParams), InvalidStateError);
}

TEST_CASE("a firing exactly tau ago is delivered at t = 0", "[engine]")
{
    Engine engine(NetworkState{{0.2, 0.1, 0.0}, {{0.58}, {}, {}}}, kParams);
    CHECK(engine.next_event_time() == 0.0);
    const auto events = engine.step();
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::Pulse);
    CHECK(events[0].oscillators == std::vector<int>{1, 2});
}

TEST_CASE("zero delay cascades terminate and skip pulses at the firing instant", "[engine]")
{
    const ModelParams p(3.0, 0.9, 3, 0.0);
    Engine engine(NetworkState{{0.99999, 0.9, 0.0}, {{}, {}, {}}}, p);
    const auto events = engine.step();
    int fires = 0;
    for (const auto& e : events) {
        fires += e.kind == EventKind::Fire ? 1 : 0;
    }
    CHECK(fires == 2);
    CHECK(engine.phases()[0] == 0.0);
    CHECK(engine.phases()[1] == 0.0);
    CHECK(engine.phases()[2] > 0.0);
}

TEST_CASE("section search gives up after its horizon", "[engine]")
{
    const ModelParams p(3.0, 0.0, 3, 0.3);
    Engine engine(NetworkState{{0.5, 0.5, 0.0}, {{}, {}, {0.0}}}, p, EngineOptions{1e-12, 0.5});
    CHECK_THROWS_AS(engine.run_until_section(2), HorizonExceeded);
}

TEST_CASE("events render in the one-line trace format", "[engine]")
{
    CHECK(format_event(TraceEvent{EventKind::Pulse, 0.145, {0, 1}, 1, {2}}) == "P (1,2) t=0.145 m=1");
    CHECK(format_event(TraceEvent{EventKind::Fire, 0.145, {0}, 0, {}}) == "F 1 t=0.145");
}
