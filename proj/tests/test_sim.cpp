#include "doctest.h"
#include "flockpp/protocols.hpp"
#include "flockpp/sim.hpp"

using namespace flockpp;

TEST_CASE("protocol b at the threshold converges to all FINAL") {
    const Protocol p = build_protocol_b(7);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SimReport r = run(p, 7, seed, {100'000, 1000});
        CAPTURE(seed);
        CHECK(r.converged);
        CHECK(r.output == 1);
        CHECK(r.final_configuration == Configuration::from_pairs(p, {{"FINAL", 7}}));
        CHECK(r.ever_emitted_q1);
        CHECK(*r.convergence_step <= r.steps_taken);
        CHECK(r.silent);
    }
}

TEST_CASE("protocol a below the threshold never emits FINAL") {
    const Protocol p = build_protocol_a(7);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SimReport r = run(p, 3, seed, {10'000, 1000});
        CHECK_FALSE(r.ever_emitted_q1);
        CHECK(r.output == 0);
        CHECK(r.convergence_step == 0u);
    }
}

TEST_CASE("identity-only start stays put") {
    Protocol p("idle", {"X", "Y"}, StateId{0}, {StateId{1}});
    const SimReport r = run(p, 2, 1, {50, 1});
    CHECK(r.final_configuration == Configuration::initial(p, 2));
    CHECK(r.silent);
    CHECK(r.steps_taken == 0);
}

TEST_CASE("single agent") {
    const Protocol p = build_protocol_b(7);
    const SimReport r = run(p, 1, 3);
    CHECK(r.steps_taken == 0);
    CHECK(r.final_configuration == Configuration::initial(p, 1));
    CHECK_FALSE(r.ever_emitted_q1);
}

TEST_CASE("runs are reproducible") {
    const Protocol p = build_angluin(9);
    const SimReport a = run(p, 12, 42, {5'000, 1});
    const SimReport b = run(p, 12, 42, {5'000, 1});
    CHECK(a.final_configuration == b.final_configuration);
    CHECK(a.steps_taken == b.steps_taken);
    CHECK(a.convergence_step == b.convergence_step);
    CHECK(a.rng == std::string(kSimRngName));
}

TEST_CASE("non-convergence within the horizon is reported") {
    // Two agents flip each other back and forth forever.
    Protocol p("flip", {"X", "Y"}, StateId{0}, {StateId{1}});
    p.set_symmetric(StateId{0}, StateId{0}, {StateId{0}, StateId{1}});
    p.set_symmetric(StateId{0}, StateId{1}, {StateId{0}, StateId{0}});
    const SimReport r = run(p, 2, 7, {1'000, 1});
    CHECK(r.steps_taken == 1'000);
    CHECK_FALSE(r.silent);
    CHECK(r.ever_emitted_q1);
}

TEST_CASE("non-deterministic outcomes are sampled") {
    Protocol p("coin", {"H", "T"}, StateId{0}, {StateId{1}}, false);
    p.set_transition(StateId{0}, StateId{0}, {{StateId{0}, StateId{1}}, {StateId{1}, StateId{1}}});
    int all_tails = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SimReport r = run(p, 2, seed, {10, 1});
        if (r.final_configuration == Configuration({0, 2})) ++all_tails;
    }
    CHECK(all_tails > 20);
    CHECK(all_tails < 80);
}

TEST_CASE("sim json") {
    const Protocol p = build_protocol_b(7);
    const auto j = sim_report_to_json(p, run(p, 7, 5));
    CHECK(j["converged"] == true);
    CHECK(j["final_configuration"]["FINAL"] == 7);
    CHECK(j["rng"] == "mt19937_64");
}
