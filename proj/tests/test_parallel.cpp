#include "doctest.h"
#include "flockpp/protocols.hpp"
#include "flockpp/sim.hpp"
#include "flockpp/verify.hpp"

using namespace flockpp;

namespace {

void check_same(const Verdict& a, const Verdict& b) {
    CHECK(a.status == b.status);
    CHECK(a.witness == b.witness);
}

}  // namespace

TEST_CASE("OpenMP verify_range matches the serial reference") {
    for (Family f : {Family::A, Family::B, Family::Angluin}) {
        const Protocol p = build(f, 11);
        const auto par = verify_range(p, 11, 1, 14, {100'000, true});
        const auto ser = verify_range_serial(p, 11, 1, 14, {100'000, true});
        REQUIRE(par.size() == ser.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].n == ser[i].n);
            CHECK(par[i].nodes_explored == ser[i].nodes_explored);
            CHECK(par[i].bottom_scc_count == ser[i].bottom_scc_count);
            CHECK(par[i].cap_exceeded == ser[i].cap_exceeded);
            check_same(par[i].sound, ser[i].sound);
            check_same(par[i].complete, ser[i].complete);
            check_same(par[i].consensus, ser[i].consensus);
        }
    }
}

TEST_CASE("OpenMP run_batch matches the serial reference") {
    const Protocol p = build_protocol_b(11);
    const auto par = run_batch(p, 12, 100, 16, {50'000, 500});
    const auto ser = run_batch_serial(p, 12, 100, 16, {50'000, 500});
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) {
        CHECK(par[i].seed == 100 + i);
        CHECK(par[i].seed == ser[i].seed);
        CHECK(par[i].steps_taken == ser[i].steps_taken);
        CHECK(par[i].convergence_step == ser[i].convergence_step);
        CHECK(par[i].final_configuration == ser[i].final_configuration);
    }
}
