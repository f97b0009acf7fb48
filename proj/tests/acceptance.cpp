// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "flockpp/core.hpp"
#include "flockpp/lowerbound.hpp"
#include "flockpp/protocols.hpp"
#include "flockpp/sim.hpp"
#include "flockpp/verify.hpp"
#include "oracle/agent_oracle.hpp"
#include "test_support.hpp"

using namespace flockpp;

namespace {

// Family a at d = 31 has 11 states and outgrows the default cap for n > 31.
constexpr std::size_t kEscalatedCap = 40'000'000;

constexpr Family kAllFamilies[] = {Family::Angluin, Family::A, Family::Pow2, Family::B,
                                   Family::Best};

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void fail(std::string why) {
        pass = false;
        if (failures.size() < 10) failures.push_back(std::move(why));
    }
};

std::vector<std::uint64_t> sweep_thresholds() {
    std::vector<std::uint64_t> ds;
    for (std::uint64_t d = 1; d <= 20; ++d) ds.push_back(d);
    for (std::uint64_t d : {31, 32, 33}) ds.push_back(d);
    return ds;
}

std::size_t floor_log2(std::uint64_t d) { return static_cast<std::size_t>(std::bit_width(d) - 1); }

std::string where(const Protocol& p, std::size_t n) { return p.name() + " n=" + std::to_string(n); }

// 1. Exhaustive correctness sweep.
Outcome correctness_sweep() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    std::size_t runs = 0;
    std::size_t protocols = 0;
    std::size_t escalated = 0;
    for (std::uint64_t d : sweep_thresholds()) {
        for (Family f : kAllFamilies) {
            if (!family_applicable(f, d)) continue;
            const Protocol p = build(f, d);
            ++protocols;
            for (auto r : verify_range(p, d, 1, d + 3)) {
                ++runs;
                // Retry over-cap rows one at a time with a larger cap.
                if (r.cap_exceeded) {
                    r = verify_one(p, d, r.n, {kEscalatedCap, false});
                    ++escalated;
                }
                if (r.cap_exceeded) {
                    o.fail(where(p, r.n) + " node cap exceeded");
                    continue;
                }
                if (r.n < d) {
                    if (!r.sound.holds()) o.fail(where(p, r.n) + " soundness");
                    if (!r.consensus.holds()) o.fail(where(p, r.n) + " consensus(R=0)");
                } else {
                    if (!r.complete.holds()) o.fail(where(p, r.n) + " completeness");
                    if (!r.consensus.holds()) o.fail(where(p, r.n) + " consensus(R=1)");
                }
            }
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > 600.0) o.fail("runtime " + std::to_string(seconds) + " s exceeds 10 minutes");
    o.detail = std::to_string(protocols) + " protocols, " + std::to_string(runs) +
               " (protocol, n) runs, " + std::to_string(escalated) + " rerun with a " +
               std::to_string(kEscalatedCap) + "-node cap, " + std::to_string(seconds) + " s";
    return o;
}

// 2. Upper bound and the 3/2 log2 d corollary, exact integers.
Outcome theorem1_instances() {
    Outcome o;
    for (std::uint64_t d = 2; d <= 4096; ++d) {
        const auto tp = params(d);
        const std::size_t q = build_best(d).num_states();
        const std::size_t bound = floor_log2(d) + static_cast<std::size_t>(std::min(tp.e, *tp.z)) + 2;
        if (q > bound) o.fail("d=" + std::to_string(d) + " |Q_best|=" + std::to_string(q));
        // e + z <= (digits of d - 1) + 1
        if (tp.e + *tp.z > std::bit_width(d - 1) + 1)
            o.fail("d=" + std::to_string(d) + " e+z too large");
        // q <= 1.5 log2 d + 3  <=>  2^(2(q-3)) <= d^3
        if (q > 3) {
            const std::uint64_t lhs = std::uint64_t{1} << (2 * (q - 3));
            if (lhs > d * d * d) o.fail("d=" + std::to_string(d) + " exceeds 1.5 log2 d + 3");
        }
    }
    o.detail = "d = 2..4096";
    return o;
}

// 3. Exact state counts.
Outcome state_counts() {
    Outcome o;
    for (std::uint64_t d = 2; d <= 512; ++d) {
        const auto tp = params(d);
        auto expect = [&](const char* what, std::size_t got, std::size_t want) {
            if (got != want)
                o.fail(std::string(what) + " d=" + std::to_string(d) + ": " + std::to_string(got) +
                       " != " + std::to_string(want));
        };
        expect("angluin", build_angluin(d).num_states(), d + 1);
        expect("a", build_protocol_a(d).num_states(), floor_log2(d) + tp.e + 2);
        if (family_applicable(Family::B, d))
            expect("b", build_protocol_b(d).num_states(), static_cast<std::size_t>(*tp.k + *tp.z + 2));
        if (family_applicable(Family::Pow2, d))
            expect("pow2", build_power_of_two(d).num_states(), floor_log2(d) + 2);
    }
    if (build_protocol_b(7).num_states() != 5) o.fail("|Q_b(7)| != 5");
    if (build_protocol_a(7).num_states() != 7) o.fail("|Q_a(7)| != 7");
    if (build_protocol_b(11).num_states() != 7) o.fail("|Q_b(11)| != 7");
    o.detail = "d = 2..512 plus spot values 7, 11";
    return o;
}

// 4. f-map, gap lemma, and the log2 d + 1 lower bound.
Outcome lower_bound_instances() {
    Outcome o;
    std::size_t checked = 0;
    for (std::uint64_t d = 2; d <= 20; ++d) {
        for (Family f : kAllFamilies) {
            if (!family_applicable(f, d)) continue;
            const Protocol p = build(f, d);
            ++checked;
            const FMap fm = compute_f(p, d + 2);
            if (fm.cap_exceeded_at) o.fail(p.name() + " node cap exceeded");
            if (fm.at(p.q_init()) != 1u) o.fail(p.name() + " f(q_init) != 1");
            for (StateId q : p.q1_states())
                if (fm.at(q) != d) o.fail(p.name() + " f(" + p.state_name(q) + ") != d");
            if (!check_gap_lemma(fm).holds) o.fail(p.name() + " gap lemma");
            if (!check_theorem2(p, d)) o.fail(p.name() + " 2^(|Q|-1) < d");
        }
    }
    o.detail = std::to_string(checked) + " protocols, d = 2..20, n_cap = d + 2";
    return o;
}

// 5. Multiset explorer against agent-indexed brute force.
Outcome oracle_equivalence() {
    Outcome o;
    std::size_t graphs = 0;
    for (std::uint64_t d = 1; d <= 7; ++d) {
        for (Family f : kAllFamilies) {
            if (!family_applicable(f, d)) continue;
            const Protocol p = build(f, d);
            for (std::size_t n = 1; n <= 4; ++n) {
                ++graphs;
                const ReachGraph g = reach(p, n);
                const auto mine = oracle::quotient_of(g);
                const auto theirs = oracle::quotient_graph(p, n);
                if (g.size() != theirs.nodes.size()) o.fail(where(p, n) + " node count");
                if (mine.nodes != theirs.nodes || mine.edges != theirs.edges)
                    o.fail(where(p, n) + " graph differs");
                if (check_soundness(p, g).holds() == oracle::some_q1_reachable(p, n))
                    o.fail(where(p, n) + " soundness verdict differs");
            }
        }
    }
    o.detail = std::to_string(graphs) + " graphs, d <= 7, n <= 4";
    return o;
}

// 6. Coin conservation (a) and monotonicity (b) over the full tables.
Outcome conservation() {
    Outcome o;
    std::size_t entries = 0;
    for (std::uint64_t d = 2; d <= 64; ++d) {
        const auto tp = params(d);
        std::vector<Protocol> protocols{build_protocol_a(d)};
        if (family_applicable(Family::B, d)) protocols.push_back(build_protocol_b(d));
        for (std::size_t which = 0; which < protocols.size(); ++which) {
            const Protocol& p = protocols[which];
            const bool is_b = which == 1;
            std::optional<StateId> half;
            if (is_b) half = p.state("NB(" + std::to_string(std::uint64_t{1} << (*tp.k - 1)) + ")");
            const auto n = static_cast<std::uint16_t>(p.num_states());
            for (std::uint16_t a = 0; a < n; ++a) {
                for (std::uint16_t b = 0; b < n; ++b) {
                    const auto va = test_support::coin_value(p, StateId{a});
                    const auto vb = test_support::coin_value(p, StateId{b});
                    for (const auto& out : p.delta(StateId{a}, StateId{b})) {
                        ++entries;
                        const auto vc = test_support::coin_value(p, out.first);
                        const auto vd = test_support::coin_value(p, out.second);
                        if (!va || !vb || !vc || !vd) continue;
                        const std::uint64_t before = *va + *vb;
                        const std::uint64_t after = *vc + *vd;
                        const bool minting = is_b && StateId{a} == *half && StateId{b} == *half;
                        const std::uint64_t want = minting ? before + *tp.a : before;
                        if (after != want)
                            o.fail(p.name() + " (" + p.state_name(StateId{a}) + ", " +
                                   p.state_name(StateId{b}) + ")");
                    }
                }
            }
        }
    }
    o.detail = std::to_string(entries) + " table entries, d = 2..64";
    return o;
}

// 7. Every documented mutation trips a check, with a genuine witness.
Outcome mutation_sensitivity() {
    Outcome o;
    const auto mutations = test_support::d7_mutations();
    if (mutations.size() < 5) o.fail("fewer than 5 mutations");
    for (const auto& m : mutations) {
        const Protocol p = m.apply(7);
        bool caught = false;
        for (const auto& r : verify_range(p, 7, 1, 10)) {
            for (const Verdict* v : {&r.sound, &r.complete, &r.consensus}) {
                if (!v->fails()) continue;
                if (!v->witness || !reach(p, r.n).find(*v->witness))
                    o.fail(m.description + ": witness not in the graph");
                caught = true;
            }
        }
        if (!caught) o.fail(m.description + ": not detected");
    }
    o.detail = std::to_string(mutations.size()) + " mutations of a(7)/b(7)";
    return o;
}

// 8. Random-scheduler sanity.
Outcome simulation_sanity() {
    Outcome o;
    const Protocol p = build_protocol_b(7);
    const SimOptions opts{1'000'000, 1000};
    for (std::size_t n : {7, 10}) {
        const auto all_final =
            Configuration::from_pairs(p, {{"FINAL", static_cast<Count>(n)}});
        for (const auto& r : run_batch(p, n, 0, 100, opts)) {
            if (!r.converged || r.output != 1 || r.final_configuration != all_final)
                o.fail("n=" + std::to_string(n) + " seed=" + std::to_string(r.seed) +
                       " did not end all-FINAL");
        }
    }
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& r : run_batch(p, n, 0, 1000, opts))
            if (r.ever_emitted_q1)
                o.fail("n=" + std::to_string(n) + " seed=" + std::to_string(r.seed) +
                       " emitted FINAL");
    }
    o.detail = "b(7): 2 x 100 seeds at n in {7, 10}; 6 x 1000 seeds at n < 7";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 correctness sweep", correctness_sweep},
        {"AC2 upper-bound instances", theorem1_instances},
        {"AC3 exact state counts", state_counts},
        {"AC4 f-map / gap lemma / lower bound", lower_bound_instances},
        {"AC5 oracle equivalence", oracle_equivalence},
        {"AC6 conservation properties", conservation},
        {"AC7 mutation sensitivity", mutation_sensitivity},
        {"AC8 simulation sanity", simulation_sanity},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        for (const auto& f : o.failures) std::printf("       %s\n", f.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
