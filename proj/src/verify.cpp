#include "flockpp/verify.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <exception>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flockpp {

namespace {

bool has_q1(const Protocol& p, std::span<const Count> counts) {
    for (std::size_t s = 0; s < counts.size(); ++s)
        if (counts[s] > 0 && p.is_q1(StateId{static_cast<std::uint16_t>(s)})) return true;
    return false;
}

bool unanimous(const Protocol& p, std::span<const Count> counts, int expected) {
    for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] == 0) continue;
        const bool one = p.is_q1(StateId{static_cast<std::uint16_t>(s)});
        if (one != (expected == 1)) return false;
    }
    return true;
}

Verdict holds() { return Verdict{Status::Holds, std::nullopt, {}}; }

Verdict fails_at(const ReachGraph& g, std::size_t node, bool trace) {
    Verdict v{Status::Fails, g.node(node), {}};
    if (trace) v.trace = g.path_to(node);
    return v;
}

}  // namespace

std::string_view status_name(Status s) noexcept {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Fails: return "fails";
        case Status::NotApplicable: return "n/a";
    }
    return "?";
}

Verdict check_soundness(const Protocol& p, const ReachGraph& g, bool trace) {
    for (std::size_t v = 0; v < g.size(); ++v)
        if (has_q1(p, g.counts(v))) return fails_at(g, v, trace);
    return holds();
}

Verdict check_completeness(const Protocol& p, const ReachGraph& g, bool trace) {
    const auto ok = can_reach_predicate(g, [&p](std::span<const Count> c) { return has_q1(p, c); });
    for (std::size_t v = 0; v < g.size(); ++v)
        if (!ok[v]) return fails_at(g, v, trace);
    return holds();
}

Verdict check_consensus(const Protocol& p, const ReachGraph& g, int expected, bool trace) {
    for (std::size_t v = 0; v < g.size(); ++v)
        if (g.in_bottom_scc(v) && !unanimous(p, g.counts(v), expected))
            return fails_at(g, v, trace);
    return holds();
}

Verdict check_soundness(const Protocol& p, std::size_t n, std::size_t node_cap) {
    return check_soundness(p, reach(p, n, node_cap));
}

Verdict check_completeness(const Protocol& p, std::size_t n, std::size_t node_cap) {
    return check_completeness(p, reach(p, n, node_cap));
}

Verdict check_consensus(const Protocol& p, int expected, std::size_t n, std::size_t node_cap) {
    return check_consensus(p, reach(p, n, node_cap), expected);
}

VerificationReport verify_one(const Protocol& p, std::uint64_t d, std::size_t n,
                              const VerifyOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    VerificationReport r;
    r.protocol_name = p.name();
    r.d = d;
    r.n = n;
    r.expected_output = n >= d ? 1 : 0;
    try {
        const ReachGraph g = reach(p, n, opts.node_cap);
        r.nodes_explored = g.size();
        r.bottom_scc_count = g.bottom_sccs().size();
        if (r.expected_output == 0)
            r.sound = check_soundness(p, g, opts.trace);
        else
            r.complete = check_completeness(p, g, opts.trace);
        r.consensus = check_consensus(p, g, r.expected_output, opts.trace);
    } catch (const CapExceeded& e) {
        r.cap_exceeded = e.cap();
        r.nodes_explored = e.cap();
    }
    r.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<VerificationReport> verify_range_serial(const Protocol& p, std::uint64_t d,
                                                    std::size_t n_lo, std::size_t n_hi,
                                                    const VerifyOptions& opts) {
    if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("need 1 <= n_lo <= n_hi");
    std::vector<VerificationReport> out;
    for (std::size_t n = n_lo; n <= n_hi; ++n) out.push_back(verify_one(p, d, n, opts));
    return out;
}

std::vector<VerificationReport> verify_range(const Protocol& p, std::uint64_t d, std::size_t n_lo,
                                             std::size_t n_hi, const VerifyOptions& opts) {
    if (n_lo < 1 || n_lo > n_hi) throw std::invalid_argument("need 1 <= n_lo <= n_hi");
    const auto count = static_cast<std::ptrdiff_t>(n_hi - n_lo + 1);
    std::vector<VerificationReport> out(static_cast<std::size_t>(count));
    std::exception_ptr error;
    // Larger populations dominate the cost, so hand them out first.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = count - 1; i >= 0; --i) {
        try {
            out[static_cast<std::size_t>(i)] =
                verify_one(p, d, n_lo + static_cast<std::size_t>(i), opts);
        } catch (...) {
#pragma omp critical(flockpp_verify_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

std::vector<VerificationReport> verify_range(Family f, std::uint64_t d, std::size_t n_lo,
                                             std::size_t n_hi, const VerifyOptions& opts) {
    return verify_range(build(f, d), d, n_lo, n_hi, opts);
}

namespace {

nlohmann::json counts_json(const Protocol& p, const Configuration& c) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [q, count] : c.canonical()) j[p.state_name(q)] = count;
    return j;
}

nlohmann::json verdict_json(const Protocol& p, const Verdict& v) {
    nlohmann::json j;
    j["status"] = status_name(v.status);
    if (v.witness) j["witness"] = counts_json(p, *v.witness);
    if (!v.trace.empty()) {
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& c : v.trace) trace.push_back(counts_json(p, c));
        j["trace"] = std::move(trace);
    }
    return j;
}

}  // namespace

nlohmann::json report_to_json(const Protocol& p, const VerificationReport& r) {
    nlohmann::json j;
    j["protocol"] = r.protocol_name;
    j["d"] = r.d;
    j["n"] = r.n;
    j["expected_output"] = r.expected_output;
    j["sound"] = verdict_json(p, r.sound);
    j["complete"] = verdict_json(p, r.complete);
    j["consensus"] = verdict_json(p, r.consensus);
    j["nodes_explored"] = r.nodes_explored;
    j["bottom_scc_count"] = r.bottom_scc_count;
    j["elapsed_seconds"] = r.elapsed_seconds;
    if (r.cap_exceeded)
        j["cap_exceeded"] = *r.cap_exceeded;
    else
        j["cap_exceeded"] = nullptr;
    return j;
}

std::size_t theorem1_bound(std::uint64_t d) {
    const ThresholdParams tp = params(d);
    const auto log2d = static_cast<std::size_t>(std::bit_width(d) - 1);
    // d = 1 has no z; the single-state protocol needs no extra states anyway.
    const int extra = tp.z ? std::min(tp.e, *tp.z) : 0;
    return log2d + static_cast<std::size_t>(extra) + 2;
}

std::size_t state_lower_bound(std::uint64_t d) {
    // Smallest L with 2^(L-1) >= d.
    return static_cast<std::size_t>(std::bit_width(d - 1)) + 1;
}

std::vector<StateCountRow> state_count_table(std::uint64_t d_lo, std::uint64_t d_hi) {
    if (d_lo < 1 || d_lo > d_hi) throw std::invalid_argument("need 1 <= d_lo <= d_hi");
    std::vector<StateCountRow> rows;
    for (std::uint64_t d = d_lo; d <= d_hi; ++d) {
        const ThresholdParams tp = params(d);
        StateCountRow row;
        row.d = d;
        row.e = tp.e;
        row.z = tp.z;
        row.q_angluin = family_state_count(Family::Angluin, d);
        row.q_a = family_state_count(Family::A, d);
        if (family_applicable(Family::B, d)) row.q_b = family_state_count(Family::B, d);
        if (family_applicable(Family::Pow2, d)) row.q_pow2 = family_state_count(Family::Pow2, d);
        row.q_best = family_state_count(Family::Best, d);
        row.theorem1_bound = theorem1_bound(d);
        row.lower_bound = state_lower_bound(d);
        rows.push_back(row);
    }
    return rows;
}

std::string state_count_csv(const std::vector<StateCountRow>& rows) {
    std::ostringstream os;
    os << "d,e,z,q_angluin,q_a,q_b,q_pow2,q_best,theorem1_bound,lower_bound\n";
    auto opt = [&os](const auto& v) {
        if (v) os << *v;
    };
    for (const auto& r : rows) {
        os << r.d << ',' << r.e << ',';
        opt(r.z);
        os << ',' << r.q_angluin << ',' << r.q_a << ',';
        opt(r.q_b);
        os << ',';
        opt(r.q_pow2);
        os << ',' << r.q_best << ',' << r.theorem1_bound << ',' << r.lower_bound << '\n';
    }
    return os.str();
}

}  // namespace flockpp
