#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flockpp/core.hpp"
#include "flockpp/protocols.hpp"
#include "json.hpp"

namespace flockpp {

enum class Status { Holds, Fails, NotApplicable };

std::string_view status_name(Status s) noexcept;

struct Verdict {
    Status status = Status::NotApplicable;
    /// Reachable configuration violating the property; set iff status == Fails.
    std::optional<Configuration> witness;
    /// Encounter sequence I_n -> witness; only filled when a trace was requested.
    std::vector<Configuration> trace;

    bool holds() const noexcept { return status == Status::Holds; }
    bool fails() const noexcept { return status == Status::Fails; }
};

// Checks over an already explored graph. `trace` requests the BFS path to the
// witness.

/// No reachable configuration holds a 1-state.
Verdict check_soundness(const Protocol& p, const ReachGraph& g, bool trace = false);
/// A configuration with a 1-state stays reachable from every reachable configuration.
Verdict check_completeness(const Protocol& p, const ReachGraph& g, bool trace = false);
/// Every bottom-SCC configuration is unanimous with output `expected`.
/// Under fairness, runs end in a bottom SCC and visit all of it infinitely often.
Verdict check_consensus(const Protocol& p, const ReachGraph& g, int expected, bool trace = false);

// Convenience forms that explore reach(p, n, node_cap) first; CapExceeded propagates.
Verdict check_soundness(const Protocol& p, std::size_t n, std::size_t node_cap = kDefaultNodeCap);
Verdict check_completeness(const Protocol& p, std::size_t n,
                           std::size_t node_cap = kDefaultNodeCap);
Verdict check_consensus(const Protocol& p, int expected, std::size_t n,
                        std::size_t node_cap = kDefaultNodeCap);

struct VerificationReport {
    std::string protocol_name;
    std::uint64_t d = 0;
    std::size_t n = 0;
    Verdict sound;
    Verdict complete;
    Verdict consensus;
    /// Output the population should converge to: 1 iff n >= d.
    int expected_output = 0;
    std::size_t nodes_explored = 0;
    std::size_t bottom_scc_count = 0;
    double elapsed_seconds = 0.0;
    /// Set when exploration hit the node cap; verdicts are then NotApplicable.
    std::optional<std::size_t> cap_exceeded;

    bool any_failure() const noexcept {
        return sound.fails() || complete.fails() || consensus.fails();
    }
    bool all_hold() const noexcept { return !any_failure() && !cap_exceeded; }
};

struct VerifyOptions {
    std::size_t node_cap = kDefaultNodeCap;
    bool trace = false;
};

/// n < d: soundness and consensus(0). n >= d: completeness and consensus(1).
VerificationReport verify_one(const Protocol& p, std::uint64_t d, std::size_t n,
                              const VerifyOptions& opts = {});

/// Reports for n_lo..n_hi in increasing n, evaluated concurrently (OpenMP).
std::vector<VerificationReport> verify_range(const Protocol& p, std::uint64_t d, std::size_t n_lo,
                                             std::size_t n_hi, const VerifyOptions& opts = {});
std::vector<VerificationReport> verify_range(Family f, std::uint64_t d, std::size_t n_lo,
                                             std::size_t n_hi, const VerifyOptions& opts = {});
/// Single-threaded reference for verify_range; identical output apart from timings.
std::vector<VerificationReport> verify_range_serial(const Protocol& p, std::uint64_t d,
                                                    std::size_t n_lo, std::size_t n_hi,
                                                    const VerifyOptions& opts = {});

nlohmann::json report_to_json(const Protocol& p, const VerificationReport& r);

struct StateCountRow {
    std::uint64_t d = 0;
    int e = 0;
    std::optional<int> z;
    std::size_t q_angluin = 0;
    std::size_t q_a = 0;
    std::optional<std::size_t> q_b;
    std::optional<std::size_t> q_pow2;
    std::size_t q_best = 0;
    /// floor(log2 d) + min{e, z} + 2
    std::size_t theorem1_bound = 0;
    /// Smallest integer >= log2 d + 1.
    std::size_t lower_bound = 0;

    bool bounds_hold() const noexcept {
        return lower_bound <= q_best && q_best <= theorem1_bound;
    }
};

std::size_t theorem1_bound(std::uint64_t d);
std::size_t state_lower_bound(std::uint64_t d);

std::vector<StateCountRow> state_count_table(std::uint64_t d_lo, std::uint64_t d_hi);
/// Header `d,e,z,q_angluin,q_a,q_b,q_pow2,q_best,theorem1_bound,lower_bound`;
/// inapplicable cells are empty.
std::string state_count_csv(const std::vector<StateCountRow>& rows);

}  // namespace flockpp
