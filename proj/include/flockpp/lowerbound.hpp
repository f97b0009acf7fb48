#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "flockpp/core.hpp"
#include "json.hpp"

namespace flockpp {

/// f(q): the least population size from which state q can occur.
struct FMap {
    /// Indexed by state; nullopt means "did not occur for any n <= explored".
    std::vector<std::optional<std::size_t>> values;
    std::size_t n_cap = 0;
    /// Largest n whose reachability graph was fully explored (== n_cap unless
    /// the node cap was hit).
    std::size_t explored = 0;
    /// Population at which exploration hit the node cap, if it did.
    std::optional<std::size_t> cap_exceeded_at;

    std::optional<std::size_t> at(StateId q) const { return values.at(q.index); }
    /// Sorted distinct finite values, i.e. f(Q) restricted to what is known.
    std::vector<std::size_t> image() const;
};

/// Sweeps n = 1..n_cap, one reachability graph per n, in parallel (OpenMP).
/// Values from populations at or beyond a cap failure are discarded.
FMap compute_f(const Protocol& p, std::size_t n_cap, std::size_t node_cap = kDefaultNodeCap);
/// Single-threaded reference for compute_f; stops at the first cap failure.
FMap compute_f_serial(const Protocol& p, std::size_t n_cap,
                      std::size_t node_cap = kDefaultNodeCap);

/// Upper bound on f from the composition rule f(c), f(d) <= f(a) + f(b) for
/// every outcome (c, d) of (a, b), starting at f(q_init) = 1. Agents can be
/// shared between the two sub-populations, so this may exceed the exact value.
std::vector<std::optional<std::size_t>> f_composition_bound(const Protocol& p);

struct GapVerdict {
    bool holds = true;
    /// First consecutive pair (a, b) of f(Q) with b > 2a.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Consecutive elements a < b of the finite f-values satisfy b <= 2a.
GapVerdict check_gap_lemma(const FMap& f);
GapVerdict check_gap_lemma(std::vector<std::size_t> f_values);

/// |Q| >= log2 d + 1, evaluated exactly as 2^(|Q|-1) >= d.
bool check_theorem2(std::size_t num_states, std::uint64_t d);
bool check_theorem2(const Protocol& p, std::uint64_t d);

nlohmann::json fmap_to_json(const Protocol& p, const FMap& f);

}  // namespace flockpp
