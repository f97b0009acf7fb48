#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flockpp/core.hpp"
#include "json.hpp"

namespace flockpp {

inline constexpr const char* kSimRngName = "mt19937_64";

struct SimOptions {
    std::size_t max_steps = 100'000;
    /// Re-check every k-th step against successors(); 0 disables.
    std::size_t validate_every = 1000;
};

struct SimReport {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string rng = kSimRngName;
    std::size_t max_steps = 0;
    /// Encounters simulated. Less than max_steps when the run went silent
    /// (every enabled encounter is an identity), after which nothing can change.
    std::size_t steps_taken = 0;
    bool silent = false;
    /// Final configuration is output-unanimous.
    bool converged = false;
    /// Output of the unanimous streak that lasts to the horizon.
    std::optional<int> output;
    /// First step of that streak (0 = already unanimous at I_n).
    std::optional<std::size_t> convergence_step;
    bool ever_emitted_q1 = false;
    Configuration final_configuration;
};

/// One run from I_n under the uniform random scheduler over ordered pairs of
/// distinct agents; outcomes of non-deterministic encounters are picked
/// uniformly. Deterministic in (p, n, seed, opts).
SimReport run(const Protocol& p, std::size_t n, std::uint64_t seed, const SimOptions& opts = {});

/// Runs seeds seed_lo .. seed_lo + count - 1, in seed order.
std::vector<SimReport> run_batch(const Protocol& p, std::size_t n, std::uint64_t seed_lo,
                                 std::size_t count, const SimOptions& opts = {});
/// Single-threaded reference for run_batch.
std::vector<SimReport> run_batch_serial(const Protocol& p, std::size_t n, std::uint64_t seed_lo,
                                        std::size_t count, const SimOptions& opts = {});

nlohmann::json sim_report_to_json(const Protocol& p, const SimReport& r);

}  // namespace flockpp
