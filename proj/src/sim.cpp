#include "flockpp/sim.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <random>

namespace flockpp {

namespace {

bool is_silent(const Protocol& p, std::span<const Count> counts) {
    const auto q = static_cast<std::uint16_t>(counts.size());
    for (std::uint16_t a = 0; a < q; ++a) {
        if (counts[a] == 0) continue;
        for (std::uint16_t b = 0; b < q; ++b) {
            if (counts[b] == 0 || (a == b && counts[a] < 2)) continue;
            if (!p.is_identity(StateId{a}, StateId{b})) return false;
        }
    }
    return true;
}

// State of the agent with the given rank when agents are listed by state.
StateId agent_state(std::span<const Count> counts, std::size_t agent) {
    for (std::uint16_t s = 0;; ++s) {
        if (agent < counts[s]) return StateId{s};
        agent -= counts[s];
    }
}

}  // namespace

SimReport run(const Protocol& p, std::size_t n, std::uint64_t seed, const SimOptions& opts) {
    if (n < 1 || n > std::numeric_limits<Count>::max())
        throw std::invalid_argument("population size must be in [1, 65535]");
    if (opts.max_steps < 1) throw std::invalid_argument("max_steps must be positive");

    SimReport r;
    r.n = n;
    r.seed = seed;
    r.max_steps = opts.max_steps;

    std::mt19937_64 rng(seed);
    std::vector<Count> counts(p.num_states(), 0);
    counts[p.q_init().index] = static_cast<Count>(n);

    std::size_t q1_agents = p.is_q1(p.q_init()) ? n : 0;
    auto unanimous_output = [&]() -> std::optional<int> {
        if (q1_agents == n) return 1;
        if (q1_agents == 0) return 0;
        return std::nullopt;
    };
    r.ever_emitted_q1 = q1_agents > 0;
    r.output = unanimous_output();
    if (r.output) r.convergence_step = 0;

    // n == 1 admits no encounter at all.
    bool silent = n < 2 || is_silent(p, counts);
    std::size_t step = 0;
    std::vector<Count> before;
    while (!silent && step < opts.max_steps) {
        ++step;
        const std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
        if (j >= i) ++j;
        const StateId a = agent_state(counts, i);
        const StateId b = agent_state(counts, j);
        const auto& outs = p.delta(a, b);
        const StatePair o =
            outs.size() == 1
                ? outs.front()
                : outs[std::uniform_int_distribution<std::size_t>(0, outs.size() - 1)(rng)];
        if (o == StatePair{a, b}) continue;

        const bool validate = opts.validate_every > 0 && step % opts.validate_every == 0;
        if (validate) before = counts;
        --counts[a.index];
        --counts[b.index];
        ++counts[o.first.index];
        ++counts[o.second.index];
        for (StateId s : {a, b}) q1_agents -= p.is_q1(s) ? 1 : 0;
        for (StateId s : {o.first, o.second}) q1_agents += p.is_q1(s) ? 1 : 0;
        if (q1_agents > 0) r.ever_emitted_q1 = true;
        if (validate) {
            const auto next = successors(p, Configuration(before));
            if (!std::binary_search(next.begin(), next.end(), Configuration(counts)))
                throw std::logic_error("simulation step is not a transition");
        }

        const auto now = unanimous_output();
        if (now != r.output) {
            r.output = now;
            r.convergence_step = now ? std::optional<std::size_t>(step) : std::nullopt;
        }
        silent = is_silent(p, counts);
    }

    r.steps_taken = step;
    r.silent = silent;
    r.converged = r.output.has_value();
    r.final_configuration = Configuration(std::move(counts));
    return r;
}

std::vector<SimReport> run_batch_serial(const Protocol& p, std::size_t n, std::uint64_t seed_lo,
                                        std::size_t count, const SimOptions& opts) {
    std::vector<SimReport> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(run(p, n, seed_lo + i, opts));
    return out;
}

std::vector<SimReport> run_batch(const Protocol& p, std::size_t n, std::uint64_t seed_lo,
                                 std::size_t count, const SimOptions& opts) {
    std::vector<SimReport> out(count);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run(p, n, seed_lo + static_cast<std::uint64_t>(i), opts);
        } catch (...) {
#pragma omp critical(flockpp_sim_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

nlohmann::json sim_report_to_json(const Protocol& p, const SimReport& r) {
    nlohmann::json j;
    j["protocol"] = p.name();
    j["n"] = r.n;
    j["seed"] = r.seed;
    j["rng"] = r.rng;
    j["max_steps"] = r.max_steps;
    j["steps_taken"] = r.steps_taken;
    j["silent"] = r.silent;
    j["converged"] = r.converged;
    j["output"] = r.output ? nlohmann::json(*r.output) : nullptr;
    j["convergence_step"] = r.convergence_step ? nlohmann::json(*r.convergence_step) : nullptr;
    j["ever_emitted_q1"] = r.ever_emitted_q1;
    nlohmann::json fin = nlohmann::json::object();
    for (const auto& [q, c] : r.final_configuration.canonical()) fin[p.state_name(q)] = c;
    j["final_configuration"] = std::move(fin);
    return j;
}

}  // namespace flockpp
