#include "flockpp/lowerbound.hpp"

#include <algorithm>
#include <exception>

namespace flockpp {

std::vector<std::size_t> FMap::image() const {
    std::vector<std::size_t> out;
    for (const auto& v : values)
        if (v) out.push_back(*v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void record(FMap& f, const std::vector<StateId>& occurring, std::size_t n) {
    for (StateId q : occurring) {
        auto& v = f.values[q.index];
        if (!v || *v > n) v = n;
    }
}

FMap empty_map(const Protocol& p, std::size_t n_cap) {
    if (n_cap < 1) throw std::invalid_argument("n_cap must be positive");
    FMap f;
    f.values.assign(p.num_states(), std::nullopt);
    f.n_cap = n_cap;
    return f;
}

}  // namespace

FMap compute_f_serial(const Protocol& p, std::size_t n_cap, std::size_t node_cap) {
    FMap f = empty_map(p, n_cap);
    for (std::size_t n = 1; n <= n_cap; ++n) {
        try {
            record(f, occurring_states(reach(p, n, node_cap)), n);
        } catch (const CapExceeded&) {
            f.cap_exceeded_at = n;
            break;
        }
        f.explored = n;
    }
    return f;
}

FMap compute_f(const Protocol& p, std::size_t n_cap, std::size_t node_cap) {
    FMap f = empty_map(p, n_cap);
    const auto count = static_cast<std::ptrdiff_t>(n_cap);
    std::vector<std::optional<std::vector<StateId>>> per_n(n_cap);
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = count - 1; i >= 0; --i) {
        try {
            per_n[static_cast<std::size_t>(i)] =
                occurring_states(reach(p, static_cast<std::size_t>(i) + 1, node_cap));
        } catch (const CapExceeded&) {
            // Left empty; the merge below stops here.
        } catch (...) {
#pragma omp critical(flockpp_fmap_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    for (std::size_t n = 1; n <= n_cap; ++n) {
        if (!per_n[n - 1]) {
            f.cap_exceeded_at = n;
            break;
        }
        record(f, *per_n[n - 1], n);
        f.explored = n;
    }
    return f;
}

std::vector<std::optional<std::size_t>> f_composition_bound(const Protocol& p) {
    const std::size_t q = p.num_states();
    std::vector<std::optional<std::size_t>> bound(q);
    bound[p.q_init().index] = 1;
    // Bellman-Ford style relaxation; values only decrease and are bounded below.
    for (bool changed = true; changed;) {
        changed = false;
        for (std::uint16_t a = 0; a < q; ++a) {
            if (!bound[a]) continue;
            for (std::uint16_t b = 0; b < q; ++b) {
                if (!bound[b]) continue;
                const std::size_t sum = *bound[a] + *bound[b];
                for (const StatePair& o : p.delta(StateId{a}, StateId{b})) {
                    for (StateId r : {o.first, o.second}) {
                        auto& v = bound[r.index];
                        if (!v || *v > sum) {
                            v = sum;
                            changed = true;
                        }
                    }
                }
            }
        }
    }
    return bound;
}

GapVerdict check_gap_lemma(std::vector<std::size_t> f_values) {
    std::sort(f_values.begin(), f_values.end());
    f_values.erase(std::unique(f_values.begin(), f_values.end()), f_values.end());
    for (std::size_t i = 1; i < f_values.size(); ++i) {
        if (f_values[i] > 2 * f_values[i - 1])
            return GapVerdict{false, std::pair{f_values[i - 1], f_values[i]}};
    }
    return GapVerdict{};
}

GapVerdict check_gap_lemma(const FMap& f) { return check_gap_lemma(f.image()); }

bool check_theorem2(std::size_t num_states, std::uint64_t d) {
    if (num_states == 0) return false;
    if (num_states - 1 >= 64) return true;
    return (std::uint64_t{1} << (num_states - 1)) >= d;
}

bool check_theorem2(const Protocol& p, std::uint64_t d) {
    return check_theorem2(p.num_states(), d);
}

nlohmann::json fmap_to_json(const Protocol& p, const FMap& f) {
    nlohmann::json j;
    j["protocol"] = p.name();
    j["n_cap"] = f.n_cap;
    j["explored"] = f.explored;
    j["cap_exceeded_at"] = f.cap_exceeded_at ? nlohmann::json(*f.cap_exceeded_at) : nullptr;
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t s = 0; s < f.values.size(); ++s) {
        const auto& name = p.state_name(StateId{static_cast<std::uint16_t>(s)});
        values[name] = f.values[s] ? nlohmann::json(*f.values[s]) : nlohmann::json("unknown");
    }
    j["f"] = std::move(values);
    const auto image = f.image();
    j["image"] = image;
    nlohmann::json ratios = nlohmann::json::array();
    for (std::size_t i = 1; i < image.size(); ++i)
        ratios.push_back(static_cast<double>(image[i]) / static_cast<double>(image[i - 1]));
    j["gap_ratios"] = std::move(ratios);
    return j;
}

}  // namespace flockpp
