#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flockpp/core.hpp"
#include "flockpp/protocols.hpp"

namespace test_support {

/// Coins held by a state, read off its name: NB(v) and NS(v) hold v,
/// bankrupts hold 0, FINAL/CONV have no coin value.
inline std::optional<std::uint64_t> coin_value(const flockpp::Protocol& p, flockpp::StateId q) {
    const std::string& name = p.state_name(q);
    if (name.rfind("NB(", 0) == 0 || name.rfind("NS(", 0) == 0)
        return std::stoull(name.substr(3, name.size() - 4));
    if (name == "B" || name.rfind("B(", 0) == 0) return 0;
    return std::nullopt;
}

/// One documented single-entry corruption of a constructed protocol. The
/// symmetric table is patched on the unordered pair {a, b}.
struct Mutation {
    std::string description;
    flockpp::Family family;
    std::string a, b;
    /// Outcome for the ordered pair (a, b); empty means identity.
    std::string out_a, out_b;

    flockpp::Protocol apply(std::uint64_t d) const {
        flockpp::Protocol p = flockpp::build(family, d);
        const auto qa = p.state(a);
        const auto qb = p.state(b);
        const auto oa = out_a.empty() ? qa : p.state(out_a);
        const auto ob = out_b.empty() ? qb : p.state(out_b);
        p.set_symmetric(qa, qb, {oa, ob});
        p.set_name(p.name() + " mutated: " + description);
        return p;
    }
};

/// Mutations of the d = 7 constructions, each expected to break a check.
inline std::vector<Mutation> d7_mutations() {
    using flockpp::Family;
    return {
        {"unequal piles finalize", Family::A, "NB(2)", "NB(4)", "FINAL", "FINAL"},
        {"single coins finalize", Family::A, "NB(1)", "NB(1)", "FINAL", "FINAL"},
        {"top piles never finalize", Family::A, "NB(4)", "NB(4)", "", ""},
        {"last bankrupt step resets", Family::A, "B(2)", "NB(1)", "B(0)", "NB(1)"},
        {"no coin out of nowhere", Family::B, "NB(2)", "NB(2)", "NB(4)", "B"},
        {"two coins out of nowhere", Family::B, "NB(2)", "NB(2)", "NB(4)", "NB(2)"},
        {"final does not convert bankrupts", Family::B, "FINAL", "B", "", ""},
    };
}

}  // namespace test_support
