#include "flockpp/protocols.hpp"

#include <bit>

namespace flockpp {

namespace {

constexpr std::uint64_t pow2(int i) { return std::uint64_t{1} << i; }

std::string nb(std::uint64_t coins) { return "NB(" + std::to_string(coins) + ")"; }
std::string ns(std::uint64_t coins) { return "NS(" + std::to_string(coins) + ")"; }
std::string bankrupt(int counter) { return "B(" + std::to_string(counter) + ")"; }
std::string coins(std::uint64_t c) { return "COINS(" + std::to_string(c) + ")"; }

std::vector<int> set_bits_descending(std::uint64_t x) {
    std::vector<int> out;
    for (int i = 63; i >= 0; --i)
        if (x & pow2(i)) out.push_back(i);
    return out;
}

std::string label(Family f, std::uint64_t d) {
    return std::string(family_name(f)) + "(d=" + std::to_string(d) + ")";
}

// d = 1 always holds on positive populations: one accepting state, no moves.
Protocol trivial(Family f, std::string state) {
    Protocol p(label(f, 1), {std::move(state)}, StateId{0}, {StateId{0}});
    p.set_threshold(1);
    return p;
}

void require_threshold(std::uint64_t d) {
    if (d == 0) throw InvalidThreshold("threshold must be positive");
    if (d > pow2(62)) throw InvalidThreshold("threshold too large");
}

// Prefix sums 2^{b_1} + ... + 2^{b_m} of the correction a, indexed by m - 1.
std::vector<std::uint64_t> correction_prefixes(const std::vector<int>& b_list) {
    std::vector<std::uint64_t> out;
    std::uint64_t sum = 0;
    for (int b : b_list) out.push_back(sum += pow2(b));
    return out;
}

void require_b(std::uint64_t d) {
    require_threshold(d);
    if (d < 3 || (d & (d - 1)) == 0)
        throw InvalidThreshold("protocol b needs d >= 3 and d not a power of two (got " +
                               std::to_string(d) + ")");
}

void require_pow2(std::uint64_t d) {
    require_threshold(d);
    if ((d & (d - 1)) != 0)
        throw InvalidThreshold("pow2 protocol needs d to be a power of two (got " +
                               std::to_string(d) + ")");
}

}  // namespace

ThresholdParams params(std::uint64_t d) {
    require_threshold(d);
    ThresholdParams tp;
    tp.d = d;
    tp.i_list = set_bits_descending(d);
    tp.e = static_cast<int>(tp.i_list.size());
    if (d >= 2) {
        const int k = std::bit_width(d - 1) - 1;
        tp.k = k;
        tp.a = pow2(k + 1) - d;
        tp.b_list = set_bits_descending(*tp.a);
        tp.z = static_cast<int>(tp.b_list->size());
    }
    return tp;
}

std::string_view family_name(Family f) noexcept {
    switch (f) {
        case Family::Angluin: return "angluin";
        case Family::A: return "a";
        case Family::B: return "b";
        case Family::Pow2: return "pow2";
        case Family::Best: return "best";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::Angluin, Family::A, Family::B, Family::Pow2, Family::Best})
        if (family_name(f) == name) return f;
    throw std::invalid_argument("unknown protocol family '" + std::string(name) +
                                "' (expected angluin, a, b, pow2 or best)");
}

bool family_applicable(Family f, std::uint64_t d) noexcept {
    if (d == 0 || d > pow2(62)) return false;
    const bool power = (d & (d - 1)) == 0;
    switch (f) {
        case Family::B: return d >= 3 && !power;
        case Family::Pow2: return power;
        default: return true;
    }
}

std::vector<std::string> family_state_names(Family f, std::uint64_t d) {
    require_threshold(d);
    const ThresholdParams tp = params(d);
    std::vector<std::string> names;
    switch (f) {
        case Family::Angluin:
            if (d == 1) return {"CONV"};
            for (std::uint64_t c = 0; c < d; ++c) names.push_back(coins(c));
            names.push_back("CONV");
            return names;
        case Family::A:
            if (d == 1) return {"FINAL"};
            for (int i = 0; i <= tp.i_list.front(); ++i) names.push_back(nb(pow2(i)));
            for (int c = 0; c < tp.e; ++c) names.push_back(bankrupt(c));
            names.push_back("FINAL");
            return names;
        case Family::B: {
            require_b(d);
            for (int i = 0; i <= *tp.k; ++i) names.push_back(nb(pow2(i)));
            const auto prefixes = correction_prefixes(*tp.b_list);
            for (std::size_t m = 1; m < prefixes.size(); ++m) names.push_back(ns(prefixes[m]));
            names.push_back("B");
            names.push_back("FINAL");
            return names;
        }
        case Family::Pow2: {
            require_pow2(d);
            if (d == 1) return {"FINAL"};
            const int m = std::countr_zero(d);
            for (int i = 0; i < m; ++i) names.push_back(nb(pow2(i)));
            names.push_back("B");
            names.push_back("FINAL");
            return names;
        }
        case Family::Best: return family_state_names(best_family(d), d);
    }
    return names;
}

std::size_t family_state_count(Family f, std::uint64_t d) {
    return family_state_names(f, d).size();
}

Family best_family(std::uint64_t d) {
    require_threshold(d);
    // Candidates in tie-break order.
    Family best = Family::A;
    std::size_t best_count = family_state_count(Family::A, d);
    for (Family f : {Family::Pow2, Family::B}) {
        if (!family_applicable(f, d)) continue;
        const std::size_t count = family_state_count(f, d);
        if (count <= best_count) {
            best = f;
            best_count = count;
        }
    }
    return best;
}

Protocol build_angluin(std::uint64_t d) {
    require_threshold(d);
    if (d == 1) return trivial(Family::Angluin, "CONV");
    if (d >= 65535) throw InvalidThreshold("angluin protocol supports d < 65535");
    Protocol p(label(Family::Angluin, d), family_state_names(Family::Angluin, d), StateId{1},
               {StateId{static_cast<std::uint16_t>(d)}});
    const StateId conv{static_cast<std::uint16_t>(d)};
    auto holding = [](std::uint64_t c) { return StateId{static_cast<std::uint16_t>(c)}; };
    for (std::uint64_t x = 0; x < d; ++x) {
        for (std::uint64_t y = 0; y < d; ++y) {
            // The richer agent collects; on equal holdings the initiator does.
            if (x + y >= d)
                p.set_transition(holding(x), holding(y), {{conv, conv}});
            else if (x >= y)
                p.set_transition(holding(x), holding(y), {{holding(x + y), holding(0)}});
            else
                p.set_transition(holding(x), holding(y), {{holding(0), holding(x + y)}});
        }
    }
    for (std::uint16_t q = 0; q <= d; ++q) p.set_symmetric(conv, StateId{q}, {conv, conv});
    p.set_threshold(d);
    return p;
}

Protocol build_protocol_a(std::uint64_t d) {
    require_threshold(d);
    if (d == 1) return trivial(Family::A, "FINAL");
    const ThresholdParams tp = params(d);
    const int top = tp.i_list.front();
    const int e = tp.e;
    // 1-based view of i_1 > ... > i_e.
    auto ith = [&](int j) { return tp.i_list[static_cast<std::size_t>(j - 1)]; };

    auto names = family_state_names(Family::A, d);
    const auto final_state = StateId{static_cast<std::uint16_t>(names.size() - 1)};
    Protocol p(label(Family::A, d), std::move(names), StateId{0}, {final_state});
    auto rich = [](int i) { return StateId{static_cast<std::uint16_t>(i)}; };
    auto broke = [top](int c) { return StateId{static_cast<std::uint16_t>(top + 1 + c)}; };

    for (int i = 0; i <= top; ++i) {
        if (i == top)
            p.set_symmetric(rich(i), rich(i), {final_state, final_state});
        else
            p.set_symmetric(rich(i), rich(i), {rich(i + 1), broke(0)});
    }

    for (int c = 0; c < e; ++c) {
        for (int i = 0; i <= top; ++i) {
            StateId next;
            if (c < e - 1 && i == ith(c + 1))
                next = broke(c + 1);
            else if (c == e - 1 && i == ith(e))
                next = final_state;
            else if (c > 0 && ith(c) > i && i > ith(c + 1))
                next = final_state;
            else
                next = broke(0);
            p.set_symmetric(broke(c), rich(i), {next, rich(i)});
        }
    }

    for (std::uint16_t q = 0; q < p.num_states(); ++q)
        p.set_symmetric(final_state, StateId{q}, {final_state, final_state});
    p.set_threshold(d);
    return p;
}

Protocol build_protocol_b(std::uint64_t d) {
    require_b(d);
    const ThresholdParams tp = params(d);
    const int k = *tp.k;
    const auto& b_list = *tp.b_list;
    const int z = *tp.z;

    auto names = family_state_names(Family::B, d);
    const auto final_state = StateId{static_cast<std::uint16_t>(names.size() - 1)};
    const auto broke = StateId{static_cast<std::uint16_t>(names.size() - 2)};
    Protocol p(label(Family::B, d), std::move(names), StateId{0}, {final_state});
    auto rich = [](int i) { return StateId{static_cast<std::uint16_t>(i)}; };
    // Agent holding the first m summands of a: standard for m == 1.
    auto partial = [&](int m) {
        if (m == 1) return rich(b_list.front());
        return StateId{static_cast<std::uint16_t>(k + 1 + (m - 2))};
    };

    for (int i = 0; i < k - 1; ++i) p.set_symmetric(rich(i), rich(i), {rich(i + 1), broke});
    p.set_symmetric(rich(k - 1), rich(k - 1), {rich(k), partial(z)});
    p.set_symmetric(rich(k), rich(k), {final_state, final_state});
    for (int m = 2; m <= z; ++m)
        p.set_symmetric(partial(m), broke,
                        {partial(m - 1), rich(b_list[static_cast<std::size_t>(m - 1)])});

    for (std::uint16_t q = 0; q < p.num_states(); ++q)
        p.set_symmetric(final_state, StateId{q}, {final_state, final_state});
    p.set_threshold(d);
    return p;
}

Protocol build_power_of_two(std::uint64_t d) {
    require_pow2(d);
    if (d == 1) return trivial(Family::Pow2, "FINAL");
    const int m = std::countr_zero(d);
    auto names = family_state_names(Family::Pow2, d);
    const auto final_state = StateId{static_cast<std::uint16_t>(names.size() - 1)};
    const auto broke = StateId{static_cast<std::uint16_t>(names.size() - 2)};
    Protocol p(label(Family::Pow2, d), std::move(names), StateId{0}, {final_state});
    auto rich = [](int i) { return StateId{static_cast<std::uint16_t>(i)}; };

    for (int i = 0; i < m - 1; ++i) p.set_symmetric(rich(i), rich(i), {rich(i + 1), broke});
    p.set_symmetric(rich(m - 1), rich(m - 1), {final_state, final_state});
    for (std::uint16_t q = 0; q < p.num_states(); ++q)
        p.set_symmetric(final_state, StateId{q}, {final_state, final_state});
    p.set_threshold(d);
    return p;
}

Protocol build_best(std::uint64_t d) { return build(best_family(d), d); }

Protocol build(Family f, std::uint64_t d) {
    switch (f) {
        case Family::Angluin: return build_angluin(d);
        case Family::A: return build_protocol_a(d);
        case Family::B: return build_protocol_b(d);
        case Family::Pow2: return build_power_of_two(d);
        case Family::Best: return build_best(d);
    }
    throw std::invalid_argument("unknown family");
}

}  // namespace flockpp
