#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flockpp/core.hpp"

namespace flockpp {

class InvalidThreshold : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Binary bookkeeping for a threshold d.
struct ThresholdParams {
    std::uint64_t d = 1;
    /// Number of 1-bits of d.
    int e = 0;
    /// Exponents of the 1-bits of d, strictly decreasing.
    std::vector<int> i_list;
    // Defined for d >= 2 only.
    /// Largest k with 2^k < d.
    std::optional<int> k;
    /// 2^(k+1) - d; zero when d is a power of two.
    std::optional<std::uint64_t> a;
    /// Exponents of the 1-bits of a, strictly decreasing.
    std::optional<std::vector<int>> b_list;
    /// Number of 0-bits among the k+1 binary digits of d-1 (= popcount(a)).
    std::optional<int> z;

    bool is_power_of_two() const noexcept { return (d & (d - 1)) == 0; }
};

ThresholdParams params(std::uint64_t d);

enum class Family { Angluin, A, B, Pow2, Best };

std::string_view family_name(Family f) noexcept;
/// Accepts angluin | a | b | pow2 | best; throws std::invalid_argument otherwise.
Family parse_family(std::string_view name);
/// Whether the family has a construction for threshold d.
bool family_applicable(Family f, std::uint64_t d) noexcept;

// Each builder throws InvalidThreshold outside its domain (d == 0 always).

/// Coin merging with states COINS(0..d-1) and CONV; d + 1 states.
Protocol build_angluin(std::uint64_t d);
/// Power-of-two coins plus bankrupt counters B(0..e-1); floor(log2 d) + e + 2 states.
Protocol build_protocol_a(std::uint64_t d);
/// Coins "out of nowhere" correction; k + z + 2 states. Needs d >= 3, not a power of two.
Protocol build_protocol_b(std::uint64_t d);
/// Equal-coin merging only; log2 d + 2 states. Needs d a power of two.
Protocol build_power_of_two(std::uint64_t d);
/// Smallest applicable construction among a, b and pow2; ties go to b, then pow2.
Protocol build_best(std::uint64_t d);
Protocol build(Family f, std::uint64_t d);

/// State names a builder would emit, without building the transition table.
std::vector<std::string> family_state_names(Family f, std::uint64_t d);
std::size_t family_state_count(Family f, std::uint64_t d);
/// The family build_best(d) picks.
Family best_family(std::uint64_t d);

}  // namespace flockpp
