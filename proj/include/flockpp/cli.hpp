#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flockpp/verify.hpp"

namespace flockpp::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kCapExceeded = 3,
};

/// Parsed command line; fields unused by a subcommand keep their defaults.
struct CommandConfig {
    std::string subcommand;
    std::string family = "best";
    std::uint64_t d = 0;
    std::optional<std::size_t> n_lo;
    std::optional<std::size_t> n_hi;
    std::size_t n = 0;
    std::optional<std::size_t> n_cap;
    std::uint64_t d_lo = 1;
    std::uint64_t d_hi = 1;
    std::size_t node_cap = kDefaultNodeCap;
    std::uint64_t seed = 0;
    std::size_t steps = 100'000;
    bool trace = false;
    std::string input_path;
    std::string out_path;
    std::string json_path;
    std::string csv_path;
};

/// Node cap from FLOCKPP_NODE_CAP, else the library default.
std::size_t node_cap_from_env();

/// Entry point behind the flockpp binary. args excludes the program name.
/// Errors are reported on `err` as one JSON object per line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses and validates a protocol file, verifies it for threshold d on
/// [n_lo, n_hi] and checks the state lower bound.
int check_file(const std::string& path, std::uint64_t d, std::size_t n_lo, std::size_t n_hi,
               const VerifyOptions& opts, const std::string& json_path, std::ostream& out,
               std::ostream& err);

}  // namespace flockpp::cli
