#pragma once

#include <string>

#include "flockpp/core.hpp"
#include "json.hpp"

namespace flockpp {

/// Protocol <-> JSON:
///   { "name", "deterministic", "states": [..], "q_init", "q1": [..],
///     "delta": [ [a, b, [[c, d], ...]], ... ] }
/// Only non-identity entries are written; omitted pairs read back as identity.
nlohmann::json protocol_to_json(const Protocol& p);

/// Throws ProtocolError on malformed input. The result is validated.
Protocol protocol_from_json(const nlohmann::json& j);

std::string serialize_protocol(const Protocol& p, int indent = 2);
Protocol parse_protocol(const std::string& text);

}  // namespace flockpp
