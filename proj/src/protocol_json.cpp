#include "flockpp/protocol_json.hpp"

#include <set>

namespace flockpp {

using nlohmann::json;

json protocol_to_json(const Protocol& p) {
    json j;
    j["name"] = p.name();
    j["deterministic"] = p.deterministic();
    j["states"] = p.state_names();
    j["q_init"] = p.state_name(p.q_init());
    json q1 = json::array();
    for (StateId q : p.q1_states()) q1.push_back(p.state_name(q));
    j["q1"] = std::move(q1);

    json delta = json::array();
    const auto n = static_cast<std::uint16_t>(p.num_states());
    for (std::uint16_t a = 0; a < n; ++a) {
        for (std::uint16_t b = 0; b < n; ++b) {
            if (p.is_identity(StateId{a}, StateId{b})) continue;
            json outs = json::array();
            for (const StatePair& o : p.delta(StateId{a}, StateId{b}))
                outs.push_back({p.state_name(o.first), p.state_name(o.second)});
            delta.push_back({p.state_name(StateId{a}), p.state_name(StateId{b}), std::move(outs)});
        }
    }
    j["delta"] = std::move(delta);
    return j;
}

namespace {

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ProtocolError(std::string("missing field '") + key + "'");
    return *it;
}

std::string as_string(const json& j, const char* what) {
    if (!j.is_string()) throw ProtocolError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

}  // namespace

Protocol protocol_from_json(const json& j) {
    if (!j.is_object()) throw ProtocolError("protocol must be a JSON object");

    const json& states = require(j, "states");
    if (!states.is_array()) throw ProtocolError("'states' must be an array");
    std::vector<std::string> names;
    for (const auto& s : states) names.push_back(as_string(s, "state name"));
    if (names.empty()) throw ProtocolError("'states' must not be empty");
    if (std::set<std::string>(names.begin(), names.end()).size() != names.size())
        throw ProtocolError("duplicate state name");

    // Resolve names against a scratch protocol before the real one exists.
    auto lookup = [&names](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return StateId{static_cast<std::uint16_t>(i)};
        throw ProtocolError("unknown state '" + name + "'");
    };

    const StateId q_init = lookup(as_string(require(j, "q_init"), "'q_init'"));
    const json& q1_json = require(j, "q1");
    if (!q1_json.is_array()) throw ProtocolError("'q1' must be an array");
    std::vector<StateId> q1;
    for (const auto& s : q1_json) q1.push_back(lookup(as_string(s, "q1 entry")));

    const json& det = require(j, "deterministic");
    if (!det.is_boolean()) throw ProtocolError("'deterministic' must be a boolean");

    Protocol p(as_string(require(j, "name"), "'name'"), names, q_init, q1,
               det.get<bool>());

    const json& delta = require(j, "delta");
    if (!delta.is_array()) throw ProtocolError("'delta' must be an array");
    std::set<std::pair<std::uint16_t, std::uint16_t>> seen;
    for (const auto& entry : delta) {
        if (!entry.is_array() || entry.size() != 3 || !entry[2].is_array())
            throw ProtocolError("delta entries must be [state, state, [[state, state], ...]]");
        const StateId a = lookup(as_string(entry[0], "delta state"));
        const StateId b = lookup(as_string(entry[1], "delta state"));
        if (!seen.emplace(a.index, b.index).second)
            throw ProtocolError("duplicate delta entry for (" + p.state_name(a) + ", " +
                                p.state_name(b) + ")");
        std::vector<StatePair> outs;
        for (const auto& o : entry[2]) {
            if (!o.is_array() || o.size() != 2)
                throw ProtocolError("delta outcomes must be [state, state] pairs");
            outs.push_back({lookup(as_string(o[0], "delta outcome")),
                            lookup(as_string(o[1], "delta outcome"))});
        }
        p.set_transition(a, b, std::move(outs));
    }
    p.validate();
    return p;
}

std::string serialize_protocol(const Protocol& p, int indent) {
    return protocol_to_json(p).dump(indent);
}

Protocol parse_protocol(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("invalid JSON: ") + e.what());
    }
    return protocol_from_json(j);
}

}  // namespace flockpp
