#include "doctest.h"
#include "flockpp/protocol_json.hpp"
#include "flockpp/protocols.hpp"

using namespace flockpp;

TEST_CASE("round trip for every construction up to d = 64") {
    for (std::uint64_t d = 1; d <= 64; ++d) {
        for (Family f : {Family::Angluin, Family::A, Family::B, Family::Pow2, Family::Best}) {
            if (!family_applicable(f, d)) continue;
            const Protocol p = build(f, d);
            CAPTURE(p.name());
            CHECK(parse_protocol(serialize_protocol(p)) == p);
        }
    }
}

TEST_CASE("omitted pairs read back as identity") {
    const Protocol p = parse_protocol(R"({
        "name": "tiny", "deterministic": true,
        "states": ["X", "Y"], "q_init": "X", "q1": ["Y"],
        "delta": [["X", "X", [["Y", "Y"]]]]
    })");
    CHECK(p.num_states() == 2);
    CHECK(p.is_identity(p.state("X"), p.state("Y")));
    CHECK(p.is_identity(p.state("Y"), p.state("Y")));
    CHECK_FALSE(p.is_identity(p.state("X"), p.state("X")));
    CHECK(p.is_q1(p.state("Y")));
}

TEST_CASE("non-deterministic entries survive the round trip") {
    Protocol p("coin", {"H", "T"}, StateId{0}, {StateId{1}}, false);
    p.set_transition(StateId{0}, StateId{0}, {{StateId{1}, StateId{1}}, {StateId{0}, StateId{1}}});
    const Protocol back = parse_protocol(serialize_protocol(p));
    CHECK(back == p);
    CHECK(back.delta(StateId{0}, StateId{0}).size() == 2);
}

TEST_CASE("malformed protocol files are rejected") {
    const char* cases[] = {
        "not json",
        "[]",
        R"({"name": "x", "deterministic": true, "states": [], "q_init": "A", "q1": [], "delta": []})",
        R"({"name": "x", "deterministic": true, "states": ["A", "A"], "q_init": "A", "q1": [], "delta": []})",
        R"({"name": "x", "deterministic": true, "states": ["A"], "q_init": "Z", "q1": [], "delta": []})",
        R"({"name": "x", "deterministic": true, "states": ["A"], "q_init": "A", "q1": ["Z"], "delta": []})",
        R"({"name": "x", "deterministic": true, "states": ["A"], "q_init": "A", "q1": [], "delta": [["A", "A", []]]})",
        R"({"name": "x", "deterministic": true, "states": ["A", "B"], "q_init": "A", "q1": [],
            "delta": [["A", "A", [["A", "B"], ["B", "B"]]]]})",
        R"({"name": "x", "deterministic": true, "states": ["A"], "q_init": "A", "q1": [],
            "delta": [["A", "A", [["A", "A"]]], ["A", "A", [["A", "A"]]]]})",
        R"({"name": "x", "states": ["A"], "q_init": "A", "q1": [], "delta": []})",
        R"({"name": "x", "deterministic": true, "states": ["A"], "q_init": "A", "q1": [], "delta": [["A", "A"]]})",
    };
    for (const char* text : cases) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_protocol(text), ProtocolError);
    }
}
