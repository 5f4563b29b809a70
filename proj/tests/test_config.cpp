// Configuration parsing, rendering, and validation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stratum/config.hpp"
#include "stratum/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

using namespace stratum;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("stratum-config-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("defaults") {
    EngineConfig c;
    CHECK(c.decay.initial_strength == 1.0);
    CHECK(c.decay.half_life == 7 * kMillisPerDay);
    CHECK(c.decay.reinforcement_growth == 2.0);
    CHECK(c.decay.half_life_cap == 365 * kMillisPerDay);
    CHECK(c.decay.recall_threshold == 0.05);
    CHECK(c.gate.core_min_sessions == 3);
    CHECK(c.gate.anchor_min_cycles == 10);
    CHECK(c.fusion.rrf_constant == 60.0);
    CHECK(c.router.temporal_markers.size() == 6);
    CHECK(c.router.directive_markers.size() == 5);
    CHECK(c.dream.min_occurrences == 3);
    CHECK(c.dream.min_sessions == 3);
    CHECK(c.dream.jaccard_threshold == 0.5);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("format then parse round-trips every field") {
    EngineConfig c;
    c.decay.initial_strength = 0.75;
    c.decay.half_life = days(3.5);
    c.decay.reinforcement_growth = 1.5;
    c.decay.half_life_cap = days(100);
    c.decay.recall_threshold = 0.1;
    c.gate.core_min_sessions = 4;
    c.gate.anchor_min_cycles = 12;
    c.fusion.rrf_constant = 30.0;
    c.router.temporal_markers = {"when", "yesterday"};
    c.router.directive_markers = {"must", "how do i"};
    c.dream.min_occurrences = 2;
    c.dream.min_sessions = 2;
    c.dream.jaccard_threshold = 0.4;

    const std::string text = format_config(c);
    const EngineConfig back = parse_config(text);
    CHECK(back.decay.initial_strength == c.decay.initial_strength);
    CHECK(back.decay.half_life == c.decay.half_life);
    CHECK(back.decay.reinforcement_growth == c.decay.reinforcement_growth);
    CHECK(back.decay.half_life_cap == c.decay.half_life_cap);
    CHECK(back.decay.recall_threshold == c.decay.recall_threshold);
    CHECK(back.gate.core_min_sessions == c.gate.core_min_sessions);
    CHECK(back.gate.anchor_min_cycles == c.gate.anchor_min_cycles);
    CHECK(back.fusion.rrf_constant == c.fusion.rrf_constant);
    CHECK(back.router.temporal_markers == c.router.temporal_markers);
    CHECK(back.router.directive_markers == c.router.directive_markers);
    CHECK(back.dream.min_occurrences == c.dream.min_occurrences);
    CHECK(back.dream.min_sessions == c.dream.min_sessions);
    CHECK(back.dream.jaccard_threshold == c.dream.jaccard_threshold);

    // Rendering is byte-stable: format(parse(format(c))) == format(c).
    CHECK(format_config(back) == text);
}

TEST_CASE("empty text yields defaults") {
    const EngineConfig c = parse_config("");
    CHECK(c.decay.half_life == 7 * kMillisPerDay);
    CHECK(c.gate.core_min_sessions == 3);
}

TEST_CASE("subset keeps defaults for unset keys") {
    const EngineConfig c = parse_config("gate.core_min_sessions = 5\n");
    CHECK(c.gate.core_min_sessions == 5);
    CHECK(c.gate.anchor_min_cycles == 10);
    CHECK(c.decay.half_life == 7 * kMillisPerDay);
    CHECK(c.dream.jaccard_threshold == 0.5);
}

TEST_CASE("comments and blank lines are ignored") {
    const std::string text =
        "# heading comment\n"
        "\n"
        "gate.core_min_sessions = 4   # trailing comment\n"
        "   \n"
        "# gate.anchor_min_cycles = 99\n";
    const EngineConfig c = parse_config(text);
    CHECK(c.gate.core_min_sessions == 4);
    CHECK(c.gate.anchor_min_cycles == 10);
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config("gate.core_min_sesions = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("nonsense = 1\n"), ConfigError);
}

TEST_CASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(
        parse_config("gate.core_min_sessions = 3\ngate.core_min_sessions = 4\n"),
        ConfigError);
}

TEST_CASE("malformed values are rejected") {
    CHECK_THROWS_AS(parse_config("gate.core_min_sessions = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay.recall_threshold = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay.half_life_days\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay.half_life_days = 7 extra\n"), ConfigError);
}

TEST_CASE("values violating invariants are rejected at parse time") {
    CHECK_THROWS_AS(parse_config("gate.core_min_sessions = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay.recall_threshold = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("dream.jaccard_threshold = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("decay.initial_strength = 0\n"), ConfigError);
}

TEST_CASE("marker lists parse comma-separated multi-word entries") {
    const EngineConfig c = parse_config(
        "router.directive_markers = should,how do i,never\n");
    REQUIRE(c.router.directive_markers.size() == 3);
    CHECK(c.router.directive_markers[0] == "should");
    CHECK(c.router.directive_markers[1] == "how do i");
    CHECK(c.router.directive_markers[2] == "never");
}

TEST_CASE("marker validation rejects uppercase and punctuation") {
    RouterLexicon lex;
    lex.temporal_markers = {"When"};
    CHECK_THROWS_AS(lex.validate(), ValidationError);
    lex.temporal_markers = {"be-fore"};
    CHECK_THROWS_AS(lex.validate(), ValidationError);
    lex.temporal_markers = {""};
    CHECK_THROWS_AS(lex.validate(), ValidationError);
    lex.temporal_markers = {"after", "how do i"};
    CHECK_NOTHROW(lex.validate());
}

TEST_CASE("golden rendering of defaults") {
    const std::string text = format_config(EngineConfig{});
    CHECK(text.find("decay.initial_strength = 1\n") != std::string::npos);
    CHECK(text.find("decay.half_life_days = 7\n") != std::string::npos);
    CHECK(text.find("decay.reinforcement_growth = 2\n") != std::string::npos);
    CHECK(text.find("decay.half_life_cap_days = 365\n") != std::string::npos);
    CHECK(text.find("decay.recall_threshold = 0.05\n") != std::string::npos);
    CHECK(text.find("gate.core_min_sessions = 3\n") != std::string::npos);
    CHECK(text.find("gate.anchor_min_cycles = 10\n") != std::string::npos);
    CHECK(text.find("fusion.rrf_constant = 60\n") != std::string::npos);
    CHECK(text.find("router.temporal_markers = when,before,after,first,last,changed\n") !=
          std::string::npos);
    CHECK(text.find("router.directive_markers = should,prefer,always,never,how do i\n") !=
          std::string::npos);
    CHECK(text.find("dream.min_occurrences = 3\n") != std::string::npos);
    CHECK(text.find("dream.min_sessions = 3\n") != std::string::npos);
    CHECK(text.find("dream.jaccard_threshold = 0.5\n") != std::string::npos);

    // Keys appear in the documented fixed order.
    CHECK(text.find("decay.initial_strength") < text.find("gate.core_min_sessions"));
    CHECK(text.find("gate.anchor_min_cycles") < text.find("fusion.rrf_constant"));
    CHECK(text.find("fusion.rrf_constant") < text.find("router.temporal_markers"));
    CHECK(text.find("router.directive_markers") < text.find("dream.min_occurrences"));
}

TEST_CASE("load returns defaults when the file is missing; save round-trips") {
    TempDir tmp;
    const std::string path = (tmp.path / "config").string();
    const EngineConfig missing = load_config_file(path);
    CHECK(missing.gate.core_min_sessions == 3);

    EngineConfig c;
    c.gate.core_min_sessions = 7;
    save_config_file(path, c);
    const EngineConfig back = load_config_file(path);
    CHECK(back.gate.core_min_sessions == 7);
    CHECK(slurp(path) == format_config(c));
}

TEST_CASE("fractional day durations survive the round trip") {
    EngineConfig c;
    c.decay.half_life = days(0.25);
    const EngineConfig back = parse_config(format_config(c));
    CHECK(back.decay.half_life == c.decay.half_life);
}
