#pragma once
// Engine configuration and its on-disk `config` file.
//
// File format, one tunable per line:
//
//     key = value            # comments after '#', blank lines ignored
//
// Keys are dotted lowercase. Lists are comma-separated (elements may
// contain spaces, e.g. "how do i"). Durations are in days. A file may
// set any subset of keys; unset keys keep their defaults. Unknown keys
// and malformed values are ConfigError — a typoed tunable must not
// silently fall back. Write order is fixed (the order below) so the
// file is diffable and byte-stable.
//
//     decay.initial_strength    = 1
//     decay.half_life_days      = 7
//     decay.reinforcement_growth= 2
//     decay.half_life_cap_days  = 365
//     decay.recall_threshold    = 0.05
//     gate.core_min_sessions    = 3
//     gate.anchor_min_cycles    = 10
//     fusion.rrf_constant       = 60
//     router.temporal_markers   = when,before,after,first,last,changed
//     router.directive_markers  = should,prefer,always,never,how do i
//     dream.min_occurrences     = 3
//     dream.min_sessions        = 3
//     dream.jaccard_threshold   = 0.5

#include "stratum/chrono.hpp"
#include "stratum/retrieval.hpp"

#include <string>
#include <vector>

namespace stratum {

// Promotion evidence thresholds. Both counts are minimums and must be >= 1.
struct GateConfig {
    int core_min_sessions = 3;
    int anchor_min_cycles = 10;

    void validate() const {
        if (core_min_sessions < 1) throw ValidationError("core_min_sessions must be >= 1");
        if (anchor_min_cycles < 1) throw ValidationError("anchor_min_cycles must be >= 1");
    }
};

// Pattern-detection thresholds for the consolidation cycle.
struct DreamConfig {
    int min_occurrences = 3;
    int min_sessions = 3;
    double jaccard_threshold = 0.5;

    void validate() const {
        if (min_occurrences < 1) throw ValidationError("min_occurrences must be >= 1");
        if (min_sessions < 1) throw ValidationError("min_sessions must be >= 1");
        if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0))
            throw ValidationError("jaccard_threshold must be in (0,1]");
    }
};

// Keyword rules for the heuristic query router. Rules are data, not code:
// editing the file changes routing without a rebuild.
struct RouterLexicon {
    std::vector<std::string> temporal_markers =
        {"when", "before", "after", "first", "last", "changed"};
    std::vector<std::string> directive_markers =
        {"should", "prefer", "always", "never", "how do i"};

    void validate() const;
};

struct EngineConfig {
    DecayParams decay;
    GateConfig gate;
    FusionConfig fusion;
    RouterLexicon router;
    DreamConfig dream;

    void validate() const;
};

// Parse config-file text. Throws ConfigError on unknown keys, duplicate
// keys, or malformed values; validates the assembled result.
EngineConfig parse_config(const std::string& text);

// Render in the fixed key order above. parse(format(c)) == c.
std::string format_config(const EngineConfig& config);

// File variants. load returns defaults if the file does not exist.
EngineConfig load_config_file(const std::string& path);
void save_config_file(const std::string& path, const EngineConfig& config);

} // namespace stratum
