#pragma once
// Desk-scale routing experiment: a seeded synthetic corpus with
// contradiction chains and temporal event sequences, evaluated under three
// conditions — typed stores with ground-truth labels, typed stores behind
// the keyword router, and a single flat lexical store as control. Scoring
// is a deterministic case-insensitive substring check; the statistics are
// an exact McNemar test and a percentile bootstrap. No model calls, no
// network, no nondeterminism beyond the seeds in the report.

#include "stratum/chrono.hpp"
#include "stratum/router.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stratum {

enum class BenchCategory {
    contradiction_resolution,
    temporal_reasoning,
};

std::string_view to_string(BenchCategory category);

struct BenchTurn {
    enum class Kind { claim, observation };
    Kind kind = Kind::claim;
    std::string text;
    Timestamp at;
    // Index (within the conversation's turn list) of the claim this one
    // supersedes; -1 for none.
    int supersedes = -1;
};

struct BenchConversation {
    std::string id;
    std::vector<BenchTurn> turns; // timeline order
};

struct BenchCase {
    std::string conversation_id;
    std::vector<BenchTurn> turns; // the turns that make the case answerable
    std::string question;
    BenchCategory category = BenchCategory::contradiction_resolution;
    LayerLabel oracle_label = LayerLabel::knowledge;
    std::string gold_answer;
    // Question deliberately phrased with a routing-marker word, so the
    // keyword heuristic misfiles it while the oracle label does not.
    bool heuristic_trap = false;
};

struct BenchCorpus {
    std::vector<BenchConversation> conversations;
    std::vector<BenchCase> cases;
    Timestamp query_time; // clock position for every evaluation query
};

struct CorpusParams {
    std::uint64_t seed = 42;
    int n_conversations = 20;
    int questions_per = 4; // even: half contradiction, half temporal
    int events_per_sequence = 3;
    // Spacing controls decay pressure; defaults keep every fact above the
    // recall floor at query time.
    Millis conversation_spacing = 12 * kMillisPerHour;
    Millis turn_spacing = 25 * 60 * 1000;
    // Every 4th contradiction question is phrased as a heuristic trap.
    int trap_interval = 4;
};

// Fully deterministic from params.seed. Gold answers are generated words
// guaranteed (by construction, and asserted) not to occur as substrings
// of any other corpus word, so the substring scorer cannot false-positive.
BenchCorpus generate_corpus(const CorpusParams& params);

enum class BenchCondition {
    typed_oracle,
    typed_heuristic,
    flat,
};

std::string_view to_string(BenchCondition condition);

struct ConditionOutcome {
    BenchCondition condition = BenchCondition::typed_oracle;
    std::vector<bool> correct; // per case, corpus order
    double overall = 0.0;
    double contradiction = 0.0;
    double temporal = 0.0;
};

// Ingest the corpus into the condition's pipeline and answer every case
// with the top-1 result. Deterministic.
ConditionOutcome run_condition(const BenchCorpus& corpus, BenchCondition condition);

// Two-sided exact binomial test on the discordant counts, success
// probability 1/2: p = min(1, 2·Σ_{i≤min(b,c)} C(n,i)/2^n), n = b+c.
double mcnemar_exact(int b, int c);

// Percentile bootstrap over case-level resampling of the paired accuracy
// difference. Generator: SplitMix64 with the widening-multiply index map
// (constants in the RNG header). Quantiles by nearest rank: k = ceil(p·R),
// 1-based into the sorted resample statistics.
std::pair<double, double> bootstrap_ci(const std::vector<std::pair<bool, bool>>& paired,
                                       int resamples, double level, std::uint64_t seed);

struct BenchReport {
    std::uint64_t seed = 0;
    std::size_t n_cases = 0;          // N per condition
    std::size_t n_contradiction = 0;
    std::size_t n_temporal = 0;
    ConditionOutcome typed_oracle;
    ConditionOutcome typed_heuristic;
    ConditionOutcome flat;
    double delta = 0.0; // typed_oracle overall − flat overall
    int discordant_b = 0; // typed_oracle right, flat wrong
    int discordant_c = 0; // typed_oracle wrong, flat right
    double mcnemar_p = 1.0;
    double ci_level = 0.95;
    int ci_resamples = 10'000;
    std::uint64_t ci_seed = 0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double elapsed_seconds = 0.0;
    // The synthetic-gap disclosure carried into every rendering.
    std::string note;
};

BenchReport run_bench(const CorpusParams& params);

std::string format_bench_report(const BenchReport& report);       // record form
std::string human_bench_report(const BenchReport& report);        // console form

} // namespace stratum
