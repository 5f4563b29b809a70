#pragma once
// Offline consolidation: sweep decayed memories, detect recurring patterns
// across sessions, promote them into wisdom proposals with full episode
// provenance, advance survival counters, and review every active directive.
// Never scheduled internally — one explicit call runs exactly one cycle.

#include "stratum/config.hpp"
#include "stratum/engine.hpp"
#include "stratum/hooks.hpp"
#include "stratum/wisdom.hpp"

#include <set>
#include <string>
#include <vector>

namespace stratum {

struct PatternCandidate {
    enum class Basis { lexical_overlap, embedding };

    // Lexically most central member (max summed similarity to the rest).
    std::string representative_content;
    std::vector<std::string> member_ids; // ascending ids, |…| ≥ min_occurrences
    std::set<std::string> distinct_sessions; // spans ≥ min_sessions
    Basis similarity_basis = Basis::lexical_overlap;
    // Canonical dedup key: sorted unique token set of the representative.
    std::string pattern_key;
};

struct CycleReport {
    std::uint64_t cycle_number = 0;
    std::size_t archived = 0;
    std::vector<PatternCandidate> candidates;
    std::vector<std::string> promoted; // proposed wisdom entry ids
    std::vector<ReviewDecision> wisdom_reviews;
};

// Cluster non-archived facts by token-set Jaccard similarity ≥ threshold
// (embedding cosine instead when an embedder hook is present): connected
// components, kept when they meet both the occurrence and session-span
// minima. Pure — deterministic given the snapshot order.
std::vector<PatternCandidate> detect_patterns(const MemoryStore& memory,
                                              const DreamConfig& config,
                                              const HookSet& hooks);

// One full cycle, in order: sweep → detect → propose/corroborate new
// patterns (consolidated event each) → advance survival counters → review
// all active entries → reinforce members of newly promoted patterns →
// close with a cycle event. Already-consolidated patterns are recognized
// and skipped, so reruns at a fixed state promote nothing new.
CycleReport run_cycle(Engine& engine);

// The report in the same line-oriented record format the stores log.
std::string format_report(const CycleReport& report);

} // namespace stratum
