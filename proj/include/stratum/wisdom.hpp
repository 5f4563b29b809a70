#pragma once
// Behavioral-directive layer: evidence-gated tier revision over an
// append-only revision history. No decay — a directive's standing never
// drifts with the clock; it moves only when structured evidence crosses a
// threshold or an explicit adjudication lands.
//
// Tier ladder: prediction → core (distinct-session evidence) → anchor
// (surviving consolidation cycles). One step per review, never while
// contradicted, never while under review. A contradiction freezes the
// entry into under_review; a human or agent then retires it or dismisses
// the contradiction with a note, which reinstates the entry and clears the
// standing count (the revision log keeps the full record).

#include "stratum/chrono.hpp"
#include "stratum/config.hpp"
#include "stratum/knowledge.hpp" // Provenance
#include "stratum/record.hpp"
#include "stratum/storage.hpp"

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace stratum {

enum class WisdomTier {
    prediction,
    core,
    anchor,
};

enum class WisdomStatus {
    active,
    under_review,
    retired,
};

// proposed..replaced are the domain changes; held (review that changed
// nothing) and reinstated (contradiction dismissed with a note) complete
// the audit trail.
enum class RevisionChange {
    proposed,
    corroborated,
    contradicted,
    promoted,
    demoted,
    retired,
    replaced,
    held,
    reinstated,
};

std::string_view to_string(WisdomTier tier);
WisdomTier wisdom_tier_from(std::string_view name);
std::string_view to_string(WisdomStatus status);
std::string_view to_string(RevisionChange change);
RevisionChange revision_change_from(std::string_view name);

struct EvidenceLedger {
    std::set<std::string> episode_refs;
    std::set<std::string> session_ids;
    int contradiction_count = 0;
    int cycles_survived = 0;
};

// Ledger shape at the moment a revision was recorded.
struct EvidenceSnapshot {
    int episodes = 0;
    int sessions = 0;
    int contradictions = 0;
    int cycles = 0;
};

struct RevisionRecord {
    Timestamp at;
    RevisionChange change = RevisionChange::proposed;
    std::string detail;
    EvidenceSnapshot evidence;
};

struct WisdomEntry {
    std::string id;
    std::string directive;
    WisdomTier tier = WisdomTier::prediction;
    WisdomStatus status = WisdomStatus::active;
    EvidenceLedger evidence;
    Provenance provenance;
    Timestamp created_at;
    std::vector<RevisionRecord> revision_log;
    std::optional<std::string> replacement_id; // set when retired with successor
    // Contradiction count at the last consolidation cycle; a cycle is
    // "survived" when the count has not moved since.
    int contradictions_at_last_cycle = 0;
};

struct ReviewDecision {
    std::string entry_id;
    WisdomTier before = WisdomTier::prediction;
    WisdomTier after = WisdomTier::prediction;
    bool promoted = false;
    std::string rationale;
};

class WisdomStore {
public:
    WisdomStore(Clock& clock, EventSink& sink) : clock_(clock), sink_(sink) {}

    std::string propose(const std::string& directive, const std::string& episode_ref,
                        const std::string& session_id, const Provenance& provenance);
    void corroborate(const std::string& entry_id, const std::string& episode_ref,
                     const std::string& session_id);
    void contradict(const std::string& entry_id, const std::string& episode_ref,
                    const std::string& detail);
    ReviewDecision review(const std::string& entry_id, const GateConfig& gate);
    void retire(const std::string& entry_id, std::optional<std::string> replacement,
                const std::string& reason);
    // Dismiss the standing contradiction(s) with a note: status returns to
    // active, contradiction_count clears, cycles stay at zero (re-earned).
    void resolve_review(const std::string& entry_id, const std::string& note);

    // One consolidation cycle passed: every active entry whose
    // contradiction count did not move survives (+1 cycle); every
    // non-retired entry's baseline advances.
    void advance_cycle();

    // Active entries, ordered (anchor, core, prediction; then created_at,
    // id). context filters on provenance.source_id.
    std::vector<const WisdomEntry*> active_directives(
        std::optional<std::string> context = std::nullopt) const;
    std::vector<const WisdomEntry*> review_queue() const;

    const WisdomEntry& get_entry(const std::string& id) const;
    const std::vector<WisdomEntry>& entries() const { return entries_; }

    void apply(const Record& event);
    void serialize_state(std::string& out) const;
    void restore_row(const Record& row);

private:
    WisdomEntry& mutable_entry(const std::string& id);
    std::uint64_t commit(const std::string& body);

    Clock& clock_;
    EventSink& sink_;

    std::vector<WisdomEntry> entries_;
    std::unordered_map<std::string, std::size_t> entry_index_;
};

// The promotion predicate, exactly: prediction needs >= core_min_sessions
// distinct sessions; core needs >= anchor_min_cycles survived cycles; both
// need a clean contradiction slate; anchors have nowhere further to go;
// under-review and retired entries never move.
std::optional<WisdomTier> promotion_target(WisdomTier tier, WisdomStatus status,
                                           const EvidenceLedger& evidence,
                                           const GateConfig& gate);

} // namespace stratum
