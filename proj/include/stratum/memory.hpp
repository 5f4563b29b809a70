#pragma once
// Experiential layer: append-only observations inside scoped contexts,
// bi-temporal visibility, query-time decay, and prospective memory.
//
// Decay is storage-level policy, applied at query time: nothing here runs
// timers or background jobs, and all time enters through the injected
// clock. A fact fades by losing retrievability, not by losing its data —
// sweep archives it out of recall, the log keeps it forever.

#include "stratum/chrono.hpp"
#include "stratum/hooks.hpp"
#include "stratum/record.hpp"
#include "stratum/retrieval.hpp"
#include "stratum/storage.hpp"

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace stratum {

struct Context {
    std::string id;
    std::string name;
};

struct MemoryFact {
    std::string id;
    std::string content;
    std::string context_id;
    std::optional<std::string> session_id; // which working session reported it
    BitemporalStamp stamp;
    double initial_strength = 1.0;
    Millis base_half_life = 7 * kMillisPerDay;
    Timestamp last_reinforced;
    int reinforcement_count = 0;
    bool archived = false;
};

enum class TriggerKind {
    time_based,
    event_based,
};

enum class IntentionStatus {
    pending,
    surfaced,
    completed,
    expired,
};

std::string_view to_string(IntentionStatus status);
IntentionStatus intention_status_from(std::string_view name);

struct Intention {
    std::string id;
    std::string description;
    std::string context_id;
    TriggerKind trigger = TriggerKind::time_based;
    std::optional<Timestamp> due_at;    // time_based
    std::optional<std::string> tag;     // event_based
    IntentionStatus status = IntentionStatus::pending;
    std::optional<Timestamp> surfaced_at; // set iff surfaced or completed
};

struct RecallOptions {
    // Reconstruct the candidate set as of (system_time, valid_time);
    // default is (now, now).
    std::optional<std::pair<Timestamp, Timestamp>> as_of;
    // Reach archived facts and ignore the retention floor.
    bool include_archived = false;
    FusionConfig fusion;
};

struct RecalledFact {
    std::string id;
    std::string content;
    double score = 0.0;      // relevance * retention
    double relevance = 0.0;
    double retention = 0.0;
};

class MemoryStore {
public:
    MemoryStore(Clock& clock, EventSink& sink, DecayParams decay)
        : clock_(clock), sink_(sink), decay_(decay) {
        decay_.validate();
    }

    std::string create_context(const std::string& name);
    // decay_override replaces (initial_strength, base half-life) for this
    // fact only; growth, cap, and the recall floor stay store-wide policy.
    std::string observe(const std::string& content, const std::string& context_id,
                        std::optional<Timestamp> valid_from = std::nullopt,
                        std::optional<std::string> session_id = std::nullopt,
                        std::optional<DecayParams> decay_override = std::nullopt);
    double reinforce(const std::string& memory_id);
    void invalidate(const std::string& memory_id, Timestamp valid_until,
                    const std::string& reason);
    std::vector<std::string> sweep(std::optional<std::string> context_id = std::nullopt);

    std::vector<RecalledFact> recall(std::string_view query,
                                     const std::string& context_id, int k,
                                     const RecallOptions& options,
                                     const HookSet& hooks) const;

    // Current retained strength in [0, s0]; archived facts still answer.
    double retrievability(const std::string& memory_id, Timestamp now) const;
    Millis effective_half_life(const MemoryFact& fact) const;

    std::string schedule_intention(const std::string& description, TriggerKind trigger,
                                   std::optional<Timestamp> due_at,
                                   std::optional<std::string> tag,
                                   const std::string& context_id);
    std::vector<const Intention*> list_due(Timestamp now) const;
    std::optional<Timestamp> next_due_time() const;
    void mark_surfaced(const std::string& intention_id);
    void mark_completed(const std::string& intention_id);
    std::vector<const Intention*> trigger_event(const std::string& tag);

    // Marks a recurring pattern as consolidated so later cycles skip it.
    void record_consolidation(const std::string& pattern_key,
                              const std::vector<std::string>& member_ids,
                              const std::string& summary);
    bool is_consolidated(const std::string& pattern_key) const {
        return consolidated_keys_.count(pattern_key) != 0;
    }

    const MemoryFact& get_fact(const std::string& id) const;
    const Intention& get_intention(const std::string& id) const;
    const Context& get_context(const std::string& id) const;
    bool has_context(const std::string& id) const {
        return context_index_.find(id) != context_index_.end();
    }

    const std::vector<Context>& contexts() const { return contexts_; }
    const std::vector<MemoryFact>& facts() const { return facts_; }
    const std::vector<Intention>& intentions() const { return intentions_; }
    const std::set<std::string>& consolidated_keys() const { return consolidated_keys_; }
    const DecayParams& decay() const { return decay_; }

    void apply(const Record& event);
    void serialize_state(std::string& out) const;
    void restore_row(const Record& row);

private:
    std::uint64_t commit(const std::string& body);

    Clock& clock_;
    EventSink& sink_;
    DecayParams decay_;

    std::vector<Context> contexts_;
    std::unordered_map<std::string, std::size_t> context_index_;
    std::vector<MemoryFact> facts_;
    std::unordered_map<std::string, std::size_t> fact_index_;
    std::vector<Intention> intentions_;
    std::unordered_map<std::string, std::size_t> intention_index_;
    std::set<std::string> consolidated_keys_;
};

} // namespace stratum
