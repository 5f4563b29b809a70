#pragma once
// Durable-fact layer: claims with provenance, supersession links, entities,
// relationships, and conclusions. Nothing here decays and nothing is ever
// deleted — a claim is retired only by recording a supersession link, and
// the superseded claim stays fully readable for historical queries.
//
// Mutating operations follow the shared commit discipline: validate against
// the projection, serialize one event record, append it to the sink, then
// apply the parsed record through the same code path replay uses.

#include "stratum/chrono.hpp"
#include "stratum/hooks.hpp"
#include "stratum/record.hpp"
#include "stratum/retrieval.hpp"
#include "stratum/storage.hpp"

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace stratum {

enum class SourceKind {
    document,
    conversation,
    agent,
    human,
};

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from(std::string_view name);

// Who said it, when, based on what evidence.
struct Provenance {
    std::string source_id; // non-empty
    SourceKind source_kind = SourceKind::document;
    std::optional<std::string> author;
    Timestamp asserted_at;
    std::optional<std::string> evidence_note;
};

enum class ClaimStatus {
    current,
    superseded,
};

struct Claim {
    std::string id;
    std::string statement;
    std::vector<std::string> entity_refs;
    Provenance provenance;
    BitemporalStamp stamp;
    std::optional<double> confidence; // stored metadata; never propagated
    ClaimStatus status = ClaimStatus::current;
};

// Directed old → new. Links are append-only and the graph stays acyclic.
struct SupersessionLink {
    std::string old_id;
    std::string new_id;
    std::string reason;
    Timestamp recorded_at;
};

struct Entity {
    std::string id;
    std::string name;
    std::string kind;
    std::vector<std::string> aliases;
};

struct Relationship {
    std::string id;
    std::string src;
    std::string dst;
    std::string label;
    Provenance provenance;
    BitemporalStamp stamp;
};

struct Conclusion {
    std::string id;
    std::string statement;
    std::vector<std::string> supporting_claims; // non-empty, all must exist
    Provenance provenance;
    ClaimStatus status = ClaimStatus::current;
};

// Optional conjunctive filter for current_claims.
struct ClaimFilter {
    std::optional<std::string> entity_ref;   // claim must reference this entity
    std::optional<std::string> text_contains; // ASCII case-insensitive substring
};

struct KnowledgeSearchOptions {
    bool include_superseded = false;
    FusionConfig fusion; // used when more than one ranked list is in play
};

struct KnowledgeHit {
    std::string id;
    std::string statement;
    double score = 0.0;
    bool is_conclusion = false;
    bool superseded = false;    // the hit itself is superseded
    bool stale_support = false; // conclusion citing at least one superseded claim
    std::vector<std::string> contributing; // ranked lists that surfaced it
};

// One step of a supersession history walk. `link` connects this claim to
// its successor in the walk; null for the claim the walk started from.
struct ChainHop {
    const Claim* claim = nullptr;
    const SupersessionLink* link = nullptr;
};

class KnowledgeStore {
public:
    KnowledgeStore(Clock& clock, EventSink& sink) : clock_(clock), sink_(sink) {}

    std::string ingest_claim(const std::string& statement, const Provenance& provenance,
                             const std::vector<std::string>& entity_refs = {},
                             std::optional<Timestamp> valid_from = std::nullopt,
                             std::optional<double> confidence = std::nullopt);
    std::string add_entity(const std::string& name, const std::string& kind,
                           const std::vector<std::string>& aliases = {});
    std::string add_relationship(const std::string& src, const std::string& dst,
                                 const std::string& label, const Provenance& provenance);
    SupersessionLink supersede(const std::string& old_id, const std::string& new_id,
                               const std::string& reason);
    std::string record_conclusion(const std::string& statement,
                                  const std::vector<std::string>& supporting_claims,
                                  const Provenance& provenance);
    SupersessionLink supersede_conclusion(const std::string& old_id,
                                          const std::string& new_id,
                                          const std::string& reason);

    const Claim& get_claim(const std::string& id) const;
    const Entity& get_entity(const std::string& id) const;
    const Conclusion& get_conclusion(const std::string& id) const;
    bool has_claim(const std::string& id) const;

    // Claims with status=current matching the filter, ordered by
    // (system_created, id).
    std::vector<const Claim*> current_claims(const ClaimFilter& filter = {}) const;
    std::vector<const Conclusion*> current_conclusions() const;

    // Supersession predecessors, transitively, newest first; the head is
    // the queried claim. Multiple predecessors order by (recorded_at, id).
    std::vector<ChainHop> provenance_chain(const std::string& claim_id) const;

    std::vector<KnowledgeHit> search(std::string_view query, int k,
                                     const KnowledgeSearchOptions& options,
                                     const HookSet& hooks) const;

    const std::vector<Claim>& claims() const { return claims_; }
    const std::vector<SupersessionLink>& links() const { return links_; }
    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<Relationship>& relationships() const { return relationships_; }
    const std::vector<Conclusion>& conclusions() const { return conclusions_; }
    const std::vector<SupersessionLink>& conclusion_links() const {
        return conclusion_links_;
    }

    // Replay entry point; the only code that mutates the projection.
    void apply(const Record& event);

    // Canonical rows, one per line, fixed order. Input to the state hash.
    void serialize_state(std::string& out) const;
    // Rebuild one projection row from a snapshot; inverse of serialize_state.
    void restore_row(const Record& row);

private:
    std::string next_claim_id() const;
    std::string next_entity_id() const;
    std::string next_relationship_id() const;
    std::string next_conclusion_id() const;
    std::uint64_t commit(const std::string& body);

    Clock& clock_;
    EventSink& sink_;

    std::vector<Claim> claims_; // insertion order == id order
    std::unordered_map<std::string, std::size_t> claim_index_;
    std::vector<SupersessionLink> links_;
    std::vector<Entity> entities_;
    std::unordered_map<std::string, std::size_t> entity_index_;
    std::vector<Relationship> relationships_;
    std::vector<Conclusion> conclusions_;
    std::unordered_map<std::string, std::size_t> conclusion_index_;
    std::vector<SupersessionLink> conclusion_links_;
};

// Provenance field group shared by several event kinds.
void write_provenance(RecordWriter& w, const Provenance& p);
Provenance read_provenance(const Record& r);

} // namespace stratum
