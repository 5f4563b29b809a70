#include "stratum/wisdom.hpp"

#include <algorithm>
#include <cstdio>

namespace stratum {

namespace {

std::string counter_id(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w-%06zu", n);
    return buf;
}

EvidenceSnapshot snapshot_of(const EvidenceLedger& evidence) {
    return {static_cast<int>(evidence.episode_refs.size()),
            static_cast<int>(evidence.session_ids.size()), evidence.contradiction_count,
            evidence.cycles_survived};
}

int tier_rank(WisdomTier tier) {
    switch (tier) {
        case WisdomTier::anchor: return 2;
        case WisdomTier::core: return 1;
        case WisdomTier::prediction: return 0;
    }
    return 0;
}

} // namespace

std::string_view to_string(WisdomTier tier) {
    switch (tier) {
        case WisdomTier::prediction: return "prediction";
        case WisdomTier::core: return "core";
        case WisdomTier::anchor: return "anchor";
    }
    throw StorageError("invalid wisdom tier value");
}

WisdomTier wisdom_tier_from(std::string_view name) {
    if (name == "prediction") return WisdomTier::prediction;
    if (name == "core") return WisdomTier::core;
    if (name == "anchor") return WisdomTier::anchor;
    throw StorageError("unknown wisdom tier: " + std::string(name));
}

std::string_view to_string(WisdomStatus status) {
    switch (status) {
        case WisdomStatus::active: return "active";
        case WisdomStatus::under_review: return "under_review";
        case WisdomStatus::retired: return "retired";
    }
    throw StorageError("invalid wisdom status value");
}

std::string_view to_string(RevisionChange change) {
    switch (change) {
        case RevisionChange::proposed: return "proposed";
        case RevisionChange::corroborated: return "corroborated";
        case RevisionChange::contradicted: return "contradicted";
        case RevisionChange::promoted: return "promoted";
        case RevisionChange::demoted: return "demoted";
        case RevisionChange::retired: return "retired";
        case RevisionChange::replaced: return "replaced";
        case RevisionChange::held: return "held";
        case RevisionChange::reinstated: return "reinstated";
    }
    throw StorageError("invalid revision change value");
}

RevisionChange revision_change_from(std::string_view name) {
    if (name == "proposed") return RevisionChange::proposed;
    if (name == "corroborated") return RevisionChange::corroborated;
    if (name == "contradicted") return RevisionChange::contradicted;
    if (name == "promoted") return RevisionChange::promoted;
    if (name == "demoted") return RevisionChange::demoted;
    if (name == "retired") return RevisionChange::retired;
    if (name == "replaced") return RevisionChange::replaced;
    if (name == "held") return RevisionChange::held;
    if (name == "reinstated") return RevisionChange::reinstated;
    throw StorageError("unknown revision change: " + std::string(name));
}

std::optional<WisdomTier> promotion_target(WisdomTier tier, WisdomStatus status,
                                           const EvidenceLedger& evidence,
                                           const GateConfig& gate) {
    if (status != WisdomStatus::active) return std::nullopt;
    if (evidence.contradiction_count != 0) return std::nullopt;
    if (tier == WisdomTier::prediction &&
        static_cast<int>(evidence.session_ids.size()) >= gate.core_min_sessions) {
        return WisdomTier::core;
    }
    if (tier == WisdomTier::core && evidence.cycles_survived >= gate.anchor_min_cycles) {
        return WisdomTier::anchor;
    }
    return std::nullopt;
}

std::uint64_t WisdomStore::commit(const std::string& body) {
    std::uint64_t seq = sink_.append(StoreTag::wisdom, body);
    apply(Record::parse(body));
    return seq;
}

WisdomEntry& WisdomStore::mutable_entry(const std::string& id) {
    auto it = entry_index_.find(id);
    if (it == entry_index_.end()) throw NotFoundError("unknown wisdom entry: " + id);
    return entries_[it->second];
}

const WisdomEntry& WisdomStore::get_entry(const std::string& id) const {
    auto it = entry_index_.find(id);
    if (it == entry_index_.end()) throw NotFoundError("unknown wisdom entry: " + id);
    return entries_[it->second];
}

std::string WisdomStore::propose(const std::string& directive,
                                 const std::string& episode_ref,
                                 const std::string& session_id,
                                 const Provenance& provenance) {
    if (directive.empty()) throw ValidationError("directive must not be empty");
    if (episode_ref.empty()) throw ValidationError("episode_ref must not be empty");
    if (session_id.empty()) throw ValidationError("session_id must not be empty");
    if (provenance.source_id.empty())
        throw ValidationError("provenance source_id must not be empty");

    std::string id = counter_id(entries_.size() + 1);
    RecordWriter w;
    w.scalar("ev", "proposed")
        .scalar("id", id)
        .text("directive", directive)
        .text("episode", episode_ref)
        .text("session", session_id);
    write_provenance(w, provenance);
    w.time("at", clock_.now());
    commit(w.str());
    return id;
}

void WisdomStore::corroborate(const std::string& entry_id, const std::string& episode_ref,
                              const std::string& session_id) {
    const WisdomEntry& entry = get_entry(entry_id);
    if (entry.status == WisdomStatus::retired)
        throw ValidationError("entry is retired: " + entry_id);
    if (episode_ref.empty()) throw ValidationError("episode_ref must not be empty");
    if (session_id.empty()) throw ValidationError("session_id must not be empty");

    RecordWriter w;
    w.scalar("ev", "corroborated")
        .scalar("id", entry_id)
        .text("episode", episode_ref)
        .text("session", session_id)
        .time("at", clock_.now());
    commit(w.str());
}

void WisdomStore::contradict(const std::string& entry_id, const std::string& episode_ref,
                             const std::string& detail) {
    const WisdomEntry& entry = get_entry(entry_id);
    if (entry.status == WisdomStatus::retired)
        throw ValidationError("entry is retired: " + entry_id);
    if (episode_ref.empty()) throw ValidationError("episode_ref must not be empty");

    RecordWriter w;
    w.scalar("ev", "contradicted")
        .scalar("id", entry_id)
        .text("episode", episode_ref)
        .text("detail", detail)
        .time("at", clock_.now());
    commit(w.str());
}

ReviewDecision WisdomStore::review(const std::string& entry_id, const GateConfig& gate) {
    gate.validate();
    const WisdomEntry& entry = get_entry(entry_id);
    if (entry.status == WisdomStatus::retired)
        throw ValidationError("entry is retired: " + entry_id);

    // The decision is taken here, against the live gate, and written into
    // the event — replay applies the recorded outcome rather than re-running
    // the gate, so later config edits cannot rewrite history.
    std::optional<WisdomTier> target =
        promotion_target(entry.tier, entry.status, entry.evidence, gate);

    ReviewDecision decision;
    decision.entry_id = entry_id;
    decision.before = entry.tier;
    decision.after = target.value_or(entry.tier);
    decision.promoted = target.has_value();
    if (target) {
        decision.rationale = std::string("promoted ") +
                             std::string(to_string(decision.before)) + " -> " +
                             std::string(to_string(decision.after));
    } else if (entry.status == WisdomStatus::under_review) {
        decision.rationale = "held: under review";
    } else if (entry.evidence.contradiction_count != 0) {
        decision.rationale = "held: standing contradictions";
    } else {
        decision.rationale = "held: evidence below threshold";
    }

    RecordWriter w;
    w.scalar("ev", "reviewed")
        .scalar("id", entry_id)
        .scalar("tier_after", to_string(decision.after))
        .scalar("change", target ? "promoted" : "held")
        .text("detail", decision.rationale)
        .time("at", clock_.now());
    commit(w.str());
    return decision;
}

void WisdomStore::retire(const std::string& entry_id,
                         std::optional<std::string> replacement,
                         const std::string& reason) {
    const WisdomEntry& entry = get_entry(entry_id);
    if (entry.status == WisdomStatus::retired)
        throw ValidationError("entry already retired: " + entry_id);
    if (replacement) {
        if (*replacement == entry_id)
            throw ValidationError("entry cannot replace itself: " + entry_id);
        get_entry(*replacement);
    }

    RecordWriter w;
    w.scalar("ev", "retired")
        .scalar("id", entry_id)
        .opt_text("replacement", replacement)
        .text("reason", reason)
        .time("at", clock_.now());
    commit(w.str());
}

void WisdomStore::resolve_review(const std::string& entry_id, const std::string& note) {
    const WisdomEntry& entry = get_entry(entry_id);
    if (entry.status != WisdomStatus::under_review)
        throw ValidationError("entry is not under review: " + entry_id);
    if (note.empty()) throw ValidationError("resolution note must not be empty");

    RecordWriter w;
    w.scalar("ev", "review_resolved")
        .scalar("id", entry_id)
        .text("note", note)
        .time("at", clock_.now());
    commit(w.str());
}

void WisdomStore::advance_cycle() {
    RecordWriter w;
    w.scalar("ev", "cycle_advanced").time("at", clock_.now());
    commit(w.str());
}

std::vector<const WisdomEntry*> WisdomStore::active_directives(
    std::optional<std::string> context) const {
    std::vector<const WisdomEntry*> out;
    for (const auto& entry : entries_) {
        if (entry.status != WisdomStatus::active) continue;
        if (context && entry.provenance.source_id != *context) continue;
        out.push_back(&entry);
    }
    std::sort(out.begin(), out.end(), [](const WisdomEntry* a, const WisdomEntry* b) {
        if (tier_rank(a->tier) != tier_rank(b->tier))
            return tier_rank(a->tier) > tier_rank(b->tier);
        if (a->created_at != b->created_at) return a->created_at < b->created_at;
        return a->id < b->id;
    });
    return out;
}

std::vector<const WisdomEntry*> WisdomStore::review_queue() const {
    std::vector<const WisdomEntry*> out;
    for (const auto& entry : entries_) {
        if (entry.status == WisdomStatus::under_review) out.push_back(&entry);
    }
    return out;
}

void WisdomStore::apply(const Record& event) {
    std::string_view kind = event.scalar("ev");
    if (kind == "proposed") {
        WisdomEntry entry;
        entry.id = event.scalar("id");
        entry.directive = event.text("directive");
        entry.tier = WisdomTier::prediction;
        entry.status = WisdomStatus::active;
        entry.evidence.episode_refs.insert(event.text("episode"));
        entry.evidence.session_ids.insert(event.text("session"));
        entry.provenance = read_provenance(event);
        entry.created_at = event.time("at");
        entry.revision_log.push_back({entry.created_at, RevisionChange::proposed,
                                      "episode " + event.text("episode"),
                                      snapshot_of(entry.evidence)});
        entry_index_[entry.id] = entries_.size();
        entries_.push_back(std::move(entry));
    } else if (kind == "corroborated") {
        WisdomEntry& entry = mutable_entry(std::string(event.scalar("id")));
        entry.evidence.episode_refs.insert(event.text("episode"));
        entry.evidence.session_ids.insert(event.text("session"));
        entry.revision_log.push_back({event.time("at"), RevisionChange::corroborated,
                                      "episode " + event.text("episode") + " session " +
                                          event.text("session"),
                                      snapshot_of(entry.evidence)});
    } else if (kind == "contradicted") {
        WisdomEntry& entry = mutable_entry(std::string(event.scalar("id")));
        entry.evidence.contradiction_count += 1;
        entry.evidence.cycles_survived = 0;
        entry.status = WisdomStatus::under_review;
        entry.revision_log.push_back({event.time("at"), RevisionChange::contradicted,
                                      event.text("detail"), snapshot_of(entry.evidence)});
    } else if (kind == "reviewed") {
        WisdomEntry& entry = mutable_entry(std::string(event.scalar("id")));
        RevisionChange change = revision_change_from(event.scalar("change"));
        entry.tier = wisdom_tier_from(event.scalar("tier_after"));
        entry.revision_log.push_back({event.time("at"), change, event.text("detail"),
                                      snapshot_of(entry.evidence)});
    } else if (kind == "retired") {
        WisdomEntry& entry = mutable_entry(std::string(event.scalar("id")));
        entry.status = WisdomStatus::retired;
        entry.replacement_id = event.opt_text("replacement");
        entry.revision_log.push_back({event.time("at"),
                                      entry.replacement_id ? RevisionChange::replaced
                                                           : RevisionChange::retired,
                                      event.text("reason"), snapshot_of(entry.evidence)});
    } else if (kind == "review_resolved") {
        WisdomEntry& entry = mutable_entry(std::string(event.scalar("id")));
        entry.status = WisdomStatus::active;
        entry.evidence.contradiction_count = 0;
        entry.contradictions_at_last_cycle = 0;
        entry.revision_log.push_back({event.time("at"), RevisionChange::reinstated,
                                      event.text("note"), snapshot_of(entry.evidence)});
    } else if (kind == "cycle_advanced") {
        for (auto& entry : entries_) {
            if (entry.status == WisdomStatus::retired) continue;
            if (entry.status == WisdomStatus::active &&
                entry.evidence.contradiction_count == entry.contradictions_at_last_cycle) {
                entry.evidence.cycles_survived += 1;
            }
            entry.contradictions_at_last_cycle = entry.evidence.contradiction_count;
        }
    } else {
        throw StorageError("unknown wisdom event kind '" + std::string(kind) +
                           "' (log written by a newer format?)");
    }
}

void WisdomStore::restore_row(const Record& row) {
    std::string_view kind = row.scalar("row");
    if (kind == "wisdom") {
        WisdomEntry entry;
        entry.id = row.scalar("id");
        entry.directive = row.text("directive");
        entry.tier = wisdom_tier_from(row.scalar("tier"));
        std::string_view status = row.scalar("status");
        entry.status = status == "active"        ? WisdomStatus::active
                       : status == "under_review" ? WisdomStatus::under_review
                                                  : WisdomStatus::retired;
        std::uint64_t episodes = row.unsigned_integer("episodes_n");
        for (std::uint64_t i = 0; i < episodes; ++i) {
            entry.evidence.episode_refs.insert(row.text("episode" + std::to_string(i)));
        }
        std::uint64_t sessions = row.unsigned_integer("sessions_n");
        for (std::uint64_t i = 0; i < sessions; ++i) {
            entry.evidence.session_ids.insert(row.text("session" + std::to_string(i)));
        }
        entry.evidence.contradiction_count = static_cast<int>(row.integer("contradictions"));
        entry.evidence.cycles_survived = static_cast<int>(row.integer("cycles"));
        entry.contradictions_at_last_cycle =
            static_cast<int>(row.integer("cycle_baseline"));
        entry.provenance = read_provenance(row);
        entry.created_at = row.time("created_at");
        entry.replacement_id = row.opt_text("replacement");
        entry_index_[entry.id] = entries_.size();
        entries_.push_back(std::move(entry));
    } else if (kind == "revision") {
        WisdomEntry& entry = mutable_entry(std::string(row.scalar("entry")));
        RevisionRecord rev;
        rev.at = row.time("at");
        rev.change = revision_change_from(row.scalar("change"));
        rev.detail = row.text("detail");
        rev.evidence.episodes = static_cast<int>(row.integer("snap_episodes"));
        rev.evidence.sessions = static_cast<int>(row.integer("snap_sessions"));
        rev.evidence.contradictions = static_cast<int>(row.integer("snap_contradictions"));
        rev.evidence.cycles = static_cast<int>(row.integer("snap_cycles"));
        entry.revision_log.push_back(std::move(rev));
    } else {
        throw StorageError("unknown wisdom snapshot row '" + std::string(kind) + "'");
    }
}

void WisdomStore::serialize_state(std::string& out) const {
    for (const auto& entry : entries_) {
        RecordWriter w;
        w.scalar("row", "wisdom")
            .scalar("id", entry.id)
            .text("directive", entry.directive)
            .scalar("tier", to_string(entry.tier))
            .scalar("status", to_string(entry.status));
        std::vector<std::string> episodes(entry.evidence.episode_refs.begin(),
                                          entry.evidence.episode_refs.end());
        std::vector<std::string> sessions(entry.evidence.session_ids.begin(),
                                          entry.evidence.session_ids.end());
        w.unsigned_integer("episodes_n", episodes.size());
        for (std::size_t i = 0; i < episodes.size(); ++i)
            w.text("episode" + std::to_string(i), episodes[i]);
        w.unsigned_integer("sessions_n", sessions.size());
        for (std::size_t i = 0; i < sessions.size(); ++i)
            w.text("session" + std::to_string(i), sessions[i]);
        w.integer("contradictions", entry.evidence.contradiction_count)
            .integer("cycles", entry.evidence.cycles_survived)
            .integer("cycle_baseline", entry.contradictions_at_last_cycle);
        write_provenance(w, entry.provenance);
        w.time("created_at", entry.created_at).opt_text("replacement", entry.replacement_id);
        out += w.str();
        out += "\n";
        for (const auto& rev : entry.revision_log) {
            RecordWriter rw;
            rw.scalar("row", "revision")
                .scalar("entry", entry.id)
                .time("at", rev.at)
                .scalar("change", to_string(rev.change))
                .text("detail", rev.detail)
                .integer("snap_episodes", rev.evidence.episodes)
                .integer("snap_sessions", rev.evidence.sessions)
                .integer("snap_contradictions", rev.evidence.contradictions)
                .integer("snap_cycles", rev.evidence.cycles);
            out += rw.str();
            out += "\n";
        }
    }
}

} // namespace stratum
