#include "stratum/memory.hpp"

#include <algorithm>
#include <cstdio>

namespace stratum {

namespace {

std::string counter_id(const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, n);
    return buf;
}

} // namespace

std::string_view to_string(IntentionStatus status) {
    switch (status) {
        case IntentionStatus::pending: return "pending";
        case IntentionStatus::surfaced: return "surfaced";
        case IntentionStatus::completed: return "completed";
        case IntentionStatus::expired: return "expired";
    }
    throw StorageError("invalid intention status value");
}

IntentionStatus intention_status_from(std::string_view name) {
    if (name == "pending") return IntentionStatus::pending;
    if (name == "surfaced") return IntentionStatus::surfaced;
    if (name == "completed") return IntentionStatus::completed;
    if (name == "expired") return IntentionStatus::expired;
    throw StorageError("unknown intention status: " + std::string(name));
}

std::uint64_t MemoryStore::commit(const std::string& body) {
    std::uint64_t seq = sink_.append(StoreTag::memory, body);
    apply(Record::parse(body));
    return seq;
}

std::string MemoryStore::create_context(const std::string& name) {
    if (name.empty()) throw ValidationError("context name must not be empty");
    std::string id = counter_id("ctx-", contexts_.size() + 1);
    RecordWriter w;
    w.scalar("ev", "context_created")
        .scalar("id", id)
        .text("name", name)
        .time("at", clock_.now());
    commit(w.str());
    return id;
}

std::string MemoryStore::observe(const std::string& content,
                                 const std::string& context_id,
                                 std::optional<Timestamp> valid_from,
                                 std::optional<std::string> session_id,
                                 std::optional<DecayParams> decay_override) {
    if (content.empty()) throw ValidationError("observation content must not be empty");
    if (!has_context(context_id)) throw NotFoundError("unknown context: " + context_id);
    const DecayParams& profile = decay_override ? *decay_override : decay_;
    profile.validate();

    std::string id = counter_id("m-", facts_.size() + 1);
    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "observed")
        .scalar("id", id)
        .scalar("ctx", context_id)
        .text("content", content)
        .opt_text("session", session_id)
        .real("s0", profile.initial_strength)
        .integer("h_base", profile.half_life)
        .time("created", now)
        .time("valid_from", valid_from.value_or(now));
    commit(w.str());
    return id;
}

double MemoryStore::reinforce(const std::string& memory_id) {
    const MemoryFact& fact = get_fact(memory_id);
    if (fact.archived) throw ValidationError("cannot reinforce archived fact: " + memory_id);

    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "reinforced").scalar("id", memory_id).time("at", now);
    commit(w.str());
    return retrievability(memory_id, now);
}

void MemoryStore::invalidate(const std::string& memory_id, Timestamp valid_until,
                             const std::string& reason) {
    const MemoryFact& fact = get_fact(memory_id);
    if (valid_until < fact.stamp.valid_from)
        throw ValidationError("valid_until precedes valid_from for " + memory_id);

    RecordWriter w;
    w.scalar("ev", "invalidated")
        .scalar("id", memory_id)
        .time("valid_until", valid_until)
        .text("reason", reason)
        .time("at", clock_.now());
    commit(w.str());
}

Millis MemoryStore::effective_half_life(const MemoryFact& fact) const {
    return reinforced_half_life(fact.base_half_life, fact.reinforcement_count,
                                decay_.reinforcement_growth, decay_.half_life_cap);
}

double MemoryStore::retrievability(const std::string& memory_id, Timestamp now) const {
    const MemoryFact& fact = get_fact(memory_id);
    Millis elapsed = std::max<Millis>(0, now.ms - fact.last_reinforced.ms);
    return retention(fact.initial_strength, elapsed, effective_half_life(fact));
}

std::vector<std::string> MemoryStore::sweep(std::optional<std::string> context_id) {
    if (context_id && !has_context(*context_id))
        throw NotFoundError("unknown context: " + *context_id);
    Timestamp now = clock_.now();
    std::vector<std::string> to_archive;
    for (const auto& fact : facts_) {
        if (fact.archived) continue;
        if (context_id && fact.context_id != *context_id) continue;
        if (retrievability(fact.id, now) < decay_.recall_threshold) {
            to_archive.push_back(fact.id);
        }
    }
    for (const auto& id : to_archive) {
        RecordWriter w;
        w.scalar("ev", "archived").scalar("id", id).time("at", now);
        commit(w.str());
    }
    return to_archive;
}

std::vector<RecalledFact> MemoryStore::recall(std::string_view query,
                                              const std::string& context_id, int k,
                                              const RecallOptions& options,
                                              const HookSet& hooks) const {
    if (k < 1) throw ValidationError("recall: k must be >= 1");
    if (!has_context(context_id)) throw NotFoundError("unknown context: " + context_id);

    Timestamp now = clock_.now();
    Timestamp system_time = options.as_of ? options.as_of->first : now;
    Timestamp valid_time = options.as_of ? options.as_of->second : now;

    std::vector<const MemoryFact*> candidates;
    for (const auto& fact : facts_) {
        if (fact.context_id != context_id) continue;
        if (fact.archived && !options.include_archived) continue;
        if (!visible_as_of(fact.stamp, system_time, valid_time)) continue;
        candidates.push_back(&fact);
    }
    if (candidates.empty()) return {};

    std::vector<Doc> corpus;
    corpus.reserve(candidates.size());
    for (const MemoryFact* fact : candidates) corpus.push_back({fact->id, fact->content});

    // Relevance: BM25 over the candidate corpus; with an embedder, the RRF
    // fusion of the lexical and vector rankings.
    std::unordered_map<std::string, double> relevance;
    if (hooks.embedder) {
        std::vector<RankedList> lists;
        lists.push_back(lexical_rank(corpus, query, -1));
        std::vector<Embedded> embedded;
        embedded.reserve(corpus.size());
        for (const auto& doc : corpus) {
            embedded.push_back({doc.id, hooks.embedder->embed(doc.text)});
        }
        lists.push_back(vector_rank(embedded, hooks.embedder->embed(query), -1));
        for (const auto& item : rrf_fuse(lists, options.fusion).items) {
            relevance[item.id] = item.score;
        }
    } else {
        for (const auto& item : lexical_scores(corpus, query)) {
            relevance[item.id] = item.score;
        }
    }

    std::vector<RecalledFact> scored;
    for (const MemoryFact* fact : candidates) {
        auto it = relevance.find(fact->id);
        if (it == relevance.end() || it->second <= 0.0) continue;
        double r = retrievability(fact->id, now);
        if (r < decay_.recall_threshold && !options.include_archived) continue;
        RecalledFact hit;
        hit.id = fact->id;
        hit.content = fact->content;
        hit.relevance = it->second;
        hit.retention = r;
        hit.score = it->second * r;
        scored.push_back(std::move(hit));
    }
    std::sort(scored.begin(), scored.end(), [&](const RecalledFact& a, const RecalledFact& b) {
        if (a.score != b.score) return a.score > b.score;
        const MemoryFact& fa = get_fact(a.id);
        const MemoryFact& fb = get_fact(b.id);
        if (fa.stamp.system_created != fb.stamp.system_created)
            return fa.stamp.system_created > fb.stamp.system_created;
        return a.id < b.id;
    });

    if (hooks.reranker && !scored.empty()) {
        RankedList list;
        std::vector<std::string> texts;
        for (const auto& hit : scored) {
            list.items.push_back({hit.id, hit.score});
            texts.push_back(hit.content);
        }
        RankedList reordered = rerank(query, list, texts, hooks.reranker);
        std::unordered_map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < scored.size(); ++i) pos[scored[i].id] = i;
        std::vector<RecalledFact> shuffled;
        shuffled.reserve(scored.size());
        for (const auto& item : reordered.items) shuffled.push_back(scored[pos[item.id]]);
        scored = std::move(shuffled);
    }

    if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
    return scored;
}

std::string MemoryStore::schedule_intention(const std::string& description,
                                            TriggerKind trigger,
                                            std::optional<Timestamp> due_at,
                                            std::optional<std::string> tag,
                                            const std::string& context_id) {
    if (description.empty()) throw ValidationError("intention description must not be empty");
    if (!has_context(context_id)) throw NotFoundError("unknown context: " + context_id);
    Timestamp now = clock_.now();
    if (trigger == TriggerKind::time_based) {
        if (!due_at) throw ValidationError("time-based intention needs due_at");
        if (!(*due_at > now))
            throw ValidationError("due_at must be in the future");
        tag = std::nullopt;
    } else {
        if (!tag || tag->empty()) throw ValidationError("event-based intention needs a tag");
        due_at = std::nullopt;
    }

    std::string id = counter_id("i-", intentions_.size() + 1);
    RecordWriter w;
    w.scalar("ev", "intention_scheduled")
        .scalar("id", id)
        .scalar("ctx", context_id)
        .text("description", description)
        .scalar("trigger", trigger == TriggerKind::time_based ? "time" : "event")
        .opt_time("due", due_at)
        .opt_text("tag", tag)
        .time("at", now);
    commit(w.str());
    return id;
}

std::vector<const Intention*> MemoryStore::list_due(Timestamp now) const {
    std::vector<const Intention*> due;
    for (const auto& intention : intentions_) {
        if (intention.status != IntentionStatus::pending) continue;
        if (intention.trigger != TriggerKind::time_based) continue;
        if (*intention.due_at <= now) due.push_back(&intention);
    }
    std::sort(due.begin(), due.end(), [](const Intention* a, const Intention* b) {
        if (*a->due_at != *b->due_at) return *a->due_at < *b->due_at;
        return a->id < b->id;
    });
    return due;
}

std::optional<Timestamp> MemoryStore::next_due_time() const {
    std::optional<Timestamp> next;
    for (const auto& intention : intentions_) {
        if (intention.status != IntentionStatus::pending) continue;
        if (intention.trigger != TriggerKind::time_based) continue;
        if (!next || *intention.due_at < *next) next = intention.due_at;
    }
    return next;
}

void MemoryStore::mark_surfaced(const std::string& intention_id) {
    const Intention& intention = get_intention(intention_id);
    if (intention.status != IntentionStatus::pending)
        throw ValidationError("intention is not pending: " + intention_id);
    RecordWriter w;
    w.scalar("ev", "intention_surfaced").scalar("id", intention_id).time("at", clock_.now());
    commit(w.str());
}

void MemoryStore::mark_completed(const std::string& intention_id) {
    const Intention& intention = get_intention(intention_id);
    if (intention.status != IntentionStatus::pending &&
        intention.status != IntentionStatus::surfaced) {
        throw ValidationError("intention cannot be completed from status " +
                              std::string(to_string(intention.status)) + ": " +
                              intention_id);
    }
    RecordWriter w;
    w.scalar("ev", "intention_completed").scalar("id", intention_id).time("at", clock_.now());
    commit(w.str());
}

std::vector<const Intention*> MemoryStore::trigger_event(const std::string& tag) {
    if (tag.empty()) throw ValidationError("event tag must not be empty");
    Timestamp now = clock_.now();
    std::vector<std::string> matched;
    for (const auto& intention : intentions_) {
        if (intention.status != IntentionStatus::pending) continue;
        if (intention.trigger != TriggerKind::event_based) continue;
        if (*intention.tag == tag) matched.push_back(intention.id);
    }
    for (const auto& id : matched) {
        RecordWriter w;
        w.scalar("ev", "intention_surfaced").scalar("id", id).time("at", now);
        commit(w.str());
    }
    std::vector<const Intention*> surfaced;
    for (const auto& id : matched) surfaced.push_back(&get_intention(id));
    return surfaced;
}

void MemoryStore::record_consolidation(const std::string& pattern_key,
                                       const std::vector<std::string>& member_ids,
                                       const std::string& summary) {
    if (pattern_key.empty()) throw ValidationError("pattern key must not be empty");
    if (is_consolidated(pattern_key))
        throw ValidationError("pattern already consolidated: " + pattern_key);
    for (const auto& id : member_ids) get_fact(id);

    RecordWriter w;
    w.scalar("ev", "consolidated")
        .text("key", pattern_key)
        .id_list("members", member_ids)
        .text("summary", summary)
        .time("at", clock_.now());
    commit(w.str());
}

const MemoryFact& MemoryStore::get_fact(const std::string& id) const {
    auto it = fact_index_.find(id);
    if (it == fact_index_.end()) throw NotFoundError("unknown memory fact: " + id);
    return facts_[it->second];
}

const Intention& MemoryStore::get_intention(const std::string& id) const {
    auto it = intention_index_.find(id);
    if (it == intention_index_.end()) throw NotFoundError("unknown intention: " + id);
    return intentions_[it->second];
}

const Context& MemoryStore::get_context(const std::string& id) const {
    auto it = context_index_.find(id);
    if (it == context_index_.end()) throw NotFoundError("unknown context: " + id);
    return contexts_[it->second];
}

void MemoryStore::apply(const Record& event) {
    std::string_view kind = event.scalar("ev");
    if (kind == "context_created") {
        Context ctx;
        ctx.id = event.scalar("id");
        ctx.name = event.text("name");
        context_index_[ctx.id] = contexts_.size();
        contexts_.push_back(std::move(ctx));
    } else if (kind == "observed") {
        MemoryFact fact;
        fact.id = event.scalar("id");
        fact.context_id = event.scalar("ctx");
        fact.content = event.text("content");
        fact.session_id = event.opt_text("session");
        fact.initial_strength = event.real("s0");
        fact.base_half_life = event.integer("h_base");
        fact.stamp.system_created = event.time("created");
        fact.stamp.valid_from = event.time("valid_from");
        fact.last_reinforced = fact.stamp.system_created;
        fact_index_[fact.id] = facts_.size();
        facts_.push_back(std::move(fact));
    } else if (kind == "reinforced") {
        MemoryFact& fact = facts_[fact_index_.at(std::string(event.scalar("id")))];
        fact.reinforcement_count += 1;
        fact.last_reinforced = event.time("at");
    } else if (kind == "invalidated") {
        MemoryFact& fact = facts_[fact_index_.at(std::string(event.scalar("id")))];
        fact.stamp.valid_until = event.time("valid_until");
    } else if (kind == "archived") {
        facts_[fact_index_.at(std::string(event.scalar("id")))].archived = true;
    } else if (kind == "intention_scheduled") {
        Intention intention;
        intention.id = event.scalar("id");
        intention.context_id = event.scalar("ctx");
        intention.description = event.text("description");
        intention.trigger = event.scalar("trigger") == "time" ? TriggerKind::time_based
                                                              : TriggerKind::event_based;
        intention.due_at = event.opt_time("due");
        intention.tag = event.opt_text("tag");
        intention.status = IntentionStatus::pending;
        intention_index_[intention.id] = intentions_.size();
        intentions_.push_back(std::move(intention));
    } else if (kind == "intention_surfaced") {
        Intention& intention =
            intentions_[intention_index_.at(std::string(event.scalar("id")))];
        intention.status = IntentionStatus::surfaced;
        intention.surfaced_at = event.time("at");
    } else if (kind == "intention_completed") {
        Intention& intention =
            intentions_[intention_index_.at(std::string(event.scalar("id")))];
        intention.status = IntentionStatus::completed;
        if (!intention.surfaced_at) intention.surfaced_at = event.time("at");
    } else if (kind == "consolidated") {
        consolidated_keys_.insert(event.text("key"));
    } else {
        throw StorageError("unknown memory event kind '" + std::string(kind) +
                           "' (log written by a newer format?)");
    }
}

void MemoryStore::restore_row(const Record& row) {
    std::string_view kind = row.scalar("row");
    if (kind == "context") {
        Context ctx;
        ctx.id = row.scalar("id");
        ctx.name = row.text("name");
        context_index_[ctx.id] = contexts_.size();
        contexts_.push_back(std::move(ctx));
    } else if (kind == "fact") {
        MemoryFact fact;
        fact.id = row.scalar("id");
        fact.context_id = row.scalar("ctx");
        fact.content = row.text("content");
        fact.session_id = row.opt_text("session");
        fact.initial_strength = row.real("s0");
        fact.base_half_life = row.integer("h_base");
        fact.stamp.system_created = row.time("created");
        fact.stamp.system_expired = row.opt_time("expired");
        fact.stamp.valid_from = row.time("valid_from");
        fact.stamp.valid_until = row.opt_time("valid_until");
        fact.last_reinforced = row.time("last_reinforced");
        fact.reinforcement_count = static_cast<int>(row.integer("reinforcements"));
        fact.archived = row.flag("archived");
        fact_index_[fact.id] = facts_.size();
        facts_.push_back(std::move(fact));
    } else if (kind == "intention") {
        Intention intention;
        intention.id = row.scalar("id");
        intention.context_id = row.scalar("ctx");
        intention.description = row.text("description");
        intention.trigger = row.scalar("trigger") == "time" ? TriggerKind::time_based
                                                            : TriggerKind::event_based;
        intention.due_at = row.opt_time("due");
        intention.tag = row.opt_text("tag");
        intention.status = intention_status_from(row.scalar("status"));
        intention.surfaced_at = row.opt_time("surfaced_at");
        intention_index_[intention.id] = intentions_.size();
        intentions_.push_back(std::move(intention));
    } else if (kind == "consolidated_key") {
        consolidated_keys_.insert(row.text("key"));
    } else {
        throw StorageError("unknown memory snapshot row '" + std::string(kind) + "'");
    }
}

void MemoryStore::serialize_state(std::string& out) const {
    for (const auto& ctx : contexts_) {
        RecordWriter w;
        w.scalar("row", "context").scalar("id", ctx.id).text("name", ctx.name);
        out += w.str();
        out += "\n";
    }
    for (const auto& fact : facts_) {
        RecordWriter w;
        w.scalar("row", "fact")
            .scalar("id", fact.id)
            .scalar("ctx", fact.context_id)
            .text("content", fact.content)
            .opt_text("session", fact.session_id)
            .real("s0", fact.initial_strength)
            .integer("h_base", fact.base_half_life)
            .time("created", fact.stamp.system_created)
            .opt_time("expired", fact.stamp.system_expired)
            .time("valid_from", fact.stamp.valid_from)
            .opt_time("valid_until", fact.stamp.valid_until)
            .time("last_reinforced", fact.last_reinforced)
            .integer("reinforcements", fact.reinforcement_count)
            .flag("archived", fact.archived);
        out += w.str();
        out += "\n";
    }
    for (const auto& intention : intentions_) {
        RecordWriter w;
        w.scalar("row", "intention")
            .scalar("id", intention.id)
            .scalar("ctx", intention.context_id)
            .text("description", intention.description)
            .scalar("trigger",
                    intention.trigger == TriggerKind::time_based ? "time" : "event")
            .opt_time("due", intention.due_at)
            .opt_text("tag", intention.tag)
            .scalar("status", to_string(intention.status))
            .opt_time("surfaced_at", intention.surfaced_at);
        out += w.str();
        out += "\n";
    }
    for (const auto& key : consolidated_keys_) {
        RecordWriter w;
        w.scalar("row", "consolidated_key").text("key", key);
        out += w.str();
        out += "\n";
    }
}

} // namespace stratum
