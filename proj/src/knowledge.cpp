#include "stratum/knowledge.hpp"

#include <algorithm>
#include <cstdio>

namespace stratum {

namespace {

std::string counter_id(const char* prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06zu", prefix, n);
    return buf;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

// True if a directed path from → to exists over old→new link edges.
bool path_exists(const std::vector<SupersessionLink>& links, const std::string& from,
                 const std::string& to) {
    std::unordered_map<std::string, std::vector<const std::string*>> adj;
    for (const auto& link : links) adj[link.old_id].push_back(&link.new_id);
    std::vector<const std::string*> stack{&from};
    std::unordered_map<std::string, bool> seen;
    while (!stack.empty()) {
        const std::string* at = stack.back();
        stack.pop_back();
        if (*at == to) return true;
        if (seen[*at]) continue;
        seen[*at] = true;
        auto it = adj.find(*at);
        if (it == adj.end()) continue;
        for (const std::string* next : it->second) stack.push_back(next);
    }
    return false;
}

void write_stamp(RecordWriter& w, const BitemporalStamp& stamp) {
    w.time("created", stamp.system_created)
        .opt_time("expired", stamp.system_expired)
        .time("valid_from", stamp.valid_from)
        .opt_time("valid_until", stamp.valid_until);
}

BitemporalStamp read_stamp(const Record& r) {
    BitemporalStamp stamp;
    stamp.system_created = r.time("created");
    stamp.system_expired = r.opt_time("expired");
    stamp.valid_from = r.time("valid_from");
    stamp.valid_until = r.opt_time("valid_until");
    return stamp;
}

} // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::document: return "document";
        case SourceKind::conversation: return "conversation";
        case SourceKind::agent: return "agent";
        case SourceKind::human: return "human";
    }
    throw StorageError("invalid source kind value");
}

SourceKind source_kind_from(std::string_view name) {
    if (name == "document") return SourceKind::document;
    if (name == "conversation") return SourceKind::conversation;
    if (name == "agent") return SourceKind::agent;
    if (name == "human") return SourceKind::human;
    throw StorageError("unknown source kind: " + std::string(name));
}

void write_provenance(RecordWriter& w, const Provenance& p) {
    w.text("source_id", p.source_id)
        .scalar("source_kind", to_string(p.source_kind))
        .opt_text("author", p.author)
        .time("asserted_at", p.asserted_at)
        .opt_text("evidence_note", p.evidence_note);
}

Provenance read_provenance(const Record& r) {
    Provenance p;
    p.source_id = r.text("source_id");
    p.source_kind = source_kind_from(r.scalar("source_kind"));
    p.author = r.opt_text("author");
    p.asserted_at = r.time("asserted_at");
    p.evidence_note = r.opt_text("evidence_note");
    return p;
}

std::string KnowledgeStore::next_claim_id() const {
    return counter_id("k-", claims_.size() + 1);
}
std::string KnowledgeStore::next_entity_id() const {
    return counter_id("e-", entities_.size() + 1);
}
std::string KnowledgeStore::next_relationship_id() const {
    return counter_id("r-", relationships_.size() + 1);
}
std::string KnowledgeStore::next_conclusion_id() const {
    return counter_id("c-", conclusions_.size() + 1);
}

std::uint64_t KnowledgeStore::commit(const std::string& body) {
    std::uint64_t seq = sink_.append(StoreTag::knowledge, body);
    apply(Record::parse(body));
    return seq;
}

std::string KnowledgeStore::ingest_claim(const std::string& statement,
                                         const Provenance& provenance,
                                         const std::vector<std::string>& entity_refs,
                                         std::optional<Timestamp> valid_from,
                                         std::optional<double> confidence) {
    if (statement.empty()) throw ValidationError("claim statement must not be empty");
    if (provenance.source_id.empty())
        throw ValidationError("provenance source_id must not be empty");
    if (confidence && !(*confidence >= 0.0 && *confidence <= 1.0))
        throw ValidationError("confidence must be in [0,1]");
    for (const auto& ref : entity_refs) {
        if (entity_index_.find(ref) == entity_index_.end())
            throw NotFoundError("unknown entity: " + ref);
    }

    std::string id = next_claim_id();
    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "claim_ingested").scalar("id", id).text("statement", statement);
    w.id_list("entity_refs", entity_refs);
    write_provenance(w, provenance);
    w.opt_real("confidence", confidence);
    BitemporalStamp stamp;
    stamp.system_created = now;
    stamp.valid_from = valid_from.value_or(provenance.asserted_at);
    write_stamp(w, stamp);
    commit(w.str());
    return id;
}

std::string KnowledgeStore::add_entity(const std::string& name, const std::string& kind,
                                       const std::vector<std::string>& aliases) {
    if (name.empty()) throw ValidationError("entity name must not be empty");
    std::string id = next_entity_id();
    RecordWriter w;
    w.scalar("ev", "entity_added").scalar("id", id).text("name", name).text("kind", kind);
    w.unsigned_integer("aliases_n", aliases.size());
    for (std::size_t i = 0; i < aliases.size(); ++i) {
        w.text("alias" + std::to_string(i), aliases[i]);
    }
    w.time("created", clock_.now());
    commit(w.str());
    return id;
}

std::string KnowledgeStore::add_relationship(const std::string& src,
                                             const std::string& dst,
                                             const std::string& label,
                                             const Provenance& provenance) {
    if (entity_index_.find(src) == entity_index_.end())
        throw NotFoundError("unknown entity: " + src);
    if (entity_index_.find(dst) == entity_index_.end())
        throw NotFoundError("unknown entity: " + dst);
    if (label.empty()) throw ValidationError("relationship label must not be empty");
    if (provenance.source_id.empty())
        throw ValidationError("provenance source_id must not be empty");

    std::string id = next_relationship_id();
    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "relationship_added")
        .scalar("id", id)
        .scalar("src", src)
        .scalar("dst", dst)
        .text("label", label);
    write_provenance(w, provenance);
    BitemporalStamp stamp;
    stamp.system_created = now;
    stamp.valid_from = provenance.asserted_at;
    write_stamp(w, stamp);
    commit(w.str());
    return id;
}

SupersessionLink KnowledgeStore::supersede(const std::string& old_id,
                                           const std::string& new_id,
                                           const std::string& reason) {
    if (claim_index_.find(old_id) == claim_index_.end())
        throw NotFoundError("unknown claim: " + old_id);
    if (claim_index_.find(new_id) == claim_index_.end())
        throw NotFoundError("unknown claim: " + new_id);
    if (old_id == new_id) throw CycleError("claim cannot supersede itself: " + old_id);
    if (reason.empty())
        throw ValidationError("supersession reason must not be empty");
    if (path_exists(links_, new_id, old_id))
        throw CycleError("supersession " + old_id + " -> " + new_id +
                         " would close a cycle");

    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "claim_superseded")
        .scalar("old_id", old_id)
        .scalar("new_id", new_id)
        .text("reason", reason)
        .time("at", now);
    commit(w.str());
    return links_.back();
}

std::string KnowledgeStore::record_conclusion(
    const std::string& statement, const std::vector<std::string>& supporting_claims,
    const Provenance& provenance) {
    if (statement.empty()) throw ValidationError("conclusion statement must not be empty");
    if (supporting_claims.empty())
        throw ValidationError("conclusion needs at least one supporting claim");
    if (provenance.source_id.empty())
        throw ValidationError("provenance source_id must not be empty");
    for (const auto& ref : supporting_claims) {
        if (claim_index_.find(ref) == claim_index_.end())
            throw NotFoundError("unknown claim: " + ref);
    }

    std::string id = next_conclusion_id();
    RecordWriter w;
    w.scalar("ev", "conclusion_recorded").scalar("id", id).text("statement", statement);
    w.id_list("supporting", supporting_claims);
    write_provenance(w, provenance);
    w.time("created", clock_.now());
    commit(w.str());
    return id;
}

SupersessionLink KnowledgeStore::supersede_conclusion(const std::string& old_id,
                                                      const std::string& new_id,
                                                      const std::string& reason) {
    if (conclusion_index_.find(old_id) == conclusion_index_.end())
        throw NotFoundError("unknown conclusion: " + old_id);
    if (conclusion_index_.find(new_id) == conclusion_index_.end())
        throw NotFoundError("unknown conclusion: " + new_id);
    if (old_id == new_id)
        throw CycleError("conclusion cannot supersede itself: " + old_id);
    if (reason.empty())
        throw ValidationError("supersession reason must not be empty");
    if (path_exists(conclusion_links_, new_id, old_id))
        throw CycleError("supersession " + old_id + " -> " + new_id +
                         " would close a cycle");

    Timestamp now = clock_.now();
    RecordWriter w;
    w.scalar("ev", "conclusion_superseded")
        .scalar("old_id", old_id)
        .scalar("new_id", new_id)
        .text("reason", reason)
        .time("at", now);
    commit(w.str());
    return conclusion_links_.back();
}

const Claim& KnowledgeStore::get_claim(const std::string& id) const {
    auto it = claim_index_.find(id);
    if (it == claim_index_.end()) throw NotFoundError("unknown claim: " + id);
    return claims_[it->second];
}

const Entity& KnowledgeStore::get_entity(const std::string& id) const {
    auto it = entity_index_.find(id);
    if (it == entity_index_.end()) throw NotFoundError("unknown entity: " + id);
    return entities_[it->second];
}

const Conclusion& KnowledgeStore::get_conclusion(const std::string& id) const {
    auto it = conclusion_index_.find(id);
    if (it == conclusion_index_.end()) throw NotFoundError("unknown conclusion: " + id);
    return conclusions_[it->second];
}

bool KnowledgeStore::has_claim(const std::string& id) const {
    return claim_index_.find(id) != claim_index_.end();
}

std::vector<const Claim*> KnowledgeStore::current_claims(const ClaimFilter& filter) const {
    std::vector<const Claim*> out;
    std::optional<std::string> needle;
    if (filter.text_contains) needle = ascii_lower(*filter.text_contains);
    for (const auto& claim : claims_) {
        if (claim.status != ClaimStatus::current) continue;
        if (filter.entity_ref &&
            std::find(claim.entity_refs.begin(), claim.entity_refs.end(),
                      *filter.entity_ref) == claim.entity_refs.end()) {
            continue;
        }
        if (needle && ascii_lower(claim.statement).find(*needle) == std::string::npos)
            continue;
        out.push_back(&claim);
    }
    std::sort(out.begin(), out.end(), [](const Claim* a, const Claim* b) {
        if (a->stamp.system_created != b->stamp.system_created)
            return a->stamp.system_created < b->stamp.system_created;
        return a->id < b->id;
    });
    return out;
}

std::vector<const Conclusion*> KnowledgeStore::current_conclusions() const {
    std::vector<const Conclusion*> out;
    for (const auto& conclusion : conclusions_) {
        if (conclusion.status == ClaimStatus::current) out.push_back(&conclusion);
    }
    return out;
}

std::vector<ChainHop> KnowledgeStore::provenance_chain(const std::string& claim_id) const {
    const Claim& head = get_claim(claim_id);

    // Predecessors of X are links with new_id == X, ordered (recorded_at, old_id).
    std::unordered_map<std::string, std::vector<const SupersessionLink*>> preds;
    for (const auto& link : links_) preds[link.new_id].push_back(&link);
    for (auto& [id, list] : preds) {
        (void)id;
        std::sort(list.begin(), list.end(),
                  [](const SupersessionLink* a, const SupersessionLink* b) {
                      if (a->recorded_at != b->recorded_at)
                          return a->recorded_at < b->recorded_at;
                      return a->old_id < b->old_id;
                  });
    }

    std::vector<ChainHop> out;
    std::unordered_map<std::string, bool> visited;
    std::vector<ChainHop> frontier{{&head, nullptr}};
    std::size_t at = 0;
    while (at < frontier.size()) {
        ChainHop hop = frontier[at++];
        if (visited[hop.claim->id]) continue;
        visited[hop.claim->id] = true;
        out.push_back(hop);
        auto it = preds.find(hop.claim->id);
        if (it == preds.end()) continue;
        for (const SupersessionLink* link : it->second) {
            frontier.push_back({&claims_[claim_index_.at(link->old_id)], link});
        }
    }
    return out;
}

std::vector<KnowledgeHit> KnowledgeStore::search(std::string_view query, int k,
                                                 const KnowledgeSearchOptions& options,
                                                 const HookSet& hooks) const {
    if (k < 1) throw ValidationError("search: k must be >= 1");

    struct DocMeta {
        const std::string* statement;
        bool is_conclusion;
        bool superseded;
        bool stale_support;
    };
    std::vector<Doc> corpus;
    std::unordered_map<std::string, DocMeta> meta;
    for (const auto& claim : claims_) {
        bool superseded = claim.status == ClaimStatus::superseded;
        if (superseded && !options.include_superseded) continue;
        corpus.push_back({claim.id, claim.statement});
        meta[claim.id] = {&claim.statement, false, superseded, false};
    }
    for (const auto& conclusion : conclusions_) {
        bool superseded = conclusion.status == ClaimStatus::superseded;
        if (superseded && !options.include_superseded) continue;
        bool stale = std::any_of(conclusion.supporting_claims.begin(),
                                 conclusion.supporting_claims.end(),
                                 [&](const std::string& ref) {
                                     return get_claim(ref).status ==
                                            ClaimStatus::superseded;
                                 });
        corpus.push_back({conclusion.id, conclusion.statement});
        meta[conclusion.id] = {&conclusion.statement, true, superseded, stale};
    }

    std::vector<RankedList> lists;
    lists.push_back(lexical_rank(corpus, query, -1));
    if (hooks.embedder) {
        std::vector<Embedded> embedded;
        embedded.reserve(corpus.size());
        for (const auto& doc : corpus) {
            embedded.push_back({doc.id, hooks.embedder->embed(doc.text)});
        }
        lists.push_back(
            vector_rank(embedded, hooks.embedder->embed(query), -1));
    }

    RankedList ranked =
        lists.size() == 1 ? lists[0] : rrf_fuse(lists, options.fusion);

    std::unordered_map<std::string, std::vector<std::string>> contributed;
    for (const auto& list : lists) {
        for (const auto& item : list.items) {
            contributed[item.id].push_back(list.source_label);
        }
    }

    std::vector<std::string> texts;
    texts.reserve(ranked.items.size());
    for (const auto& item : ranked.items) texts.push_back(*meta.at(item.id).statement);
    ranked = rerank(query, ranked, texts, hooks.reranker);

    std::vector<KnowledgeHit> hits;
    for (const auto& item : ranked.items) {
        if (static_cast<int>(hits.size()) >= k) break;
        const DocMeta& m = meta.at(item.id);
        KnowledgeHit hit;
        hit.id = item.id;
        hit.statement = *m.statement;
        hit.score = item.score;
        hit.is_conclusion = m.is_conclusion;
        hit.superseded = m.superseded;
        hit.stale_support = m.stale_support;
        hit.contributing = contributed[item.id];
        hits.push_back(std::move(hit));
    }
    return hits;
}

void KnowledgeStore::apply(const Record& event) {
    std::string_view kind = event.scalar("ev");
    if (kind == "claim_ingested") {
        Claim claim;
        claim.id = event.scalar("id");
        claim.statement = event.text("statement");
        claim.entity_refs = event.id_list("entity_refs");
        claim.provenance = read_provenance(event);
        claim.confidence = event.opt_real("confidence");
        claim.stamp = read_stamp(event);
        claim.status = ClaimStatus::current;
        claim_index_[claim.id] = claims_.size();
        claims_.push_back(std::move(claim));
    } else if (kind == "claim_superseded") {
        SupersessionLink link;
        link.old_id = event.scalar("old_id");
        link.new_id = event.scalar("new_id");
        link.reason = event.text("reason");
        link.recorded_at = event.time("at");
        Claim& old_claim = claims_[claim_index_.at(link.old_id)];
        old_claim.status = ClaimStatus::superseded;
        // Close both windows: the record leaves the system now, and the
        // statement stops describing the world when its successor starts.
        if (!old_claim.stamp.system_expired)
            old_claim.stamp.system_expired = link.recorded_at;
        if (!old_claim.stamp.valid_until)
            old_claim.stamp.valid_until =
                claims_[claim_index_.at(link.new_id)].stamp.valid_from;
        links_.push_back(std::move(link));
    } else if (kind == "entity_added") {
        Entity entity;
        entity.id = event.scalar("id");
        entity.name = event.text("name");
        entity.kind = event.text("kind");
        std::uint64_t n = event.unsigned_integer("aliases_n");
        for (std::uint64_t i = 0; i < n; ++i) {
            entity.aliases.push_back(event.text("alias" + std::to_string(i)));
        }
        entity_index_[entity.id] = entities_.size();
        entities_.push_back(std::move(entity));
    } else if (kind == "relationship_added") {
        Relationship rel;
        rel.id = event.scalar("id");
        rel.src = event.scalar("src");
        rel.dst = event.scalar("dst");
        rel.label = event.text("label");
        rel.provenance = read_provenance(event);
        rel.stamp = read_stamp(event);
        relationships_.push_back(std::move(rel));
    } else if (kind == "conclusion_recorded") {
        Conclusion conclusion;
        conclusion.id = event.scalar("id");
        conclusion.statement = event.text("statement");
        conclusion.supporting_claims = event.id_list("supporting");
        conclusion.provenance = read_provenance(event);
        conclusion.status = ClaimStatus::current;
        conclusion_index_[conclusion.id] = conclusions_.size();
        conclusions_.push_back(std::move(conclusion));
    } else if (kind == "conclusion_superseded") {
        SupersessionLink link;
        link.old_id = event.scalar("old_id");
        link.new_id = event.scalar("new_id");
        link.reason = event.text("reason");
        link.recorded_at = event.time("at");
        conclusions_[conclusion_index_.at(link.old_id)].status =
            ClaimStatus::superseded;
        conclusion_links_.push_back(std::move(link));
    } else {
        throw StorageError("unknown knowledge event kind '" + std::string(kind) +
                           "' (log written by a newer format?)");
    }
}

void KnowledgeStore::restore_row(const Record& row) {
    std::string_view kind = row.scalar("row");
    if (kind == "claim") {
        Claim claim;
        claim.id = row.scalar("id");
        claim.statement = row.text("statement");
        claim.entity_refs = row.id_list("entity_refs");
        claim.provenance = read_provenance(row);
        claim.confidence = row.opt_real("confidence");
        claim.stamp = read_stamp(row);
        claim.status = row.scalar("status") == "superseded" ? ClaimStatus::superseded
                                                            : ClaimStatus::current;
        claim_index_[claim.id] = claims_.size();
        claims_.push_back(std::move(claim));
    } else if (kind == "claim_link") {
        links_.push_back({std::string(row.scalar("old_id")),
                          std::string(row.scalar("new_id")), row.text("reason"),
                          row.time("at")});
    } else if (kind == "entity") {
        Entity entity;
        entity.id = row.scalar("id");
        entity.name = row.text("name");
        entity.kind = row.text("kind");
        std::uint64_t n = row.unsigned_integer("aliases_n");
        for (std::uint64_t i = 0; i < n; ++i) {
            entity.aliases.push_back(row.text("alias" + std::to_string(i)));
        }
        entity_index_[entity.id] = entities_.size();
        entities_.push_back(std::move(entity));
    } else if (kind == "relationship") {
        Relationship rel;
        rel.id = row.scalar("id");
        rel.src = row.scalar("src");
        rel.dst = row.scalar("dst");
        rel.label = row.text("label");
        rel.provenance = read_provenance(row);
        rel.stamp = read_stamp(row);
        relationships_.push_back(std::move(rel));
    } else if (kind == "conclusion") {
        Conclusion conclusion;
        conclusion.id = row.scalar("id");
        conclusion.statement = row.text("statement");
        conclusion.supporting_claims = row.id_list("supporting");
        conclusion.provenance = read_provenance(row);
        conclusion.status = row.scalar("status") == "superseded"
                                ? ClaimStatus::superseded
                                : ClaimStatus::current;
        conclusion_index_[conclusion.id] = conclusions_.size();
        conclusions_.push_back(std::move(conclusion));
    } else if (kind == "conclusion_link") {
        conclusion_links_.push_back({std::string(row.scalar("old_id")),
                                     std::string(row.scalar("new_id")),
                                     row.text("reason"), row.time("at")});
    } else {
        throw StorageError("unknown knowledge snapshot row '" + std::string(kind) + "'");
    }
}

void KnowledgeStore::serialize_state(std::string& out) const {
    for (const auto& claim : claims_) {
        RecordWriter w;
        w.scalar("row", "claim").scalar("id", claim.id).text("statement", claim.statement);
        w.id_list("entity_refs", claim.entity_refs);
        write_provenance(w, claim.provenance);
        w.opt_real("confidence", claim.confidence);
        write_stamp(w, claim.stamp);
        w.scalar("status",
                 claim.status == ClaimStatus::current ? "current" : "superseded");
        out += w.str();
        out += "\n";
    }
    for (const auto& link : links_) {
        RecordWriter w;
        w.scalar("row", "claim_link")
            .scalar("old_id", link.old_id)
            .scalar("new_id", link.new_id)
            .text("reason", link.reason)
            .time("at", link.recorded_at);
        out += w.str();
        out += "\n";
    }
    for (const auto& entity : entities_) {
        RecordWriter w;
        w.scalar("row", "entity")
            .scalar("id", entity.id)
            .text("name", entity.name)
            .text("kind", entity.kind);
        w.unsigned_integer("aliases_n", entity.aliases.size());
        for (std::size_t i = 0; i < entity.aliases.size(); ++i) {
            w.text("alias" + std::to_string(i), entity.aliases[i]);
        }
        out += w.str();
        out += "\n";
    }
    for (const auto& rel : relationships_) {
        RecordWriter w;
        w.scalar("row", "relationship")
            .scalar("id", rel.id)
            .scalar("src", rel.src)
            .scalar("dst", rel.dst)
            .text("label", rel.label);
        write_provenance(w, rel.provenance);
        write_stamp(w, rel.stamp);
        out += w.str();
        out += "\n";
    }
    for (const auto& conclusion : conclusions_) {
        RecordWriter w;
        w.scalar("row", "conclusion")
            .scalar("id", conclusion.id)
            .text("statement", conclusion.statement);
        w.id_list("supporting", conclusion.supporting_claims);
        write_provenance(w, conclusion.provenance);
        w.scalar("status", conclusion.status == ClaimStatus::current ? "current"
                                                                     : "superseded");
        out += w.str();
        out += "\n";
    }
    for (const auto& link : conclusion_links_) {
        RecordWriter w;
        w.scalar("row", "conclusion_link")
            .scalar("old_id", link.old_id)
            .scalar("new_id", link.new_id)
            .text("reason", link.reason)
            .time("at", link.recorded_at);
        out += w.str();
        out += "\n";
    }
}

} // namespace stratum
