#include "stratum/dreamcycle.hpp"

#include "stratum/errors.hpp"
#include "stratum/record.hpp"
#include "stratum/retrieval.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <mutex>
#include <unordered_set>

namespace stratum {

namespace {

std::string join_tokens_sorted_unique(const std::vector<std::string>& tokens) {
    std::vector<std::string> sorted = tokens;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::string joined;
    for (const std::string& token : sorted) {
        if (!joined.empty()) joined += ' ';
        joined += token;
    }
    return joined;
}

} // namespace

std::vector<PatternCandidate> detect_patterns(const MemoryStore& memory,
                                              const DreamConfig& config,
                                              const HookSet& hooks) {
    struct Node {
        const MemoryFact* fact;
        std::unordered_set<std::string> tokens;
        std::vector<double> embedding;
    };
    std::vector<Node> nodes;
    for (const MemoryFact& fact : memory.facts()) {
        if (fact.archived) continue;
        Node node;
        node.fact = &fact;
        node.tokens = token_set(fact.content);
        if (hooks.embedder) node.embedding = hooks.embedder->embed(fact.content);
        nodes.push_back(std::move(node));
    }

    const bool use_embeddings = static_cast<bool>(hooks.embedder);
    auto similar = [&](std::size_t i, std::size_t j) {
        const double s = use_embeddings ? cosine(nodes[i].embedding, nodes[j].embedding)
                                        : jaccard(nodes[i].tokens, nodes[j].tokens);
        return s >= config.jaccard_threshold;
    };

    // Connected components over the similarity graph, in snapshot order.
    std::vector<int> component(nodes.size(), -1);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t start = 0; start < nodes.size(); ++start) {
        if (component[start] != -1) continue;
        const int label = static_cast<int>(groups.size());
        groups.emplace_back();
        std::deque<std::size_t> frontier{start};
        component[start] = label;
        while (!frontier.empty()) {
            const std::size_t i = frontier.front();
            frontier.pop_front();
            groups[static_cast<std::size_t>(label)].push_back(i);
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                if (component[j] == -1 && similar(i, j)) {
                    component[j] = label;
                    frontier.push_back(j);
                }
            }
        }
    }

    std::vector<PatternCandidate> candidates;
    for (std::vector<std::size_t>& group : groups) {
        std::sort(group.begin(), group.end());
        if (group.size() < static_cast<std::size_t>(config.min_occurrences)) continue;

        std::set<std::string> sessions;
        for (std::size_t i : group) {
            if (nodes[i].fact->session_id) sessions.insert(*nodes[i].fact->session_id);
        }
        if (sessions.size() < static_cast<std::size_t>(config.min_sessions)) continue;

        // Representative: lexically most central member, earliest id on ties.
        std::size_t best = group.front();
        double best_sum = -1.0;
        for (std::size_t i : group) {
            double sum = 0.0;
            for (std::size_t j : group) {
                if (i != j) sum += jaccard(nodes[i].tokens, nodes[j].tokens);
            }
            if (sum > best_sum) {
                best_sum = sum;
                best = i;
            }
        }

        PatternCandidate candidate;
        candidate.representative_content = nodes[best].fact->content;
        for (std::size_t i : group) candidate.member_ids.push_back(nodes[i].fact->id);
        std::sort(candidate.member_ids.begin(), candidate.member_ids.end());
        candidate.distinct_sessions = std::move(sessions);
        candidate.similarity_basis = use_embeddings ? PatternCandidate::Basis::embedding
                                                    : PatternCandidate::Basis::lexical_overlap;
        candidate.pattern_key =
            join_tokens_sorted_unique(tokenize(candidate.representative_content));
        candidates.push_back(std::move(candidate));
    }
    return candidates;
}

CycleReport run_cycle(Engine& engine) {
    std::unique_lock writer(engine.writer_mutex());
    CycleReport report;
    MemoryStore& memory = engine.memory();
    WisdomStore& wisdom = engine.wisdom();
    const HookSet& hooks = engine.hooks();

    // (1) Decay sweep. Hook-free and committed first: a later hook failure
    // aborts the rest of the cycle but never unwinds an archive.
    report.archived = memory.sweep().size();

    // (2) Pattern detection over the post-sweep snapshot.
    report.candidates = detect_patterns(memory, engine.config().dream, hooks);

    // Plan phase — every hook call happens here, before any further
    // mutation, so a throwing hook leaves the stores untouched.
    struct Proposal {
        const PatternCandidate* candidate;
        std::string directive;
        // (episode, session) pairs for members that carry a session id.
        std::vector<std::pair<std::string, std::string>> attributed;
    };
    std::vector<Proposal> proposals;
    for (const PatternCandidate& candidate : report.candidates) {
        if (memory.is_consolidated(candidate.pattern_key)) continue;
        Proposal proposal;
        proposal.candidate = &candidate;
        proposal.directive = candidate.representative_content;
        if (hooks.summarizer) {
            std::vector<std::string> contents;
            for (const std::string& member : candidate.member_ids) {
                contents.push_back(memory.get_fact(member).content);
            }
            proposal.directive = hooks.summarizer->summarize(contents);
            if (proposal.directive.empty()) {
                throw HookError("summary generator returned empty text");
            }
        }
        for (const std::string& member : candidate.member_ids) {
            const MemoryFact& fact = memory.get_fact(member);
            if (fact.session_id) proposal.attributed.emplace_back(member, *fact.session_id);
        }
        proposals.push_back(std::move(proposal));
    }

    // (3) Commit: one proposal per new pattern, evidence credited per
    // member episode (sessions deduplicate in the ledger), then the
    // consolidated event that makes reruns skip this pattern.
    const Timestamp now = engine.clock().now();
    for (const Proposal& proposal : proposals) {
        const PatternCandidate& candidate = *proposal.candidate;
        Provenance provenance;
        provenance.source_id = "dreamcycle";
        provenance.source_kind = SourceKind::agent;
        provenance.asserted_at = now;
        char note[96];
        std::snprintf(note, sizeof note, "pattern over %zu episodes across %zu sessions",
                      candidate.member_ids.size(), candidate.distinct_sessions.size());
        provenance.evidence_note = note;

        const auto& seed = proposal.attributed.front();
        const std::string entry_id =
            wisdom.propose(proposal.directive, seed.first, seed.second, provenance);
        for (std::size_t i = 1; i < proposal.attributed.size(); ++i) {
            wisdom.corroborate(entry_id, proposal.attributed[i].first,
                               proposal.attributed[i].second);
        }
        memory.record_consolidation(candidate.pattern_key, candidate.member_ids,
                                    proposal.directive);
        report.promoted.push_back(entry_id);
    }

    // (4) Survival counters; (5) evidence-gated review of every active
    // entry. Advancing first is what lets a core entry turn anchor on the
    // cycle that completes its survival requirement.
    wisdom.advance_cycle();
    std::vector<std::string> active_ids;
    for (const WisdomEntry& entry : wisdom.entries()) {
        if (entry.status == WisdomStatus::active) active_ids.push_back(entry.id);
    }
    for (const std::string& id : active_ids) {
        report.wisdom_reviews.push_back(wisdom.review(id, engine.config().gate));
    }

    // (6) Reinforce the sources of every newly promoted pattern so the
    // next sweep cannot archive them out from under the audit trail.
    for (const Proposal& proposal : proposals) {
        for (const std::string& member : proposal.candidate->member_ids) {
            memory.reinforce(member);
        }
    }

    report.cycle_number = engine.record_cycle_completed(
        report.archived, report.promoted.size(), report.wisdom_reviews.size());
    return report;
}

std::string format_report(const CycleReport& report) {
    RecordWriter header;
    header.scalar("report", "cycle")
        .unsigned_integer("cycle", report.cycle_number)
        .unsigned_integer("archived", static_cast<std::uint64_t>(report.archived))
        .unsigned_integer("candidates", static_cast<std::uint64_t>(report.candidates.size()))
        .unsigned_integer("promoted", static_cast<std::uint64_t>(report.promoted.size()))
        .unsigned_integer("reviews", static_cast<std::uint64_t>(report.wisdom_reviews.size()));
    std::string out = header.str();
    out += '\n';
    for (const PatternCandidate& candidate : report.candidates) {
        RecordWriter w;
        w.scalar("row", "candidate")
            .text("key", candidate.pattern_key)
            .id_list("members", candidate.member_ids)
            .unsigned_integer("sessions", static_cast<std::uint64_t>(candidate.distinct_sessions.size()))
            .scalar("basis", candidate.similarity_basis == PatternCandidate::Basis::embedding
                                 ? "embedding"
                                 : "lexical_overlap")
            .text("representative", candidate.representative_content);
        out += w.str();
        out += '\n';
    }
    for (const std::string& entry_id : report.promoted) {
        RecordWriter w;
        w.scalar("row", "promoted").scalar("entry", entry_id);
        out += w.str();
        out += '\n';
    }
    for (const ReviewDecision& decision : report.wisdom_reviews) {
        RecordWriter w;
        w.scalar("row", "review")
            .scalar("entry", decision.entry_id)
            .scalar("before", std::string(to_string(decision.before)))
            .scalar("after", std::string(to_string(decision.after)))
            .unsigned_integer("promoted", decision.promoted ? 1 : 0)
            .text("rationale", decision.rationale);
        out += w.str();
        out += '\n';
    }
    return out;
}

} // namespace stratum
