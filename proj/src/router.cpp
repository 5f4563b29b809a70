#include "stratum/router.hpp"

#include "stratum/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <limits>

namespace stratum {

std::string_view to_string(LayerLabel label) {
    switch (label) {
    case LayerLabel::knowledge: return "knowledge";
    case LayerLabel::memory: return "memory";
    case LayerLabel::wisdom: return "wisdom";
    }
    return "knowledge";
}

std::string_view to_string(LabelSource source) {
    switch (source) {
    case LabelSource::oracle: return "oracle";
    case LabelSource::classifier_hook: return "classifier_hook";
    case LabelSource::heuristic: return "heuristic";
    }
    return "heuristic";
}

LayerLabel layer_label_from(std::string_view name) {
    if (name == "knowledge") return LayerLabel::knowledge;
    if (name == "memory") return LayerLabel::memory;
    if (name == "wisdom") return LayerLabel::wisdom;
    throw ValidationError("unknown layer label: " + std::string(name));
}

namespace {

// Does `haystack` contain `needle` as a contiguous token run?
bool contains_token_run(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

bool has_token(const std::vector<std::string>& tokens, std::string_view word) {
    return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

} // namespace

bool contains_marker(std::string_view query, const std::vector<std::string>& markers) {
    const std::vector<std::string> query_tokens = tokenize(query);
    for (const std::string& marker : markers) {
        if (contains_token_run(query_tokens, tokenize(marker))) return true;
    }
    return false;
}

LayerLabel classify_heuristic(std::string_view query, const RouterLexicon& lexicon) {
    if (contains_marker(query, lexicon.temporal_markers)) return LayerLabel::memory;
    if (contains_marker(query, lexicon.directive_markers)) return LayerLabel::wisdom;
    return LayerLabel::knowledge;
}

RoutedQuery resolve_label(const RouteRequest& request, const HookSet& hooks,
                          const RouterLexicon& lexicon) {
    RoutedQuery routed;
    routed.text = request.text;
    routed.as_of = request.as_of;
    if (request.oracle_label) {
        routed.label = *request.oracle_label;
        routed.label_source = LabelSource::oracle;
    } else if (hooks.classifier) {
        routed.label = hooks.classifier->classify(request.text);
        routed.label_source = LabelSource::classifier_hook;
    } else {
        routed.label = classify_heuristic(request.text, lexicon);
        routed.label_source = LabelSource::heuristic;
    }
    return routed;
}

namespace {

std::vector<RoutedAnswer> answer_knowledge(const RoutedQuery& query, Engine& engine, int k) {
    std::vector<RoutedAnswer> answers;
    for (const KnowledgeHit& hit : engine.search_knowledge(query.text, k)) {
        RoutedAnswer answer;
        answer.id = hit.id;
        answer.content = hit.statement;
        answer.score = hit.score;
        answer.layer = LayerLabel::knowledge;
        answer.explanation = hit.is_conclusion ? "knowledge conclusion" : "knowledge claim";
        std::string sources;
        for (const std::string& label : hit.contributing) {
            if (!sources.empty()) sources += "+";
            sources += label;
        }
        answer.explanation += " (" + sources + ")";
        if (hit.stale_support) answer.explanation += " [stale support]";
        answers.push_back(std::move(answer));
    }
    return answers;
}

std::vector<RoutedAnswer> answer_memory(const RoutedQuery& query, Engine& engine,
                                        const std::string& context_id, int k) {
    const EngineConfig& config = engine.config();
    RecallOptions options;
    options.as_of = query.as_of;

    const bool temporal = contains_marker(query.text, config.router.temporal_markers);
    // When the query is about sequence in time, score-truncating first would
    // discard the chronological extremes the question is after — so fetch
    // every relevant fact, order by event time, and truncate afterwards.
    const int fetch = temporal ? std::numeric_limits<int>::max() : k;
    std::vector<RecalledFact> recalled = engine.recall(query.text, context_id, fetch, options);

    if (temporal) {
        const std::vector<std::string> tokens = tokenize(query.text);
        const bool newest_first = has_token(tokens, "last") || has_token(tokens, "latest");
        std::stable_sort(recalled.begin(), recalled.end(),
                         [&](const RecalledFact& a, const RecalledFact& b) {
                             const MemoryFact& fa = engine.memory().get_fact(a.id);
                             const MemoryFact& fb = engine.memory().get_fact(b.id);
                             if (fa.stamp.system_created != fb.stamp.system_created) {
                                 return newest_first
                                            ? fa.stamp.system_created > fb.stamp.system_created
                                            : fa.stamp.system_created < fb.stamp.system_created;
                             }
                             return a.id < b.id;
                         });
        if (k >= 0 && recalled.size() > static_cast<std::size_t>(k)) {
            recalled.resize(static_cast<std::size_t>(k));
        }
    }

    std::vector<RoutedAnswer> answers;
    for (const RecalledFact& fact : recalled) {
        RoutedAnswer answer;
        answer.id = fact.id;
        answer.content = fact.content;
        answer.score = fact.score;
        answer.layer = LayerLabel::memory;
        char note[96];
        std::snprintf(note, sizeof note, "memory (relevance %.4f, retention %.4f)",
                      fact.relevance, fact.retention);
        answer.explanation = note;
        answers.push_back(std::move(answer));
    }
    return answers;
}

std::vector<RoutedAnswer> answer_wisdom(const RoutedQuery& query, Engine& engine, int k) {
    const std::vector<std::string> query_tokens = tokenize(query.text);
    std::vector<RoutedAnswer> answers;
    for (const WisdomEntry* entry : engine.wisdom().active_directives()) {
        const std::vector<std::string> directive_tokens = tokenize(entry->directive);
        bool shares = false;
        for (const std::string& token : directive_tokens) {
            if (has_token(query_tokens, token)) {
                shares = true;
                break;
            }
        }
        if (!shares) continue;
        RoutedAnswer answer;
        answer.id = entry->id;
        answer.content = entry->directive;
        // Tier carries the rank; expose it as a coarse score so callers that
        // sort by score preserve the tier ordering.
        answer.score = entry->tier == WisdomTier::anchor    ? 3.0
                       : entry->tier == WisdomTier::core    ? 2.0
                                                            : 1.0;
        answer.layer = LayerLabel::wisdom;
        answer.explanation = "wisdom tier=" + std::string(to_string(entry->tier));
        answers.push_back(std::move(answer));
        if (k >= 0 && answers.size() == static_cast<std::size_t>(k)) break;
    }
    return answers;
}

} // namespace

RouteResult route(const RouteRequest& request, Engine& engine,
                  const std::string& memory_context_id, int k) {
    RouteResult result;
    result.query = resolve_label(request, engine.hooks(), engine.config().router);
    switch (result.query.label) {
    case LayerLabel::knowledge:
        result.answers = answer_knowledge(result.query, engine, k);
        break;
    case LayerLabel::memory:
        result.answers = answer_memory(result.query, engine, memory_context_id, k);
        break;
    case LayerLabel::wisdom:
        result.answers = answer_wisdom(result.query, engine, k);
        break;
    }
    return result;
}

std::string FlatStore::add(const std::string& text) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "f-%06zu", docs_.size() + 1);
    std::string id = buf;
    docs_.push_back(Doc{id, text});
    return id;
}

void FlatStore::add_with_id(const std::string& id, const std::string& text) {
    for (const Doc& doc : docs_) {
        if (doc.id == id) throw ValidationError("flat store already holds id " + id);
    }
    docs_.push_back(Doc{id, text});
}

std::vector<ScoredItem> FlatStore::query(std::string_view query_text, int k) const {
    return lexical_rank(docs_, query_text, k).items;
}

const std::string& FlatStore::text_of(const std::string& id) const {
    for (const Doc& doc : docs_) {
        if (doc.id == id) return doc.text;
    }
    throw NotFoundError("flat store has no id " + id);
}

namespace {
std::atomic<std::uint64_t> session_counter{0};
} // namespace

Session make_session(Engine& engine, std::string context_id) {
    Session session;
    char buf[16];
    std::snprintf(buf, sizeof buf, "s-%06llu",
                  static_cast<unsigned long long>(++session_counter));
    session.id = buf;
    session.context_id = std::move(context_id);
    session.started_at = engine.clock().now();
    return session;
}

RouteResult route_in_session(Session& session, const RouteRequest& request,
                             Engine& engine, int k) {
    RouteResult result = route(request, engine, session.context_id, k);
    for (const RoutedAnswer& answer : result.answers) {
        session.working_set.push_back(answer.id);
    }
    return result;
}

} // namespace stratum
