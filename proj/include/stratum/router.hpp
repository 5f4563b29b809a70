#pragma once
// Intelligence-layer residue: typed query routing with a three-stage label
// fallback (explicit oracle label → classifier hook → keyword heuristic),
// ephemeral sessions that leave no trace in any store, and the flat
// undifferentiated corpus used as the experimental control condition.

#include "stratum/config.hpp"
#include "stratum/engine.hpp"
#include "stratum/hooks.hpp"
#include "stratum/retrieval.hpp"

#include <optional>
#include <string>
#include <vector>

namespace stratum {

enum class LabelSource {
    oracle,
    classifier_hook,
    heuristic,
};

std::string_view to_string(LayerLabel label);
std::string_view to_string(LabelSource source);
LayerLabel layer_label_from(std::string_view name);

struct RouteRequest {
    std::string text;
    std::optional<LayerLabel> oracle_label; // ground-truth label, when known
    std::optional<std::pair<Timestamp, Timestamp>> as_of;
};

struct RoutedQuery {
    std::string text;
    LayerLabel label = LayerLabel::knowledge;
    LabelSource label_source = LabelSource::heuristic;
    std::optional<std::pair<Timestamp, Timestamp>> as_of;
};

struct RoutedAnswer {
    std::string id;
    std::string content;
    double score = 0.0;
    LayerLabel layer = LayerLabel::knowledge;
    std::string explanation;
};

struct RouteResult {
    RoutedQuery query;
    std::vector<RoutedAnswer> answers;
};

// Keyword cascade: any temporal marker → memory; else any directive
// marker → wisdom; else knowledge. Multi-word markers match as contiguous
// token runs; everything is compared lowercase.
LayerLabel classify_heuristic(std::string_view query, const RouterLexicon& lexicon);

// True if the query contains any marker from the list.
bool contains_marker(std::string_view query, const std::vector<std::string>& markers);

// Resolve the label by the fallback chain and record where it came from.
RoutedQuery resolve_label(const RouteRequest& request, const HookSet& hooks,
                          const RouterLexicon& lexicon);

// Dispatch to the labeled layer:
//   knowledge → supersession-aware search;
//   memory    → decay-/as-of-aware recall, reordered chronologically when
//               the query carries temporal markers (oldest-first; newest-
//               first when it asks for the latest);
//   wisdom    → active directives filtered by lexical match, tier order.
RouteResult route(const RouteRequest& request, Engine& engine,
                  const std::string& memory_context_id, int k);

// The control condition: one undifferentiated lexical corpus. No decay,
// no supersession filtering, no temporal ordering — deliberately
// semantics-free.
class FlatStore {
public:
    std::string add(const std::string& text);
    void add_with_id(const std::string& id, const std::string& text);
    // lexical_rank output, verbatim.
    std::vector<ScoredItem> query(std::string_view query_text, int k) const;
    const std::vector<Doc>& docs() const { return docs_; }
    const std::string& text_of(const std::string& id) const;

private:
    std::vector<Doc> docs_;
};

// Ephemeral working state. Never persisted: dropping a session leaves
// every store byte-identical except writes explicitly issued through it.
struct Session {
    std::string id;
    std::string context_id;
    Timestamp started_at;
    std::vector<std::string> working_set; // transient scratch
};

// Process-local session ids; no event is appended anywhere.
Session make_session(Engine& engine, std::string context_id);

// Route a query within a session, accumulating answer ids in the
// session's working set.
RouteResult route_in_session(Session& session, const RouteRequest& request,
                             Engine& engine, int k);

} // namespace stratum
