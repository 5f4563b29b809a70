#include "stratum/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace stratum {

namespace {

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

bool score_order(const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
}

void sort_and_truncate(std::vector<ScoredItem>& items, int k) {
    std::sort(items.begin(), items.end(), score_order);
    if (k >= 0 && items.size() > static_cast<std::size_t>(k)) {
        items.resize(static_cast<std::size_t>(k));
    }
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
        bool word = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (word) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::unordered_set<std::string> token_set(std::string_view text) {
    auto tokens = tokenize(text);
    return {tokens.begin(), tokens.end()};
}

double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& t : small) {
        if (large.count(t) != 0) ++inter;
    }
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<ScoredItem> lexical_scores(const std::vector<Doc>& corpus,
                                       std::string_view query) {
    std::vector<ScoredItem> out;
    if (corpus.empty()) return out;

    // Term frequencies per document, document lengths, and document
    // frequencies in one pass.
    std::vector<std::unordered_map<std::string, int>> tf(corpus.size());
    std::vector<double> len(corpus.size(), 0.0);
    std::unordered_map<std::string, int> df;
    double total_len = 0.0;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        auto tokens = tokenize(corpus[d].text);
        len[d] = static_cast<double>(tokens.size());
        total_len += len[d];
        for (auto& t : tokens) ++tf[d][std::move(t)];
        for (const auto& [term, count] : tf[d]) {
            (void)count;
            ++df[term];
        }
    }
    double avg_len = total_len / static_cast<double>(corpus.size());
    double n = static_cast<double>(corpus.size());

    std::unordered_set<std::string> query_terms = token_set(query);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        double score = 0.0;
        bool matched = false;
        for (const auto& term : query_terms) {
            auto it = tf[d].find(term);
            if (it == tf[d].end()) continue;
            matched = true;
            double f = static_cast<double>(it->second);
            double dfreq = static_cast<double>(df[term]);
            double idf = std::log(1.0 + (n - dfreq + 0.5) / (dfreq + 0.5));
            double norm = kBm25K1 * (1.0 - kBm25B + kBm25B * (avg_len > 0.0 ? len[d] / avg_len : 0.0));
            score += idf * (f * (kBm25K1 + 1.0)) / (f + norm);
        }
        if (matched) out.push_back({corpus[d].id, score});
    }
    return out;
}

RankedList lexical_rank(const std::vector<Doc>& corpus, std::string_view query, int k) {
    RankedList list;
    list.source_label = "lexical";
    list.items = lexical_scores(corpus, query);
    sort_and_truncate(list.items, k);
    return list;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("embedding dimension mismatch: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    }
    double dot = 0.0;
    double anorm2 = 0.0;
    double bnorm2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        anorm2 += a[i] * a[i];
        bnorm2 += b[i] * b[i];
    }
    if (anorm2 == 0.0 || bnorm2 == 0.0) return 0.0;
    return dot / (std::sqrt(anorm2) * std::sqrt(bnorm2));
}

RankedList vector_rank(const std::vector<Embedded>& embeddings,
                       const std::vector<double>& query_vector, int k) {
    RankedList list;
    list.source_label = "vector";
    for (const auto& e : embeddings) {
        if (e.vec.size() != query_vector.size()) {
            throw ValidationError("embedding dimension mismatch for " + e.id + ": " +
                                  std::to_string(e.vec.size()) + " vs " +
                                  std::to_string(query_vector.size()));
        }
        list.items.push_back({e.id, cosine(e.vec, query_vector)});
    }
    sort_and_truncate(list.items, k);
    return list;
}

RankedList rrf_fuse(const std::vector<RankedList>& lists, const FusionConfig& config) {
    // A single list needs no fusion: keep its raw scores so callers can
    // surface the underlying ranker's measure in explanations.
    if (lists.size() == 1) {
        RankedList out = lists[0];
        sort_and_truncate(out.items, -1);
        return out;
    }

    RankedList fused;
    fused.source_label = "fused";
    std::unordered_map<std::string, std::vector<double>> contributions;
    for (const auto& list : lists) {
        for (std::size_t i = 0; i < list.items.size(); ++i) {
            contributions[list.items[i].id].push_back(
                1.0 / (config.rrf_constant + static_cast<double>(i + 1)));
        }
    }
    fused.items.reserve(contributions.size());
    for (auto& [id, parts] : contributions) {
        // Summing in sorted order makes the fused score bit-identical no
        // matter how the input lists were ordered.
        std::sort(parts.begin(), parts.end());
        double score = 0.0;
        for (double part : parts) score += part;
        fused.items.push_back({id, score});
    }
    sort_and_truncate(fused.items, -1);
    return fused;
}

RankedList rerank(std::string_view query, const RankedList& candidates,
                  const std::vector<std::string>& candidate_texts,
                  const std::shared_ptr<Reranker>& hook) {
    if (!hook) return candidates;

    std::vector<std::string> ids;
    ids.reserve(candidates.items.size());
    for (const auto& item : candidates.items) ids.push_back(item.id);
    std::vector<std::string> texts = candidate_texts;
    texts.resize(ids.size());

    std::vector<std::string> order = hook->rerank(query, ids, texts);

    std::unordered_map<std::string, double> score_of;
    for (const auto& item : candidates.items) score_of[item.id] = item.score;
    if (order.size() != ids.size()) {
        throw HookError("reranker returned " + std::to_string(order.size()) +
                        " ids, expected " + std::to_string(ids.size()));
    }
    std::unordered_set<std::string> seen;
    RankedList out;
    out.source_label = candidates.source_label;
    for (const auto& id : order) {
        auto it = score_of.find(id);
        if (it == score_of.end()) throw HookError("reranker invented id " + id);
        if (!seen.insert(id).second) throw HookError("reranker duplicated id " + id);
        out.items.push_back({id, it->second});
    }
    return out;
}

} // namespace stratum
