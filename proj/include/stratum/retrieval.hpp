#pragma once
// Shared ranking machinery: lexical scoring, exact vector scoring, rank
// fusion, and the stage-2 rerank seam. Pure functions over immutable
// snapshots; safe for unrestricted concurrent use.

#include "stratum/errors.hpp"
#include "stratum/hooks.hpp"

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace stratum {

struct ScoredItem {
    std::string id;
    double score = 0.0;
};

// Ordered by score desc, then id asc. source_label names the producing
// ranker for fusion explanations.
struct RankedList {
    std::vector<ScoredItem> items;
    std::string source_label;
};

struct FusionConfig {
    double rrf_constant = 60.0;
    int lists_required = 1;
};

struct Doc {
    std::string id;
    std::string text;
};

// Lowercase a-z0-9 runs; every other byte is a separator. No stemming, no
// stopwords — bit-exact across platforms matters more than recall here.
std::vector<std::string> tokenize(std::string_view text);
std::unordered_set<std::string> token_set(std::string_view text);

// |A ∩ B| / |A ∪ B|; 1.0 when both sets are empty.
double jaccard(const std::unordered_set<std::string>& a,
               const std::unordered_set<std::string>& b);

// BM25 with k1=1.2, b=0.75 and the smoothed idf
//   idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5))
// summed over unique query terms. Documents matching no query term are
// omitted. Deterministic: score desc, id asc.
RankedList lexical_rank(const std::vector<Doc>& corpus, std::string_view query, int k);

// Per-document BM25 scores against the given corpus (same formula as
// lexical_rank), for callers that combine relevance with other factors.
// Only documents with a positive-scoring query term appear.
std::vector<ScoredItem> lexical_scores(const std::vector<Doc>& corpus,
                                       std::string_view query);

struct Embedded {
    std::string id;
    std::vector<double> vec;
};

// Cosine of two vectors; 0 when either has zero norm. Dimension mismatch
// is a contract violation.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

// Exact cosine full scan. All vectors must share the query's dimension.
// Zero-norm vectors score 0.
RankedList vector_rank(const std::vector<Embedded>& embeddings,
                       const std::vector<double>& query_vector, int k);

// Reciprocal-rank fusion: fused(d) = sum over lists containing d of
// 1/(k0 + rank_d), ranks starting at 1. Permutation-invariant in list
// order; ties broken by id.
RankedList rrf_fuse(const std::vector<RankedList>& lists, const FusionConfig& config);

// Stage-2 rerank. Null hook is the identity. A hook must return a
// permutation of the candidate ids; anything else is a contract violation.
// candidate_texts is parallel to candidates.items (empty = no texts known).
RankedList rerank(std::string_view query, const RankedList& candidates,
                  const std::vector<std::string>& candidate_texts,
                  const std::shared_ptr<Reranker>& hook);

} // namespace stratum
