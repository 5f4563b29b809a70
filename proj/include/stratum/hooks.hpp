#pragma once
// Consumer extension seams. Every hook is optional; a null pointer selects
// a deterministic built-in fallback, so a stock engine never needs a model,
// a network, or any other ambient dependency. Hooks are invoked during the
// planning half of an operation — a throwing hook aborts the operation
// before any state or log mutation.

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stratum {

// Maps text to a fixed-dimension vector for dense recall. No default:
// absent embedder means lexical-only retrieval, not a degraded embedding.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<double> embed(std::string_view text) = 0;
    virtual std::size_t dimension() const = 0;
};

// Compresses a batch of observations into one consolidated note.
// Default: concatenate in input order, truncate to 512 bytes.
class SummaryGenerator {
public:
    virtual ~SummaryGenerator() = default;
    virtual std::string summarize(const std::vector<std::string>& texts) = 0;
};

// Judges how two claims relate to each other.
enum class ConflictVerdict {
    a_supersedes_b,
    b_supersedes_a,
    independent,
    duplicate,
};

// Default: independent for every pair (the engine only ever records
// supersessions a consumer explicitly decides on).
class ConflictArbiter {
public:
    virtual ~ConflictArbiter() = default;
    virtual ConflictVerdict arbitrate(std::string_view claim_a, std::string_view claim_b) = 0;
};

// Destination layer for a statement or query.
enum class LayerLabel {
    knowledge,
    memory,
    wisdom,
};

// Default: the keyword cascade in router.hpp (temporal markers → memory,
// directive markers → wisdom, otherwise knowledge).
class PersistenceClassifier {
public:
    virtual ~PersistenceClassifier() = default;
    virtual LayerLabel classify(std::string_view statement) = 0;
};

// Reorders a candidate list for a query. Must return a permutation of the
// input ids. Default: identity.
class Reranker {
public:
    virtual ~Reranker() = default;
    virtual std::vector<std::string> rerank(std::string_view query,
                                            const std::vector<std::string>& candidate_ids,
                                            const std::vector<std::string>& candidate_texts) = 0;
};

// One bundle threaded through the engine. Null members select defaults.
struct HookSet {
    std::shared_ptr<EmbeddingProvider> embedder;
    std::shared_ptr<SummaryGenerator> summarizer;
    std::shared_ptr<ConflictArbiter> arbiter;
    std::shared_ptr<PersistenceClassifier> classifier;
    std::shared_ptr<Reranker> reranker;
};

// Built-in summarizer fallback: join with "; ", hard-truncate to 512 bytes.
std::string default_summarize(const std::vector<std::string>& texts);

} // namespace stratum
