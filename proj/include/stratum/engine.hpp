#pragma once
// The assembled engine: one injected clock, one interleaved event log, and
// the three persistent projections (knowledge, memory, wisdom), plus the
// canonical-serialization machinery that makes replay determinism a
// testable property rather than a hope.
//
// Two modes share every code path above the sink:
//   - in_memory(): ephemeral, events retained in RAM; for tests, bench,
//     and throwaway sessions.
//   - init()/open(): a substrate directory holding substrate.log, optional
//     substrate.snap.<seq> files, a `config` file, and substrate.lock.
//     open() restores the newest valid snapshot and replays the log tail.

#include "stratum/chrono.hpp"
#include "stratum/config.hpp"
#include "stratum/hooks.hpp"
#include "stratum/knowledge.hpp"
#include "stratum/memory.hpp"
#include "stratum/storage.hpp"
#include "stratum/wisdom.hpp"

#include <memory>
#include <shared_mutex>
#include <string>

namespace stratum {

struct EngineStats {
    std::size_t claims = 0;
    std::size_t current_claims = 0;
    std::size_t supersession_links = 0;
    std::size_t entities = 0;
    std::size_t relationships = 0;
    std::size_t conclusions = 0;
    std::size_t contexts = 0;
    std::size_t memory_facts = 0;
    std::size_t archived_facts = 0;
    std::size_t intentions = 0;
    std::size_t wisdom_entries = 0;
    std::size_t active_directives = 0;
    std::size_t under_review = 0;
    std::size_t retired = 0;
    std::uint64_t cycles_completed = 0;
    std::uint64_t last_seq = 0;
};

class Engine {
public:
    // Ephemeral engine; null clock selects the wall clock.
    static std::unique_ptr<Engine> in_memory(EngineConfig config = {},
                                             std::shared_ptr<Clock> clock = nullptr,
                                             HookSet hooks = {});
    // Create a substrate directory (fresh log + config file). The directory
    // is created if missing and must not already hold a log.
    static std::unique_ptr<Engine> init(const std::string& dir,
                                        EngineConfig config = {},
                                        std::shared_ptr<Clock> clock = nullptr,
                                        HookSet hooks = {});
    // Open an existing substrate: newest valid snapshot + tail replay.
    static std::unique_ptr<Engine> open(const std::string& dir,
                                        std::shared_ptr<Clock> clock = nullptr,
                                        HookSet hooks = {});

    KnowledgeStore& knowledge() { return *knowledge_; }
    const KnowledgeStore& knowledge() const { return *knowledge_; }
    MemoryStore& memory() { return *memory_; }
    const MemoryStore& memory() const { return *memory_; }
    WisdomStore& wisdom() { return *wisdom_; }
    const WisdomStore& wisdom() const { return *wisdom_; }

    Clock& clock() { return *clock_; }
    Timestamp now() { return clock_->now(); }
    const EngineConfig& config() const { return config_; }
    const HookSet& hooks() const { return hooks_; }
    std::uint64_t last_seq() const { return sink_->last_seq(); }
    std::uint64_t cycles_completed() const { return cycles_completed_; }
    EventSink& sink() { return *sink_; }

    // Convenience wrappers that thread the engine's hooks and fusion config.
    std::vector<KnowledgeHit> search_knowledge(std::string_view query, int k,
                                               bool include_superseded = false) const;
    std::vector<RecalledFact> recall(std::string_view query,
                                     const std::string& context_id, int k,
                                     RecallOptions options = {}) const;

    // Appends the meta event closing one consolidation cycle; returns the
    // cycle number it established.
    std::uint64_t record_cycle_completed(std::size_t archived, std::size_t promoted,
                                         std::size_t reviews);

    // Apply one already-committed record to the projections (replay path;
    // does not append). Dispatches on the store tag.
    void apply_record(const LogRecord& record);

    // Whole-engine canonical serialization: store sections in fixed order,
    // one row per line, byte-stable. Equal states serialize identically.
    std::string canonical_state() const;
    std::string canonical_hash() const;

    // Write substrate.snap.<last_seq>; returns the path. Durable mode only.
    std::string write_state_snapshot();

    EngineStats stats() const;

    // Single-writer / multi-reader discipline for callers that share an
    // engine across threads. Read-only store access takes shared; mutating
    // ops take exclusive. Single-threaded callers may ignore it.
    std::shared_mutex& writer_mutex() const { return mutex_; }

private:
    Engine() = default;
    void apply_meta(const Record& event);
    void restore_state(const std::string& state);

    std::shared_ptr<Clock> clock_;
    EngineConfig config_;
    HookSet hooks_;
    std::string dir_; // empty when ephemeral
    std::unique_ptr<DirectoryLock> lock_;
    std::unique_ptr<EventSink> sink_;
    std::unique_ptr<KnowledgeStore> knowledge_;
    std::unique_ptr<MemoryStore> memory_;
    std::unique_ptr<WisdomStore> wisdom_;
    std::uint64_t cycles_completed_ = 0;
    mutable std::shared_mutex mutex_;
};

} // namespace stratum
