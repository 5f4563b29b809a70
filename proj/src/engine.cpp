#include "stratum/engine.hpp"

#include <filesystem>
#include <sstream>

namespace stratum {

namespace {

void build_stores(Engine& engine, std::unique_ptr<KnowledgeStore>& knowledge,
                  std::unique_ptr<MemoryStore>& memory,
                  std::unique_ptr<WisdomStore>& wisdom, Clock& clock, EventSink& sink,
                  const EngineConfig& config) {
    (void)engine;
    knowledge = std::make_unique<KnowledgeStore>(clock, sink);
    memory = std::make_unique<MemoryStore>(clock, sink, config.decay);
    wisdom = std::make_unique<WisdomStore>(clock, sink);
}

} // namespace

std::unique_ptr<Engine> Engine::in_memory(EngineConfig config,
                                          std::shared_ptr<Clock> clock, HookSet hooks) {
    config.validate();
    auto engine = std::unique_ptr<Engine>(new Engine());
    engine->config_ = std::move(config);
    engine->clock_ = clock ? std::move(clock) : std::make_shared<SystemClock>();
    engine->hooks_ = std::move(hooks);
    engine->sink_ = std::make_unique<MemorySink>();
    build_stores(*engine, engine->knowledge_, engine->memory_, engine->wisdom_,
                 *engine->clock_, *engine->sink_, engine->config_);
    return engine;
}

std::unique_ptr<Engine> Engine::init(const std::string& dir, EngineConfig config,
                                     std::shared_ptr<Clock> clock, HookSet hooks) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create directory " + dir + ": " + ec.message());

    auto engine = std::unique_ptr<Engine>(new Engine());
    engine->dir_ = dir;
    engine->lock_ = std::make_unique<DirectoryLock>(dir);
    engine->config_ = std::move(config);
    engine->clock_ = clock ? std::move(clock) : std::make_shared<SystemClock>();
    engine->hooks_ = std::move(hooks);
    save_config_file(dir + "/config", engine->config_);
    engine->sink_ = FileLog::create(dir + "/substrate.log");
    build_stores(*engine, engine->knowledge_, engine->memory_, engine->wisdom_,
                 *engine->clock_, *engine->sink_, engine->config_);
    return engine;
}

std::unique_ptr<Engine> Engine::open(const std::string& dir,
                                     std::shared_ptr<Clock> clock, HookSet hooks) {
    auto engine = std::unique_ptr<Engine>(new Engine());
    engine->dir_ = dir;
    engine->lock_ = std::make_unique<DirectoryLock>(dir);
    engine->config_ = load_config_file(dir + "/config");
    engine->clock_ = clock ? std::move(clock) : std::make_shared<SystemClock>();
    engine->hooks_ = std::move(hooks);

    std::vector<LogRecord> tail;
    engine->sink_ = FileLog::open(dir + "/substrate.log",
                                  [&](const LogRecord& rec) { tail.push_back(rec); });
    build_stores(*engine, engine->knowledge_, engine->memory_, engine->wisdom_,
                 *engine->clock_, *engine->sink_, engine->config_);

    std::uint64_t restored_to = 0;
    if (auto snap = find_latest_snapshot(dir)) {
        SnapshotData data = read_snapshot(snap->second);
        if (data.as_of_seq <= engine->sink_->last_seq()) {
            engine->restore_state(data.state);
            restored_to = data.as_of_seq;
        }
        // A snapshot ahead of the log (log truncated or replaced) is
        // ignored; the log is the source of truth.
    }
    for (const auto& rec : tail) {
        if (rec.seq > restored_to) engine->apply_record(rec);
    }
    return engine;
}

std::vector<KnowledgeHit> Engine::search_knowledge(std::string_view query, int k,
                                                   bool include_superseded) const {
    KnowledgeSearchOptions options;
    options.include_superseded = include_superseded;
    options.fusion = config_.fusion;
    return knowledge_->search(query, k, options, hooks_);
}

std::vector<RecalledFact> Engine::recall(std::string_view query,
                                         const std::string& context_id, int k,
                                         RecallOptions options) const {
    options.fusion = config_.fusion;
    return memory_->recall(query, context_id, k, options, hooks_);
}

std::uint64_t Engine::record_cycle_completed(std::size_t archived, std::size_t promoted,
                                             std::size_t reviews) {
    std::uint64_t cycle = cycles_completed_ + 1;
    RecordWriter w;
    w.scalar("ev", "cycle_completed")
        .unsigned_integer("cycle", cycle)
        .unsigned_integer("archived", archived)
        .unsigned_integer("promoted", promoted)
        .unsigned_integer("reviews", reviews)
        .time("at", clock_->now());
    std::string body = w.str();
    sink_->append(StoreTag::meta, body);
    apply_meta(Record::parse(body));
    return cycle;
}

void Engine::apply_record(const LogRecord& record) {
    Record event = Record::parse(record.body);
    switch (record.tag) {
        case StoreTag::knowledge: knowledge_->apply(event); break;
        case StoreTag::memory: memory_->apply(event); break;
        case StoreTag::wisdom: wisdom_->apply(event); break;
        case StoreTag::meta: apply_meta(event); break;
    }
}

void Engine::apply_meta(const Record& event) {
    std::string_view kind = event.scalar("ev");
    if (kind == "cycle_completed") {
        cycles_completed_ = event.unsigned_integer("cycle");
    } else {
        throw StorageError("unknown meta event kind '" + std::string(kind) +
                           "' (log written by a newer format?)");
    }
}

std::string Engine::canonical_state() const {
    std::string out;
    out += "store=knowledge\n";
    knowledge_->serialize_state(out);
    out += "store=memory\n";
    memory_->serialize_state(out);
    out += "store=wisdom\n";
    wisdom_->serialize_state(out);
    out += "store=meta\n";
    RecordWriter w;
    w.scalar("row", "meta").unsigned_integer("cycles", cycles_completed_);
    out += w.str();
    out += "\n";
    return out;
}

std::string Engine::canonical_hash() const { return sha256_hex(canonical_state()); }

void Engine::restore_state(const std::string& state) {
    std::istringstream in(state);
    std::string line;
    StoreTag section = StoreTag::meta;
    bool in_section = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("store=", 0) == 0) {
            section = store_tag_from(line.substr(6));
            in_section = true;
            continue;
        }
        if (!in_section) throw StorageError("snapshot row before store header");
        Record row = Record::parse(line);
        switch (section) {
            case StoreTag::knowledge: knowledge_->restore_row(row); break;
            case StoreTag::memory: memory_->restore_row(row); break;
            case StoreTag::wisdom: wisdom_->restore_row(row); break;
            case StoreTag::meta:
                cycles_completed_ = row.unsigned_integer("cycles");
                break;
        }
    }
}

std::string Engine::write_state_snapshot() {
    if (dir_.empty())
        throw StorageError("ephemeral engine has no snapshot directory");
    std::string path = dir_ + "/substrate.snap." + std::to_string(last_seq());
    write_snapshot(path, last_seq(), canonical_state());
    return path;
}

EngineStats Engine::stats() const {
    EngineStats s;
    s.claims = knowledge_->claims().size();
    s.current_claims = knowledge_->current_claims().size();
    s.supersession_links =
        knowledge_->links().size() + knowledge_->conclusion_links().size();
    s.entities = knowledge_->entities().size();
    s.relationships = knowledge_->relationships().size();
    s.conclusions = knowledge_->conclusions().size();
    s.contexts = memory_->contexts().size();
    s.memory_facts = memory_->facts().size();
    for (const auto& fact : memory_->facts()) {
        if (fact.archived) ++s.archived_facts;
    }
    s.intentions = memory_->intentions().size();
    s.wisdom_entries = wisdom_->entries().size();
    for (const auto& entry : wisdom_->entries()) {
        switch (entry.status) {
            case WisdomStatus::active: ++s.active_directives; break;
            case WisdomStatus::under_review: ++s.under_review; break;
            case WisdomStatus::retired: ++s.retired; break;
        }
    }
    s.cycles_completed = cycles_completed_;
    s.last_seq = sink_->last_seq();
    return s;
}

} // namespace stratum
