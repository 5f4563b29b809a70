// Acceptance gate: eleven numbered criteria, one verdict line each, exit
// nonzero if any hard criterion fails. Every tolerance and runtime budget
// is enforced here, against independently coded oracles where the expected
// value is derivable.

#include "stratum/bench.hpp"
#include "stratum/dreamcycle.hpp"
#include "stratum/engine.hpp"
#include "stratum/errors.hpp"

#include "support/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace stratum;

namespace {

struct CriterionResult {
    int number = 0;
    std::string title;
    bool passed = false;
    bool informational = false;
    double seconds = 0.0;
    double limit_seconds = 0.0; // 0 = no budget
    std::vector<std::string> failures;
    std::string detail; // appended to the verdict line
};

struct Checker {
    CriterionResult* result;
    long checks = 0;

    void expect(bool ok, const std::string& message) {
        ++checks;
        if (!ok && result->failures.size() < 8) result->failures.push_back(message);
        if (!ok) result->passed = false;
    }
};

CriterionResult run_criterion(int number, const std::string& title, double limit_seconds,
                              const std::function<void(Checker&)>& body,
                              bool informational = false) {
    CriterionResult result;
    result.number = number;
    result.title = title;
    result.limit_seconds = limit_seconds;
    result.informational = informational;
    result.passed = true;
    Checker checker{&result};
    const auto started = std::chrono::steady_clock::now();
    try {
        body(checker);
    } catch (const std::exception& e) {
        result.passed = false;
        result.failures.push_back(std::string("unexpected exception: ") + e.what());
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (limit_seconds > 0.0 && result.seconds >= limit_seconds) {
        result.passed = false;
        result.failures.push_back("runtime budget exceeded");
    }
    return result;
}

Provenance prov(Timestamp at, const std::string& source = "doc") {
    Provenance p;
    p.source_id = source;
    p.asserted_at = at;
    return p;
}

double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

long read_vm_rss_kb() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            long kb = 0;
            std::sscanf(line.c_str(), "VmRSS: %ld kB", &kb);
            return kb;
        }
    }
    return -1;
}

int count_socket_fds() {
    namespace fs = std::filesystem;
    int sockets = 0;
    for (const auto& entry : fs::directory_iterator("/proc/self/fd")) {
        std::error_code ec;
        const fs::path target = fs::read_symlink(entry.path(), ec);
        if (!ec && target.string().rfind("socket:", 0) == 0) ++sockets;
    }
    return sockets;
}

// Shared random-operation driver for the replay-determinism criterion.
void drive_ops(Engine& engine, ManualClock& clock, std::mt19937_64& rng, int ops) {
    const std::vector<std::string> vocab = {"switch", "vlan",   "deploy", "backup",
                                            "lldp",   "uplink", "subnet", "outage"};
    auto text = [&] {
        std::string out;
        const int words = std::uniform_int_distribution<>(2, 5)(rng);
        for (int w = 0; w < words; ++w) {
            if (w) out += ' ';
            out += vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
        }
        return out;
    };
    std::vector<std::string> contexts{engine.memory().create_context("ops")};
    std::vector<std::string> facts;
    std::vector<std::string> entries;
    for (int i = 0; i < ops; ++i) {
        clock.advance(std::uniform_int_distribution<Millis>(1, 4 * kMillisPerHour)(rng));
        switch (std::uniform_int_distribution<>(0, 9)(rng)) {
        case 0:
        case 1:
            engine.knowledge().ingest_claim(text(), prov(engine.now()));
            break;
        case 2: {
            const auto current = engine.knowledge().current_claims();
            if (current.size() >= 2) {
                std::uniform_int_distribution<std::size_t> pick(0, current.size() - 1);
                const std::size_t a = pick(rng), b = pick(rng);
                if (a != b) {
                    engine.knowledge().supersede(current[a]->id, current[b]->id, "revised");
                    break;
                }
            }
            engine.knowledge().ingest_claim(text(), prov(engine.now()));
            break;
        }
        case 3:
        case 4:
            facts.push_back(engine.memory().observe(
                text(),
                contexts[std::uniform_int_distribution<std::size_t>(0, contexts.size() - 1)(rng)],
                std::nullopt,
                "s" + std::to_string(std::uniform_int_distribution<>(1, 4)(rng))));
            break;
        case 5:
            if (!facts.empty()) {
                const auto& id =
                    facts[std::uniform_int_distribution<std::size_t>(0, facts.size() - 1)(rng)];
                if (!engine.memory().get_fact(id).archived) engine.memory().reinforce(id);
            }
            break;
        case 6:
            entries.push_back(engine.wisdom().propose(text(), "ep-" + std::to_string(i), "s1",
                                                      prov(engine.now(), "ops")));
            break;
        case 7:
            if (!entries.empty()) {
                const auto& id =
                    entries[std::uniform_int_distribution<std::size_t>(0, entries.size() - 1)(rng)];
                if (engine.wisdom().get_entry(id).status == WisdomStatus::active) {
                    engine.wisdom().corroborate(
                        id, "ep-" + std::to_string(i),
                        "s" + std::to_string(std::uniform_int_distribution<>(1, 4)(rng)));
                }
            }
            break;
        case 8:
            if (std::uniform_int_distribution<>(0, 3)(rng) == 0) {
                contexts.push_back(
                    engine.memory().create_context("ctx-" + std::to_string(contexts.size())));
            }
            break;
        case 9:
            if (std::uniform_int_distribution<>(0, 5)(rng) == 0) run_cycle(engine);
            break;
        }
    }
}

// ---- criterion bodies ----------------------------------------------------

void criterion_decay_algebra(Checker& c) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<> strength(0.05, 1.0);
    std::uniform_int_distribution<Millis> horizon(1, 100 * kMillisPerDay);
    std::uniform_int_distribution<Millis> life(kMillisPerHour, 365 * kMillisPerDay);
    for (int i = 0; i < 10'000; ++i) {
        const double s0 = strength(rng);
        const Millis h = life(rng);
        // Exactly one half-life elapsed halves the strength.
        c.expect(rel_err(retention(s0, h, h), s0 / 2.0) < 1e-12,
                 "retention at one half-life != s0/2 within 1e-12");
        // Decay composes multiplicatively across split intervals.
        const Millis a = horizon(rng), b = horizon(rng);
        const double joint = retention(s0, a + b, h) * s0;
        const double split = retention(s0, a, h) * retention(s0, b, h);
        c.expect(rel_err(joint, split) < 1e-9,
                 "retention not multiplicative within 1e-9");
    }
}

void criterion_supersession(Checker& c) {
    std::mt19937_64 rng(202);
    for (int round = 0; round < 1'000; ++round) {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        std::vector<std::string> all;
        std::vector<std::pair<std::string, std::string>> links;

        const int claims = std::uniform_int_distribution<>(3, 12)(rng);
        for (int i = 0; i < claims; ++i) {
            clock->advance(1000);
            all.push_back(
                engine->knowledge().ingest_claim("claim number " + std::to_string(i),
                                                 prov(engine->now())));
        }
        const int attempts = std::uniform_int_distribution<>(3, 15)(rng);
        for (int i = 0; i < attempts; ++i) {
            clock->advance(1000);
            std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
            const std::string& old_id = all[pick(rng)];
            const std::string& new_id = all[pick(rng)];
            const bool cycle =
                old_id == new_id || oracle::path_exists(links, new_id, old_id);
            try {
                engine->knowledge().supersede(old_id, new_id, "revised");
                c.expect(!cycle, "supersession accepted a cycle-forming link");
                if (!cycle) links.emplace_back(old_id, new_id);
            } catch (const CycleError&) {
                c.expect(cycle, "supersession rejected an acyclic link");
            }
        }

        std::set<std::string> got;
        for (const Claim* claim : engine->knowledge().current_claims()) got.insert(claim->id);
        c.expect(got == oracle::current_ids({all.begin(), all.end()}, links),
                 "current_claims diverges from the set-difference oracle");
        // Superseded claims never disappear.
        for (const std::string& id : all) {
            const Claim& claim = engine->knowledge().get_claim(id);
            const bool current = got.count(id) != 0;
            c.expect((claim.status == ClaimStatus::superseded) == !current,
                     "claim status inconsistent with current set");
        }
    }
}

void criterion_bitemporal(Checker& c) {
    std::mt19937_64 rng(303);
    auto clock = std::make_shared<ManualClock>(at_ms(0));
    auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
    const std::string ctx = engine->memory().create_context("probe");
    const Millis spread = 90 * kMillisPerDay;
    std::uniform_int_distribution<Millis> jitter(0, spread);

    std::vector<BitemporalStamp> stamps;
    // Memory facts: retroactive valid-time starts, some later invalidated.
    for (int i = 0; i < 120; ++i) {
        clock->set(at_ms(jitter(rng)));
        const Timestamp created = engine->now();
        std::optional<Timestamp> valid_from;
        if (std::uniform_int_distribution<>(0, 1)(rng) == 0) {
            valid_from = at_ms(std::max<Millis>(0, created.ms - jitter(rng) / 4));
        }
        const std::string id = engine->memory().observe(
            "fact number " + std::to_string(i), ctx, valid_from, std::nullopt);
        if (std::uniform_int_distribution<>(0, 2)(rng) == 0) {
            const Timestamp from = engine->memory().get_fact(id).stamp.valid_from;
            clock->set(at_ms(created.ms + 1 + jitter(rng) / 8));
            engine->memory().invalidate(
                id, at_ms(from.ms + 1 + jitter(rng) / 8), "corrected");
        }
        stamps.push_back(engine->memory().get_fact(id).stamp);
    }
    // Knowledge claims: supersession closes both windows.
    std::vector<std::string> claim_ids;
    for (int i = 0; i < 80; ++i) {
        clock->set(at_ms(jitter(rng)));
        claim_ids.push_back(engine->knowledge().ingest_claim(
            "claim number " + std::to_string(i), prov(engine->now())));
        if (i % 2 == 1) {
            clock->set(at_ms(engine->now().ms + 1 + jitter(rng) / 8));
            engine->knowledge().supersede(claim_ids[claim_ids.size() - 2],
                                          claim_ids.back(), "revised");
        }
    }
    for (const std::string& id : claim_ids) {
        stamps.push_back(engine->knowledge().get_claim(id).stamp);
    }

    std::uniform_int_distribution<Millis> probe(-10 * kMillisPerDay, spread + 30 * kMillisPerDay);
    long mismatches = 0;
    for (const BitemporalStamp& stamp : stamps) {
        for (int p = 0; p < 2'500; ++p) {
            const Timestamp system_time = at_ms(probe(rng));
            const Timestamp valid_time = at_ms(probe(rng));
            const bool got = visible_as_of(stamp, system_time, valid_time);
            std::optional<std::int64_t> expired, until;
            if (stamp.system_expired) expired = stamp.system_expired->ms;
            if (stamp.valid_until) until = stamp.valid_until->ms;
            const bool want =
                oracle::visible(stamp.system_created.ms, expired, stamp.valid_from.ms,
                                until, system_time.ms, valid_time.ms);
            if (got != want) ++mismatches;
            ++c.checks;
        }
    }
    c.expect(mismatches == 0,
             "bi-temporal visibility mismatches: " + std::to_string(mismatches));
}

void criterion_replay(Checker& c) {
    std::mt19937_64 rng(404);
    int identical = 0;
    for (int round = 0; round < 100; ++round) {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto live = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        drive_ops(*live, *clock, rng, 500);

        const auto* sink = dynamic_cast<const MemorySink*>(&live->sink());
        if (sink == nullptr) {
            c.expect(false, "in-memory engine sink is not replayable");
            return;
        }
        auto rebuilt = Engine::in_memory(EngineConfig{},
                                         std::make_shared<ManualClock>(at_ms(0)), HookSet{});
        for (const LogRecord& record : sink->records()) rebuilt->apply_record(record);
        if (rebuilt->canonical_hash() == live->canonical_hash()) ++identical;
    }
    c.expect(identical == 100, "replayed hash matched in only " +
                                   std::to_string(identical) + "/100 runs");
}

void criterion_type_appropriate_decay(Checker& c) {
    // Knowledge: ranking is a pure function of content, immune to the clock.
    {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        std::mt19937_64 rng(505);
        const std::vector<std::string> vocab = {"switch", "vlan", "deploy", "backup",
                                                "lldp",   "uplink", "subnet"};
        for (int i = 0; i < 30; ++i) {
            std::string text;
            for (int w = 0; w < 4; ++w) {
                if (w) text += ' ';
                text += vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
            }
            engine->knowledge().ingest_claim(text, prov(engine->now()));
        }
        const std::vector<std::string> queries = {"deploy backup", "vlan uplink switch",
                                                  "lldp", "subnet outage deploy"};
        std::vector<std::vector<std::pair<std::string, double>>> before;
        for (const std::string& q : queries) {
            std::vector<std::pair<std::string, double>> ranking;
            for (const KnowledgeHit& hit : engine->search_knowledge(q, 10)) {
                ranking.emplace_back(hit.id, hit.score);
            }
            before.push_back(std::move(ranking));
        }
        clock->advance(365 * kMillisPerDay);
        for (std::size_t qi = 0; qi < queries.size(); ++qi) {
            std::vector<std::pair<std::string, double>> after;
            for (const KnowledgeHit& hit : engine->search_knowledge(queries[qi], 10)) {
                after.emplace_back(hit.id, hit.score);
            }
            c.expect(after == before[qi],
                     "knowledge ranking changed under a 365-day clock advance");
        }
    }
    // Memory: retrievability only ever falls without reinforcement.
    {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        const std::string ctx = engine->memory().create_context("ops");
        const std::string id = engine->memory().observe("deploy went fine", ctx);
        double previous = engine->memory().retrievability(id, engine->now());
        c.expect(previous == 1.0, "fresh fact does not start at full strength");
        for (int day = 1; day <= 60; ++day) {
            const double now_value =
                engine->memory().retrievability(id, at_ms(day * kMillisPerDay));
            c.expect(now_value < previous,
                     "retrievability failed to decrease between probes");
            previous = now_value;
        }
    }
    // Wisdom: tier moves on evidence, never on elapsed time.
    {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        auto& wisdom = engine->wisdom();
        const GateConfig& gate = engine->config().gate;

        const std::string prediction =
            wisdom.propose("prefer canary deploys", "ep-1", "s1", prov(engine->now(), "ops"));
        const std::string core =
            wisdom.propose("always snapshot first", "ep-2", "s1", prov(engine->now(), "ops"));
        wisdom.corroborate(core, "ep-3", "s2");
        wisdom.corroborate(core, "ep-4", "s3");
        wisdom.review(core, gate);
        const std::string anchor =
            wisdom.propose("never skip the checklist", "ep-5", "s1", prov(engine->now(), "ops"));
        wisdom.corroborate(anchor, "ep-6", "s2");
        wisdom.corroborate(anchor, "ep-7", "s3");
        wisdom.review(anchor, gate);
        for (int i = 0; i < 10; ++i) wisdom.advance_cycle();
        wisdom.review(anchor, gate);

        c.expect(wisdom.get_entry(prediction).tier == WisdomTier::prediction, "setup");
        c.expect(wisdom.get_entry(core).tier == WisdomTier::core, "setup");
        c.expect(wisdom.get_entry(anchor).tier == WisdomTier::anchor, "setup");

        clock->advance(365 * kMillisPerDay);
        c.expect(wisdom.get_entry(prediction).tier == WisdomTier::prediction,
                 "prediction tier moved under clock advance");
        c.expect(wisdom.get_entry(core).tier == WisdomTier::core,
                 "core tier moved under clock advance");
        c.expect(wisdom.get_entry(anchor).tier == WisdomTier::anchor,
                 "anchor tier moved under clock advance");
        // A review a year later, with no new evidence, changes nothing.
        c.expect(!wisdom.review(prediction, gate).promoted,
                 "review promoted on elapsed time alone");
        c.expect(wisdom.get_entry(prediction).tier == WisdomTier::prediction,
                 "review moved a tier on elapsed time alone");
    }
}

void criterion_wisdom_gate(Checker& c) {
    const GateConfig gate;
    // Exhaustive predicate table: 6 session counts x 3 contradiction
    // counts x 13 cycle counts x both promotable tiers = 468 states.
    for (int sessions = 0; sessions <= 5; ++sessions) {
        for (int contradictions = 0; contradictions <= 2; ++contradictions) {
            for (int cycles = 0; cycles <= 12; ++cycles) {
                for (WisdomTier tier : {WisdomTier::prediction, WisdomTier::core}) {
                    EvidenceLedger ev;
                    for (int s = 0; s < sessions; ++s)
                        ev.session_ids.insert("s" + std::to_string(s));
                    ev.contradiction_count = contradictions;
                    ev.cycles_survived = cycles;
                    const auto got =
                        promotion_target(tier, WisdomStatus::active, ev, gate);
                    const auto want = oracle::promotion(
                        std::string(to_string(tier)), true, ev.session_ids.size(),
                        contradictions, cycles, gate.core_min_sessions,
                        gate.anchor_min_cycles);
                    const bool match =
                        (got.has_value() == want.has_value()) &&
                        (!got || std::string(to_string(*got)) == *want);
                    c.expect(match, "gate decision diverges from the predicate oracle");
                }
            }
        }
    }
    // A flood of corroboration inside one session never promotes.
    auto clock = std::make_shared<ManualClock>(at_ms(0));
    auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
    const std::string id = engine->wisdom().propose("always canary first", "ep-0", "s1",
                                                    prov(engine->now(), "ops"));
    for (int i = 1; i <= 200; ++i) {
        engine->wisdom().corroborate(id, "ep-" + std::to_string(i), "s1");
        const ReviewDecision decision = engine->wisdom().review(id, engine->config().gate);
        c.expect(!decision.promoted, "single-session flood promoted");
    }
    c.expect(engine->wisdom().get_entry(id).tier == WisdomTier::prediction,
             "single-session flood changed the tier");
}

void criterion_prospective(Checker& c) {
    struct Mirror {
        std::string id;
        TriggerKind trigger;
        std::optional<Timestamp> due;
        std::optional<std::string> tag;
        IntentionStatus status = IntentionStatus::pending;
    };
    std::mt19937_64 rng(707);
    while (c.checks < 10'000) {
        auto clock = std::make_shared<ManualClock>(at_ms(0));
        auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
        const std::string ctx = engine->memory().create_context("ops");
        std::vector<Mirror> mirror;
        const std::vector<std::string> tags = {"deploy", "backup", "audit"};

        const int ops = std::uniform_int_distribution<>(30, 60)(rng);
        for (int i = 0; i < ops; ++i) {
            const int action = std::uniform_int_distribution<>(0, 9)(rng);
            if (action <= 4) { // schedule
                Mirror m;
                if (std::uniform_int_distribution<>(0, 1)(rng) == 0) {
                    m.trigger = TriggerKind::time_based;
                    m.due = at_ms(std::uniform_int_distribution<Millis>(
                        0, 30 * kMillisPerDay)(rng));
                    m.id = engine->memory().schedule_intention(
                        "todo " + std::to_string(i), m.trigger, m.due, std::nullopt, ctx);
                } else {
                    m.trigger = TriggerKind::event_based;
                    m.tag = tags[std::uniform_int_distribution<std::size_t>(
                        0, tags.size() - 1)(rng)];
                    m.id = engine->memory().schedule_intention(
                        "todo " + std::to_string(i), m.trigger, std::nullopt, m.tag, ctx);
                }
                mirror.push_back(std::move(m));
            } else if (action == 5 && !mirror.empty()) { // surface or complete
                Mirror& m = mirror[std::uniform_int_distribution<std::size_t>(
                    0, mirror.size() - 1)(rng)];
                if (m.status == IntentionStatus::pending &&
                    std::uniform_int_distribution<>(0, 1)(rng) == 0) {
                    engine->memory().mark_surfaced(m.id);
                    m.status = IntentionStatus::surfaced;
                } else if (m.status == IntentionStatus::pending ||
                           m.status == IntentionStatus::surfaced) {
                    engine->memory().mark_completed(m.id);
                    m.status = IntentionStatus::completed;
                }
            } else if (action == 6) { // fire an event trigger
                const std::string tag = tags[std::uniform_int_distribution<std::size_t>(
                    0, tags.size() - 1)(rng)];
                std::set<std::string> want;
                for (Mirror& m : mirror) {
                    if (m.status == IntentionStatus::pending &&
                        m.trigger == TriggerKind::event_based && m.tag == tag) {
                        want.insert(m.id);
                        m.status = IntentionStatus::surfaced;
                    }
                }
                std::set<std::string> got;
                for (const Intention* intention : engine->memory().trigger_event(tag)) {
                    got.insert(intention->id);
                }
                c.expect(got == want, "event trigger surfaced the wrong set");
            } else { // probe
                const Timestamp now =
                    at_ms(std::uniform_int_distribution<Millis>(0, 30 * kMillisPerDay)(rng));
                std::set<std::string> want;
                std::optional<Timestamp> want_next;
                for (const Mirror& m : mirror) {
                    if (m.status != IntentionStatus::pending ||
                        m.trigger != TriggerKind::time_based)
                        continue;
                    if (m.due->ms <= now.ms) want.insert(m.id);
                    if (!want_next || m.due->ms < want_next->ms) want_next = m.due;
                }
                std::set<std::string> got;
                for (const Intention* intention : engine->memory().list_due(now)) {
                    got.insert(intention->id);
                }
                c.expect(got == want, "list_due returned the wrong set");
                const auto got_next = engine->memory().next_due_time();
                c.expect(got_next.has_value() == want_next.has_value() &&
                             (!got_next || got_next->ms == want_next->ms),
                         "next_due_time is not the minimum pending due time");
            }
        }
    }
}

void criterion_dreamcycle_closure(Checker& c) {
    auto clock = std::make_shared<ManualClock>(at_ms(0));
    auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
    const std::string ctx = engine->memory().create_context("ops");
    std::set<std::string> sources;
    for (int s = 1; s <= 3; ++s) {
        sources.insert(engine->memory().observe("verify the backup before any upgrade",
                                                ctx, std::nullopt,
                                                "s" + std::to_string(s)));
        clock->advance(kMillisPerHour);
    }

    const CycleReport first = run_cycle(*engine);
    c.expect(first.promoted.size() == 1, "first cycle did not promote exactly one entry");
    if (first.promoted.size() == 1) {
        const WisdomEntry& entry = engine->wisdom().get_entry(first.promoted[0]);
        c.expect(entry.tier == WisdomTier::core,
                 "promoted entry did not reach core in the same cycle");
        c.expect(entry.evidence.episode_refs == sources,
                 "episode refs do not resolve to the three source events");
        for (const std::string& ref : entry.evidence.episode_refs) {
            c.expect(engine->memory().get_fact(ref).id == ref,
                     "episode ref does not resolve to a stored fact");
        }
    }
    const CycleReport second = run_cycle(*engine);
    c.expect(second.promoted.empty(), "second cycle at the same state promoted again");
    c.expect(second.cycle_number == 2, "cycle numbering did not advance");
}

void criterion_bench(Checker& c) {
    // The documented oracle spot value first.
    c.expect(rel_err(mcnemar_exact(8, 1), 0.0390625) < 1e-12,
             "mcnemar_exact(8,1) is not 0.0390625 within 1e-12");
    c.expect(rel_err(mcnemar_exact(8, 1), oracle::mcnemar(8, 1)) < 1e-12,
             "mcnemar_exact(8,1) diverges from the binomial oracle");

    const BenchReport report = run_bench(CorpusParams{});
    c.expect(report.seed == 42, "default seed is not 42");
    c.expect(report.n_cases == 80, "default corpus is not 80 cases");
    c.expect(report.n_contradiction == 40 && report.n_temporal == 40,
             "default corpus is not a 40/40 category split");
    c.expect(report.typed_oracle.contradiction == 1.0,
             "typed_oracle contradiction accuracy is not 1.0");
    c.expect(report.typed_oracle.overall >= report.flat.overall,
             "typed_oracle fell below the flat control");
    c.expect(report.typed_heuristic.overall <= report.typed_oracle.overall,
             "keyword heuristic beat the oracle labels");
    if (report.discordant_b + report.discordant_c > 0) {
        c.expect(rel_err(report.mcnemar_p,
                         oracle::mcnemar(report.discordant_b, report.discordant_c)) < 1e-12,
                 "reported McNemar p diverges from the binomial oracle");
    }
}

void criterion_offline(Checker& c) {
    // Criteria 1-9 above ran in this process with every hook slot null —
    // no embedder, summarizer, classifier, arbiter, or reranker was ever
    // installed. The remaining check is that nothing opened a network
    // endpoint: scan this process's descriptor table for sockets.
    const int sockets = count_socket_fds();
    c.expect(sockets == 0,
             "open socket descriptors found: " + std::to_string(sockets));
}

void criterion_footprint(Checker& c, std::string& detail) {
    const long before_kb = read_vm_rss_kb();
    auto clock = std::make_shared<ManualClock>(at_ms(0));
    auto engine = Engine::in_memory(EngineConfig{}, clock, HookSet{});
    const std::string ctx = engine->memory().create_context("bulk");
    for (int i = 0; i < 10'000; ++i) {
        engine->memory().observe("recorded detail number " + std::to_string(i), ctx,
                                 std::nullopt, "s" + std::to_string(i % 7));
        if (i % 100 == 99) clock->advance(kMillisPerHour);
    }
    const long after_kb = read_vm_rss_kb();
    c.expect(engine->stats().memory_facts == 10'000, "population failed");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "RSS %+.1f MB for 10k facts (%.1f -> %.1f MB); reference point 5 MB",
                  (after_kb - before_kb) / 1024.0, before_kb / 1024.0, after_kb / 1024.0);
    detail = buf;
}

} // namespace

int main() {
    std::vector<CriterionResult> results;

    results.push_back(run_criterion(
        1, "decay algebra: exact half-life point, multiplicative composition", 1.0,
        criterion_decay_algebra));
    results.push_back(run_criterion(
        2, "supersession: 1000 random link sequences vs set-difference oracle", 10.0,
        criterion_supersession));
    results.push_back(run_criterion(
        3, "bi-temporal visibility: 200 facts x 2500 probes vs four-clause oracle", 10.0,
        criterion_bitemporal));
    results.push_back(run_criterion(
        4, "replay determinism: 100 random 500-op histories, hash equality", 0.0,
        criterion_replay));
    results.push_back(run_criterion(
        5, "type-appropriate decay: knowledge clock-invariant, memory monotone, wisdom evidence-only",
        0.0, criterion_type_appropriate_decay));
    results.push_back(run_criterion(
        6, "wisdom gate: 468-state truth table, single-session floods never promote", 0.0,
        criterion_wisdom_gate));
    results.push_back(run_criterion(
        7, "prospective memory: due lists, next-due, event triggers over random schedules",
        0.0, criterion_prospective));
    results.push_back(run_criterion(
        8, "consolidation closure: 3 observations -> one core entry, rerun promotes nothing",
        0.0, criterion_dreamcycle_closure));
    results.push_back(run_criterion(
        9, "bench directionality and exact statistics at seed 42", 60.0, criterion_bench));
    results.push_back(run_criterion(10, "offline: all hooks null, no socket descriptors",
                                    0.0, criterion_offline));

    {
        CriterionResult footprint;
        footprint.number = 11;
        footprint.title = "footprint with 10,000 facts (informational, not a gate)";
        footprint.informational = true;
        footprint.passed = true;
        Checker checker{&footprint};
        const auto started = std::chrono::steady_clock::now();
        try {
            criterion_footprint(checker, footprint.detail);
        } catch (const std::exception& e) {
            footprint.failures.push_back(std::string("unexpected exception: ") + e.what());
        }
        footprint.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                .count();
        results.push_back(std::move(footprint));
    }

    bool hard_failure = false;
    for (const CriterionResult& result : results) {
        const char* verdict = result.informational ? "INFO"
                              : result.passed      ? "PASS"
                                                   : "FAIL";
        std::printf("%s  %2d  %s", verdict, result.number, result.title.c_str());
        if (!result.detail.empty()) std::printf("  [%s]", result.detail.c_str());
        if (result.limit_seconds > 0.0) {
            std::printf("  (%.2fs, budget %.0fs)", result.seconds, result.limit_seconds);
        } else {
            std::printf("  (%.2fs)", result.seconds);
        }
        std::printf("\n");
        for (const std::string& failure : result.failures) {
            std::printf("          - %s\n", failure.c_str());
        }
        if (!result.passed && !result.informational) hard_failure = true;
    }
    std::printf("%s\n", hard_failure ? "acceptance: FAIL" : "acceptance: PASS");
    return hard_failure ? 1 : 0;
}
