// stratum — operator CLI over a substrate directory.
//
// Global flags pick the substrate (--dir, or STRATUM_DIR), the output mode
// (--output human|structured), and an optional fixed clock (--clock, unix
// milliseconds) for bit-reproducible runs. Structured mode emits one
// key=value record per line in the same format the stores log, so output
// scripts parse with the shipped record reader.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include "stratum/bench.hpp"
#include "stratum/dreamcycle.hpp"
#include "stratum/engine.hpp"
#include "stratum/errors.hpp"
#include "stratum/record.hpp"
#include "stratum/router.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace stratum;

struct CliConfig {
    std::string dir;
    std::string output = "human";
    std::optional<std::int64_t> clock_ms;
};

bool structured(const CliConfig& cli) { return cli.output == "structured"; }

std::shared_ptr<Clock> make_clock(const CliConfig& cli) {
    if (cli.clock_ms) return std::make_shared<ManualClock>(Timestamp{*cli.clock_ms});
    return nullptr; // engine default: wall clock
}

std::unique_ptr<Engine> open_engine(const CliConfig& cli) {
    if (cli.dir.empty()) {
        throw ValidationError("no substrate directory: pass --dir or set STRATUM_DIR");
    }
    return Engine::open(cli.dir, make_clock(cli));
}

// Contexts are addressed by name at the CLI surface; unknown names are
// created on first use so `observe` works without a separate setup step.
std::string context_id_by_name(Engine& engine, const std::string& name, bool create) {
    for (const Context& context : engine.memory().contexts()) {
        if (context.name == name) return context.id;
    }
    if (create) return engine.memory().create_context(name);
    throw NotFoundError("no context named " + name);
}

SourceKind source_kind_from(const std::string& word) {
    if (word == "document") return SourceKind::document;
    if (word == "conversation") return SourceKind::conversation;
    if (word == "agent") return SourceKind::agent;
    if (word == "human") return SourceKind::human;
    throw ValidationError("unknown source kind: " + word);
}

void emit(const CliConfig& cli, const std::string& human, const std::string& records) {
    std::cout << (structured(cli) ? records : human);
}

// ---- command payload rendering ------------------------------------------

std::string claim_records(const Claim& claim) {
    RecordWriter w;
    w.scalar("row", "claim")
        .scalar("id", claim.id)
        .text("statement", claim.statement)
        .scalar("status", claim.status == ClaimStatus::superseded ? "superseded" : "current")
        .time("system_created", claim.stamp.system_created)
        .time("valid_from", claim.stamp.valid_from);
    return w.str() + "\n";
}

std::string routed_records(const RouteResult& result) {
    std::string out;
    {
        RecordWriter w;
        w.scalar("row", "routed_query")
            .text("text", result.query.text)
            .scalar("label", to_string(result.query.label))
            .scalar("label_source", to_string(result.query.label_source));
        out += w.str();
        out += '\n';
    }
    for (const RoutedAnswer& answer : result.answers) {
        RecordWriter w;
        w.scalar("row", "answer")
            .scalar("id", answer.id)
            .scalar("layer", to_string(answer.layer))
            .real("score", answer.score)
            .text("content", answer.content)
            .text("explanation", answer.explanation);
        out += w.str();
        out += '\n';
    }
    return out;
}

std::string routed_human(const RouteResult& result) {
    std::string out = "label: " + std::string(to_string(result.query.label)) + " (" +
                      std::string(to_string(result.query.label_source)) + ")\n";
    if (result.answers.empty()) {
        out += "(no results)\n";
        return out;
    }
    int rank = 1;
    char buf[64];
    for (const RoutedAnswer& answer : result.answers) {
        std::snprintf(buf, sizeof buf, "%2d. %-10s %10.4f  ", rank++, answer.id.c_str(),
                      answer.score);
        out += buf;
        out += answer.content + "\n      " + answer.explanation + "\n";
    }
    return out;
}

std::string flat_results_human(const std::vector<ScoredItem>& items, const FlatStore& flat) {
    if (items.empty()) return "(no results)\n";
    std::string out;
    char buf[64];
    int rank = 1;
    for (const ScoredItem& item : items) {
        std::snprintf(buf, sizeof buf, "%2d. %-10s %10.4f  ", rank++, item.id.c_str(),
                      item.score);
        out += buf;
        out += flat.text_of(item.id) + "\n";
    }
    return out;
}

std::string flat_results_records(const std::vector<ScoredItem>& items, const FlatStore& flat) {
    std::string out;
    for (const ScoredItem& item : items) {
        RecordWriter w;
        w.scalar("row", "answer")
            .scalar("id", item.id)
            .scalar("layer", "flat")
            .real("score", item.score)
            .text("content", flat.text_of(item.id));
        out += w.str();
        out += '\n';
    }
    return out;
}

// The flat control corpus over a live substrate: every claim and
// conclusion regardless of supersession, every memory fact regardless of
// decay or archival, every wisdom entry regardless of status — one
// undifferentiated lexical index with no layer semantics at all.
FlatStore flatten(Engine& engine) {
    FlatStore flat;
    for (const Claim& claim : engine.knowledge().claims()) {
        flat.add_with_id(claim.id, claim.statement);
    }
    for (const Conclusion& conclusion : engine.knowledge().conclusions()) {
        flat.add_with_id(conclusion.id, conclusion.statement);
    }
    for (const MemoryFact& fact : engine.memory().facts()) {
        flat.add_with_id(fact.id, fact.content);
    }
    for (const WisdomEntry& entry : engine.wisdom().entries()) {
        flat.add_with_id(entry.id, entry.directive);
    }
    return flat;
}

int run(int argc, char** argv) {
    CLI::App app{"layered cognitive persistence engine"};
    app.require_subcommand(1);

    CliConfig cli;
    app.add_option("--dir", cli.dir, "substrate directory")->envname("STRATUM_DIR");
    app.add_option("--output", cli.output, "output mode")
        ->check(CLI::IsMember({"human", "structured"}))
        ->capture_default_str();
    std::int64_t clock_value = 0;
    auto* clock_opt = app.add_option("--clock", clock_value,
                                     "fixed clock (unix ms) for reproducible runs");

    // init ----------------------------------------------------------------
    auto* cmd_init = app.add_subcommand("init", "create a substrate directory");

    // ingest --------------------------------------------------------------
    auto* cmd_ingest = app.add_subcommand("ingest", "record a knowledge claim");
    std::string in_text, in_source, in_kind = "document", in_author, in_note;
    std::vector<std::string> in_entities;
    std::optional<std::int64_t> in_valid_from;
    std::optional<double> in_confidence;
    cmd_ingest->add_option("--text", in_text, "claim statement")->required();
    cmd_ingest->add_option("--source", in_source, "provenance source id")->required();
    cmd_ingest->add_option("--kind", in_kind, "source kind")
        ->check(CLI::IsMember({"document", "conversation", "agent", "human"}));
    cmd_ingest->add_option("--author", in_author, "provenance author");
    cmd_ingest->add_option("--note", in_note, "evidence note");
    cmd_ingest->add_option("--entity", in_entities, "entity reference (repeatable)");
    cmd_ingest->add_option("--valid-from", in_valid_from, "valid-time start (unix ms)");
    cmd_ingest->add_option("--confidence", in_confidence, "confidence in [0,1]");

    // observe -------------------------------------------------------------
    auto* cmd_observe = app.add_subcommand("observe", "record an episodic memory fact");
    std::string ob_text, ob_context = "default", ob_session;
    std::optional<std::int64_t> ob_valid_from;
    cmd_observe->add_option("--text", ob_text, "fact content")->required();
    cmd_observe->add_option("--context", ob_context, "context name")->capture_default_str();
    cmd_observe->add_option("--session", ob_session, "originating session id");
    cmd_observe->add_option("--valid-from", ob_valid_from, "valid-time start (unix ms)");

    // propose -------------------------------------------------------------
    auto* cmd_propose = app.add_subcommand("propose", "propose a wisdom directive");
    std::string pr_directive, pr_episode, pr_session, pr_source, pr_note;
    cmd_propose->add_option("--directive", pr_directive, "directive text")->required();
    cmd_propose->add_option("--episode", pr_episode, "supporting episode ref")->required();
    cmd_propose->add_option("--session", pr_session, "originating session id")->required();
    cmd_propose->add_option("--source", pr_source, "provenance source id")->required();
    cmd_propose->add_option("--note", pr_note, "evidence note");

    // query ---------------------------------------------------------------
    auto* cmd_query = app.add_subcommand("query", "query one layer or route automatically");
    std::string q_text, q_layer = "auto", q_context;
    int q_k = 5;
    std::optional<std::int64_t> q_as_of_system, q_as_of_valid;
    cmd_query->add_option("text", q_text, "query text")->required();
    cmd_query->add_option("--layer", q_layer, "target layer")
        ->check(CLI::IsMember({"auto", "knowledge", "memory", "wisdom", "flat"}))
        ->capture_default_str();
    cmd_query->add_option("--context", q_context, "memory context name");
    cmd_query->add_option("--k", q_k, "result count")->capture_default_str();
    cmd_query->add_option("--as-of-system", q_as_of_system, "system time (unix ms)");
    cmd_query->add_option("--as-of-valid", q_as_of_valid, "valid time (unix ms)");

    // supersede -----------------------------------------------------------
    auto* cmd_supersede = app.add_subcommand("supersede", "mark a claim improved-upon");
    std::string su_old, su_new, su_reason = "superseded";
    bool su_conclusion = false;
    cmd_supersede->add_option("--old", su_old, "superseded id")->required();
    cmd_supersede->add_option("--new", su_new, "superseding id")->required();
    cmd_supersede->add_option("--reason", su_reason, "reason")->capture_default_str();
    cmd_supersede->add_flag("--conclusion", su_conclusion, "ids are conclusions");

    // reinforce -----------------------------------------------------------
    auto* cmd_reinforce = app.add_subcommand("reinforce", "reinforce a memory fact");
    std::string re_id;
    cmd_reinforce->add_option("--id", re_id, "memory fact id")->required();

    // due -----------------------------------------------------------------
    auto* cmd_due = app.add_subcommand("due", "list due prospective intentions");
    std::optional<std::int64_t> due_now;
    cmd_due->add_option("--now", due_now, "evaluate at this time (unix ms)");

    // preload -------------------------------------------------------------
    auto* cmd_preload =
        app.add_subcommand("preload", "emit active directives as a plain-text block");
    std::string pl_context;
    cmd_preload->add_option("--context", pl_context, "filter by provenance source");

    // consolidate ---------------------------------------------------------
    auto* cmd_consolidate =
        app.add_subcommand("consolidate", "run one offline consolidation cycle");

    // sweep ---------------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "archive memories below the recall floor");
    std::string sw_context;
    cmd_sweep->add_option("--context", sw_context, "restrict to one context name");

    // stats ---------------------------------------------------------------
    auto* cmd_stats = app.add_subcommand("stats", "store counts and log position");

    // bench ---------------------------------------------------------------
    auto* cmd_bench = app.add_subcommand("bench", "run the routing experiment");
    std::uint64_t be_seed = 42;
    std::string be_out;
    cmd_bench->add_option("--seed", be_seed, "corpus seed")->capture_default_str();
    cmd_bench->add_option("--out", be_out, "write the structured report to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (clock_opt->count() > 0) cli.clock_ms = clock_value;

    try {
        if (cmd_init->parsed()) {
            if (cli.dir.empty()) {
                throw ValidationError("no substrate directory: pass --dir or set STRATUM_DIR");
            }
            auto engine = Engine::init(cli.dir, {}, make_clock(cli));
            RecordWriter w;
            w.scalar("row", "init").text("dir", cli.dir);
            emit(cli, "initialized substrate at " + cli.dir + "\n", w.str() + "\n");
            return 0;
        }
        if (cmd_bench->parsed()) {
            CorpusParams params;
            params.seed = be_seed;
            const BenchReport report = run_bench(params);
            const std::string records = format_bench_report(report);
            if (!be_out.empty()) {
                std::ofstream out(be_out, std::ios::binary | std::ios::trunc);
                if (!out) throw StorageError("cannot write report file: " + be_out);
                out << records;
            }
            emit(cli, human_bench_report(report), records);
            return 0;
        }

        auto engine = open_engine(cli);

        if (cmd_ingest->parsed()) {
            Provenance prov;
            prov.source_id = in_source;
            prov.source_kind = source_kind_from(in_kind);
            if (!in_author.empty()) prov.author = in_author;
            prov.asserted_at = engine->clock().now();
            if (!in_note.empty()) prov.evidence_note = in_note;
            std::optional<Timestamp> valid_from;
            if (in_valid_from) valid_from = Timestamp{*in_valid_from};
            const std::string id = engine->knowledge().ingest_claim(
                in_text, prov, in_entities, valid_from, in_confidence);
            emit(cli, "ingested " + id + "\n", claim_records(engine->knowledge().get_claim(id)));
            return 0;
        }
        if (cmd_observe->parsed()) {
            const std::string ctx = context_id_by_name(*engine, ob_context, true);
            std::optional<Timestamp> valid_from;
            if (ob_valid_from) valid_from = Timestamp{*ob_valid_from};
            std::optional<std::string> session;
            if (!ob_session.empty()) session = ob_session;
            const std::string id = engine->memory().observe(ob_text, ctx, valid_from, session);
            RecordWriter w;
            w.scalar("row", "observed").scalar("id", id).scalar("context", ctx);
            emit(cli, "observed " + id + " in " + ctx + "\n", w.str() + "\n");
            return 0;
        }
        if (cmd_propose->parsed()) {
            Provenance prov;
            prov.source_id = pr_source;
            prov.source_kind = SourceKind::agent;
            prov.asserted_at = engine->clock().now();
            if (!pr_note.empty()) prov.evidence_note = pr_note;
            const std::string id =
                engine->wisdom().propose(pr_directive, pr_episode, pr_session, prov);
            RecordWriter w;
            w.scalar("row", "proposed").scalar("id", id);
            emit(cli, "proposed " + id + "\n", w.str() + "\n");
            return 0;
        }
        if (cmd_query->parsed()) {
            if (q_layer == "flat") {
                FlatStore flat = flatten(*engine);
                const auto items = flat.query(q_text, q_k);
                emit(cli, flat_results_human(items, flat), flat_results_records(items, flat));
                return 0;
            }
            RouteRequest request;
            request.text = q_text;
            if (q_layer != "auto") request.oracle_label = layer_label_from(q_layer);
            if (q_as_of_system || q_as_of_valid) {
                const Timestamp now = engine->clock().now();
                request.as_of = {q_as_of_system ? Timestamp{*q_as_of_system} : now,
                                 q_as_of_valid ? Timestamp{*q_as_of_valid} : now};
            }
            std::string context_id;
            if (!q_context.empty()) {
                context_id = context_id_by_name(*engine, q_context, false);
            } else if (engine->memory().contexts().size() == 1) {
                context_id = engine->memory().contexts().front().id;
            } else if (request.oracle_label == LayerLabel::memory ||
                       (q_layer == "auto" &&
                        classify_heuristic(q_text, engine->config().router) ==
                            LayerLabel::memory)) {
                throw ValidationError(
                    "memory query needs --context (substrate has " +
                    std::to_string(engine->memory().contexts().size()) + " contexts)");
            }
            const RouteResult result = route(request, *engine, context_id, q_k);
            emit(cli, routed_human(result), routed_records(result));
            return 0;
        }
        if (cmd_supersede->parsed()) {
            const SupersessionLink link =
                su_conclusion ? engine->knowledge().supersede_conclusion(su_old, su_new, su_reason)
                              : engine->knowledge().supersede(su_old, su_new, su_reason);
            RecordWriter w;
            w.scalar("row", "superseded")
                .scalar("old", link.old_id)
                .scalar("new", link.new_id)
                .text("reason", link.reason);
            emit(cli, link.old_id + " superseded by " + link.new_id + "\n", w.str() + "\n");
            return 0;
        }
        if (cmd_reinforce->parsed()) {
            const double retention = engine->memory().reinforce(re_id);
            RecordWriter w;
            w.scalar("row", "reinforced").scalar("id", re_id).real("retention", retention);
            char buf[96];
            std::snprintf(buf, sizeof buf, "reinforced %s (retention now %.4f)\n", re_id.c_str(),
                          retention);
            emit(cli, buf, w.str() + "\n");
            return 0;
        }
        if (cmd_due->parsed()) {
            const Timestamp now = due_now ? Timestamp{*due_now} : engine->clock().now();
            const auto due = engine->memory().list_due(now);
            std::string human, records;
            for (const Intention* intention : due) {
                RecordWriter w;
                w.scalar("row", "due")
                    .scalar("id", intention->id)
                    .text("description", intention->description)
                    .opt_time("due_at", intention->due_at);
                records += w.str();
                records += '\n';
                char buf[64];
                std::snprintf(buf, sizeof buf, "%-10s due %lld  ", intention->id.c_str(),
                              static_cast<long long>(intention->due_at ? intention->due_at->ms
                                                                       : 0));
                human += buf + intention->description + "\n";
            }
            if (due.empty()) human = "(nothing due)\n";
            const auto next = engine->memory().next_due_time();
            {
                RecordWriter w;
                w.scalar("row", "next_due").opt_time("at", next);
                records += w.str();
                records += '\n';
            }
            if (next) {
                human += "next due at " + std::to_string(next->ms) + "\n";
            }
            emit(cli, human, records);
            return 0;
        }
        if (cmd_preload->parsed()) {
            std::optional<std::string> context;
            if (!pl_context.empty()) context = pl_context;
            std::string human, records;
            for (const WisdomEntry* entry : engine->wisdom().active_directives(context)) {
                human += "[" + std::string(to_string(entry->tier)) + "] " + entry->directive +
                         "\n";
                RecordWriter w;
                w.scalar("row", "directive")
                    .scalar("id", entry->id)
                    .scalar("tier", to_string(entry->tier))
                    .text("text", entry->directive);
                records += w.str();
                records += '\n';
            }
            if (human.empty()) human = "(no active directives)\n";
            emit(cli, human, records);
            return 0;
        }
        if (cmd_consolidate->parsed()) {
            const CycleReport report = run_cycle(*engine);
            const std::string records = format_report(report);
            char name[64];
            std::snprintf(name, sizeof name, "report.cycle.%llu",
                          static_cast<unsigned long long>(report.cycle_number));
            const std::string path = cli.dir + "/" + name;
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) throw StorageError("cannot write report file: " + path);
            out << records;
            out.close();
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "cycle %llu: archived %zu, candidates %zu, promoted %zu, reviews %zu\n"
                          "report written to %s\n",
                          static_cast<unsigned long long>(report.cycle_number), report.archived,
                          report.candidates.size(), report.promoted.size(),
                          report.wisdom_reviews.size(), path.c_str());
            emit(cli, buf, records);
            return 0;
        }
        if (cmd_sweep->parsed()) {
            std::optional<std::string> context;
            if (!sw_context.empty()) context = context_id_by_name(*engine, sw_context, false);
            const std::vector<std::string> archived = engine->memory().sweep(context);
            std::string human =
                "archived " + std::to_string(archived.size()) + " fact(s)\n";
            std::string records;
            for (const std::string& id : archived) {
                RecordWriter w;
                w.scalar("row", "archived").scalar("id", id);
                records += w.str();
                records += '\n';
                human += "  " + id + "\n";
            }
            emit(cli, human, records);
            return 0;
        }
        if (cmd_stats->parsed()) {
            const EngineStats s = engine->stats();
            RecordWriter w;
            w.scalar("row", "stats")
                .unsigned_integer("claims", s.claims)
                .unsigned_integer("current_claims", s.current_claims)
                .unsigned_integer("supersession_links", s.supersession_links)
                .unsigned_integer("entities", s.entities)
                .unsigned_integer("relationships", s.relationships)
                .unsigned_integer("conclusions", s.conclusions)
                .unsigned_integer("contexts", s.contexts)
                .unsigned_integer("memory_facts", s.memory_facts)
                .unsigned_integer("archived_facts", s.archived_facts)
                .unsigned_integer("intentions", s.intentions)
                .unsigned_integer("wisdom_entries", s.wisdom_entries)
                .unsigned_integer("active_directives", s.active_directives)
                .unsigned_integer("under_review", s.under_review)
                .unsigned_integer("retired", s.retired)
                .unsigned_integer("cycles_completed", s.cycles_completed)
                .unsigned_integer("last_seq", s.last_seq);
            char buf[512];
            std::snprintf(buf, sizeof buf,
                          "knowledge: %zu claims (%zu current), %zu links, %zu entities, "
                          "%zu relationships, %zu conclusions\n"
                          "memory:    %zu contexts, %zu facts (%zu archived), %zu intentions\n"
                          "wisdom:    %zu entries (%zu active, %zu under review, %zu retired)\n"
                          "log:       seq %llu, %llu cycles completed\n",
                          s.claims, s.current_claims, s.supersession_links, s.entities,
                          s.relationships, s.conclusions, s.contexts, s.memory_facts,
                          s.archived_facts, s.intentions, s.wisdom_entries, s.active_directives,
                          s.under_review, s.retired,
                          static_cast<unsigned long long>(s.last_seq),
                          static_cast<unsigned long long>(s.cycles_completed));
            emit(cli, buf, w.str() + "\n");
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2; // no subcommand matched (require_subcommand should prevent this)
}

} // namespace

int main(int argc, char** argv) { return run(argc, argv); }
