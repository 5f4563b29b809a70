#include "stratum/bench.hpp"

#include "stratum/engine.hpp"
#include "stratum/errors.hpp"
#include "stratum/record.hpp"
#include "stratum/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

namespace stratum {

std::string_view to_string(BenchCategory category) {
    return category == BenchCategory::contradiction_resolution ? "contradiction_resolution"
                                                               : "temporal_reasoning";
}

std::string_view to_string(BenchCondition condition) {
    switch (condition) {
    case BenchCondition::typed_oracle: return "typed_oracle";
    case BenchCondition::typed_heuristic: return "typed_heuristic";
    case BenchCondition::flat: return "flat";
    }
    return "typed_oracle";
}

namespace {

// 2026-01-01T00:00:00Z.
constexpr Millis kCorpusBase = 1'767'225'600'000;

// Attribute slots claims are written against; plain English on purpose so
// generated questions read like questions.
const std::vector<std::string> kAttributes = {
    "codename", "budget", "deadline", "mascot", "venue", "sponsor", "cadence", "motto",
};

// Every fixed word that can appear in a claim, observation, or question.
// Generated words are checked against these (and each other) for substring
// collisions, which is what keeps the substring scorer honest.
const std::vector<std::string> kFixedWords = {
    "the", "of", "project", "is", "user", "mentioned", "what", "which",
    "did", "they", "mention", "first", "last", "after", "update",
};

// Deterministic pseudoword vocabulary: alternating consonant/vowel at a
// fixed length per role, rejected unless substring-free against every word
// already in the corpus (both directions).
class Vocabulary {
public:
    Vocabulary() {
        for (const std::string& w : kAttributes) words_.insert(w);
        for (const std::string& w : kFixedWords) words_.insert(w);
    }

    std::string draw(SplitMix64& rng, int length) {
        static const std::string consonants = "bcdfghjklmnpqrstvwxz";
        static const std::string vowels = "aeiou";
        for (int attempt = 0; attempt < 10'000; ++attempt) {
            std::string w;
            w.reserve(static_cast<std::size_t>(length));
            for (int i = 0; i < length; ++i) {
                if (i % 2 == 0) {
                    w += consonants[rng.next_index(consonants.size())];
                } else {
                    w += vowels[rng.next_index(vowels.size())];
                }
            }
            if (clean(w)) {
                words_.insert(w);
                return w;
            }
        }
        throw ValidationError("vocabulary generation failed to find a substring-free word");
    }

    const std::set<std::string>& words() const { return words_; }

private:
    bool clean(const std::string& w) const {
        for (const std::string& v : words_) {
            if (v.find(w) != std::string::npos || w.find(v) != std::string::npos) return false;
        }
        return true;
    }

    std::set<std::string> words_;
};

std::string lowercased(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    return lowercased(haystack).find(lowercased(needle)) != std::string::npos;
}

void validate_params(const CorpusParams& params) {
    if (params.n_conversations < 1)
        throw ValidationError("n_conversations must be >= 1");
    if (params.questions_per < 2 || params.questions_per % 2 != 0)
        throw ValidationError("questions_per must be even and >= 2");
    if (params.questions_per / 2 > static_cast<int>(kAttributes.size()))
        throw ValidationError("questions_per/2 exceeds the attribute pool");
    if (params.events_per_sequence < 2)
        throw ValidationError("events_per_sequence must be >= 2");
    if (params.conversation_spacing <= 0 || params.turn_spacing <= 0)
        throw ValidationError("spacings must be positive");
}

} // namespace

BenchCorpus generate_corpus(const CorpusParams& params) {
    validate_params(params);
    SplitMix64 rng(params.seed);
    Vocabulary vocab;
    BenchCorpus corpus;

    const int per_category = params.questions_per / 2;
    int contradiction_counter = 0;

    for (int i = 0; i < params.n_conversations; ++i) {
        BenchConversation conv;
        char cid[24];
        std::snprintf(cid, sizeof cid, "conv-%03d", i + 1);
        conv.id = cid;
        const Timestamp start{kCorpusBase +
                              static_cast<Millis>(i) * params.conversation_spacing};
        auto turn_at = [&](int j) {
            return Timestamp{start.ms + static_cast<Millis>(j) * params.turn_spacing};
        };

        const std::string project = vocab.draw(rng, 8);

        struct Chain {
            std::string attr, v1, v2;
            int v1_turn = -1, v2_turn = -1;
        };
        struct Sequence {
            std::string topic;
            std::vector<std::string> details;
            std::vector<int> event_turns;
        };
        std::vector<Chain> chains(static_cast<std::size_t>(per_category));
        std::vector<Sequence> sequences(static_cast<std::size_t>(per_category));

        // Timeline: the v1 claims, then the event sequences, then the v2
        // claims that supersede the v1s — the contradiction arrives later,
        // as it does in a real conversation.
        for (int qc = 0; qc < per_category; ++qc) {
            Chain& chain = chains[static_cast<std::size_t>(qc)];
            chain.attr = kAttributes[static_cast<std::size_t>((i + qc) %
                                                              static_cast<int>(kAttributes.size()))];
            chain.v1 = vocab.draw(rng, 5);
            chain.v2 = vocab.draw(rng, 5);
            BenchTurn turn;
            turn.kind = BenchTurn::Kind::claim;
            turn.text = "the " + chain.attr + " of project " + project + " is " + chain.v1;
            turn.at = turn_at(static_cast<int>(conv.turns.size()));
            chain.v1_turn = static_cast<int>(conv.turns.size());
            conv.turns.push_back(std::move(turn));
        }
        for (int qt = 0; qt < per_category; ++qt) {
            Sequence& seq = sequences[static_cast<std::size_t>(qt)];
            seq.topic = vocab.draw(rng, 6);
            for (int e = 0; e < params.events_per_sequence; ++e) {
                seq.details.push_back(vocab.draw(rng, 7));
                BenchTurn turn;
                turn.kind = BenchTurn::Kind::observation;
                turn.text = "user mentioned " + seq.topic + " " + seq.details.back();
                turn.at = turn_at(static_cast<int>(conv.turns.size()));
                seq.event_turns.push_back(static_cast<int>(conv.turns.size()));
                conv.turns.push_back(std::move(turn));
            }
        }
        for (int qc = 0; qc < per_category; ++qc) {
            Chain& chain = chains[static_cast<std::size_t>(qc)];
            BenchTurn turn;
            turn.kind = BenchTurn::Kind::claim;
            turn.text = "the " + chain.attr + " of project " + project + " is " + chain.v2;
            turn.at = turn_at(static_cast<int>(conv.turns.size()));
            turn.supersedes = chain.v1_turn;
            chain.v2_turn = static_cast<int>(conv.turns.size());
            conv.turns.push_back(std::move(turn));
        }

        for (int qc = 0; qc < per_category; ++qc) {
            const Chain& chain = chains[static_cast<std::size_t>(qc)];
            BenchCase c;
            c.conversation_id = conv.id;
            c.category = BenchCategory::contradiction_resolution;
            c.oracle_label = LayerLabel::knowledge;
            c.heuristic_trap = params.trap_interval > 0 &&
                               contradiction_counter % params.trap_interval == 0;
            ++contradiction_counter;
            const std::string body =
                "what is the " + chain.attr + " of project " + project;
            c.question = c.heuristic_trap ? "after the update " + body : body;
            c.gold_answer = chain.v2;
            c.turns.push_back(conv.turns[static_cast<std::size_t>(chain.v1_turn)]);
            c.turns.push_back(conv.turns[static_cast<std::size_t>(chain.v2_turn)]);
            corpus.cases.push_back(std::move(c));
        }
        for (int qt = 0; qt < per_category; ++qt) {
            const Sequence& seq = sequences[static_cast<std::size_t>(qt)];
            const bool first = qt % 2 == 0;
            BenchCase c;
            c.conversation_id = conv.id;
            c.category = BenchCategory::temporal_reasoning;
            c.oracle_label = LayerLabel::memory;
            c.question = "which " + seq.topic + " did they mention " +
                         (first ? "first" : "last");
            c.gold_answer = first ? seq.details.front() : seq.details.back();
            for (int turn_index : seq.event_turns) {
                c.turns.push_back(conv.turns[static_cast<std::size_t>(turn_index)]);
            }
            corpus.cases.push_back(std::move(c));
        }

        corpus.conversations.push_back(std::move(conv));
    }

    corpus.query_time =
        Timestamp{corpus.conversations.back().turns.back().at.ms + kMillisPerHour};

    // Scorer-integrity assertion: no gold answer occurs inside any other
    // corpus word, so a substring hit always means the right word.
    for (const BenchCase& c : corpus.cases) {
        for (const std::string& w : vocab.words()) {
            if (w != c.gold_answer && w.find(c.gold_answer) != std::string::npos) {
                throw ValidationError("gold answer " + c.gold_answer +
                                      " collides with corpus word " + w);
            }
        }
    }
    return corpus;
}

namespace {

struct TypedPipeline {
    std::shared_ptr<ManualClock> clock;
    std::unique_ptr<Engine> engine;
    std::string context_id;
};

TypedPipeline build_typed(const BenchCorpus& corpus) {
    TypedPipeline pipeline;
    const Timestamp first_turn = corpus.conversations.front().turns.front().at;
    pipeline.clock = std::make_shared<ManualClock>(Timestamp{first_turn.ms - kMillisPerHour});
    pipeline.engine = Engine::in_memory({}, pipeline.clock, {});
    pipeline.context_id = pipeline.engine->memory().create_context("bench");

    for (const BenchConversation& conv : corpus.conversations) {
        std::unordered_map<int, std::string> claim_ids;
        for (std::size_t j = 0; j < conv.turns.size(); ++j) {
            const BenchTurn& turn = conv.turns[j];
            pipeline.clock->set(turn.at);
            if (turn.kind == BenchTurn::Kind::claim) {
                Provenance prov;
                prov.source_id = conv.id;
                prov.source_kind = SourceKind::conversation;
                prov.asserted_at = turn.at;
                const std::string id =
                    pipeline.engine->knowledge().ingest_claim(turn.text, prov);
                claim_ids[static_cast<int>(j)] = id;
                if (turn.supersedes >= 0) {
                    pipeline.engine->knowledge().supersede(
                        claim_ids.at(turn.supersedes), id, "later statement in conversation");
                }
            } else {
                pipeline.engine->memory().observe(turn.text, pipeline.context_id,
                                                  std::nullopt, conv.id);
            }
        }
    }
    pipeline.clock->set(corpus.query_time);
    return pipeline;
}

void finish_outcome(const BenchCorpus& corpus, ConditionOutcome& outcome) {
    std::size_t right = 0, contradiction_right = 0, temporal_right = 0;
    std::size_t contradiction_n = 0, temporal_n = 0;
    for (std::size_t i = 0; i < corpus.cases.size(); ++i) {
        const bool correct = outcome.correct[i];
        right += correct ? 1 : 0;
        if (corpus.cases[i].category == BenchCategory::contradiction_resolution) {
            ++contradiction_n;
            contradiction_right += correct ? 1 : 0;
        } else {
            ++temporal_n;
            temporal_right += correct ? 1 : 0;
        }
    }
    outcome.overall = static_cast<double>(right) / static_cast<double>(corpus.cases.size());
    outcome.contradiction =
        contradiction_n == 0
            ? 0.0
            : static_cast<double>(contradiction_right) / static_cast<double>(contradiction_n);
    outcome.temporal = temporal_n == 0 ? 0.0
                                       : static_cast<double>(temporal_right) /
                                             static_cast<double>(temporal_n);
}

} // namespace

ConditionOutcome run_condition(const BenchCorpus& corpus, BenchCondition condition) {
    if (corpus.cases.empty()) throw ValidationError("corpus has no cases");
    ConditionOutcome outcome;
    outcome.condition = condition;
    outcome.correct.reserve(corpus.cases.size());

    if (condition == BenchCondition::flat) {
        FlatStore flat;
        for (const BenchConversation& conv : corpus.conversations) {
            for (const BenchTurn& turn : conv.turns) flat.add(turn.text);
        }
        for (const BenchCase& c : corpus.cases) {
            const std::vector<ScoredItem> top = flat.query(c.question, 5);
            const std::string answer = top.empty() ? std::string() : flat.text_of(top.front().id);
            outcome.correct.push_back(contains_ci(answer, c.gold_answer));
        }
    } else {
        TypedPipeline pipeline = build_typed(corpus);
        for (const BenchCase& c : corpus.cases) {
            RouteRequest request;
            request.text = c.question;
            if (condition == BenchCondition::typed_oracle) request.oracle_label = c.oracle_label;
            const RouteResult result =
                route(request, *pipeline.engine, pipeline.context_id, 5);
            const std::string answer =
                result.answers.empty() ? std::string() : result.answers.front().content;
            outcome.correct.push_back(contains_ci(answer, c.gold_answer));
        }
    }

    finish_outcome(corpus, outcome);
    return outcome;
}

double mcnemar_exact(int b, int c) {
    if (b < 0 || c < 0) throw ValidationError("discordant counts must be non-negative");
    const int n = b + c;
    if (n == 0) throw ValidationError("McNemar test undefined when both discordant counts are zero");
    const int m = std::min(b, c);
    double term = std::ldexp(1.0, -n); // C(n,0)/2^n
    double sum = term;
    for (int i = 1; i <= m; ++i) {
        term = term * static_cast<double>(n - i + 1) / static_cast<double>(i);
        sum += term;
    }
    return std::min(1.0, 2.0 * sum);
}

std::pair<double, double> bootstrap_ci(const std::vector<std::pair<bool, bool>>& paired,
                                       int resamples, double level, std::uint64_t seed) {
    if (paired.empty()) throw ValidationError("bootstrap over empty outcomes");
    if (resamples < 1) throw ValidationError("resamples must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must be in (0,1)");

    SplitMix64 rng(seed);
    const std::size_t n = paired.size();
    std::vector<double> deltas(static_cast<std::size_t>(resamples));
    for (double& delta : deltas) {
        int a = 0, b = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pick = paired[rng.next_index(n)];
            a += pick.first ? 1 : 0;
            b += pick.second ? 1 : 0;
        }
        delta = static_cast<double>(a - b) / static_cast<double>(n);
    }
    std::sort(deltas.begin(), deltas.end());
    auto nearest_rank = [&](double p) {
        auto k = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(resamples)));
        if (k < 1) k = 1;
        if (k > static_cast<std::size_t>(resamples)) k = static_cast<std::size_t>(resamples);
        return deltas[k - 1];
    };
    const double tail = (1.0 - level) / 2.0;
    return {nearest_rank(tail), nearest_rank(1.0 - tail)};
}

BenchReport run_bench(const CorpusParams& params) {
    const auto started = std::chrono::steady_clock::now();
    const BenchCorpus corpus = generate_corpus(params);

    BenchReport report;
    report.seed = params.seed;
    report.n_cases = corpus.cases.size();
    for (const BenchCase& c : corpus.cases) {
        if (c.category == BenchCategory::contradiction_resolution) {
            ++report.n_contradiction;
        } else {
            ++report.n_temporal;
        }
    }

    report.typed_oracle = run_condition(corpus, BenchCondition::typed_oracle);
    report.typed_heuristic = run_condition(corpus, BenchCondition::typed_heuristic);
    report.flat = run_condition(corpus, BenchCondition::flat);

    std::vector<std::pair<bool, bool>> paired;
    paired.reserve(corpus.cases.size());
    for (std::size_t i = 0; i < corpus.cases.size(); ++i) {
        const bool a = report.typed_oracle.correct[i];
        const bool b = report.flat.correct[i];
        paired.emplace_back(a, b);
        if (a && !b) ++report.discordant_b;
        if (!a && b) ++report.discordant_c;
    }
    report.delta = report.typed_oracle.overall - report.flat.overall;
    report.mcnemar_p = (report.discordant_b + report.discordant_c) == 0
                           ? 1.0
                           : mcnemar_exact(report.discordant_b, report.discordant_c);
    report.ci_seed = params.seed ^ 0x626F6F74ULL;
    auto [lo, hi] = bootstrap_ci(paired, report.ci_resamples, report.ci_level, report.ci_seed);
    report.ci_lo = lo;
    report.ci_hi = hi;
    report.note =
        "synthetic corpus: the typed-flat gap is by construction; directions are "
        "meaningful, magnitudes are not comparable to any production measurement";
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

std::string format_bench_report(const BenchReport& report) {
    std::string out;
    {
        RecordWriter w;
        w.scalar("report", "bench")
            .unsigned_integer("seed", report.seed)
            .unsigned_integer("cases", report.n_cases)
            .unsigned_integer("contradiction", report.n_contradiction)
            .unsigned_integer("temporal", report.n_temporal);
        out += w.str();
        out += '\n';
    }
    for (const ConditionOutcome* outcome :
         {&report.typed_oracle, &report.typed_heuristic, &report.flat}) {
        RecordWriter w;
        w.scalar("row", "condition")
            .scalar("name", to_string(outcome->condition))
            .real("overall", outcome->overall)
            .real("contradiction", outcome->contradiction)
            .real("temporal", outcome->temporal);
        out += w.str();
        out += '\n';
    }
    {
        RecordWriter w;
        w.scalar("row", "stats")
            .real("delta", report.delta)
            .integer("b", report.discordant_b)
            .integer("c", report.discordant_c)
            .real("mcnemar_p", report.mcnemar_p)
            .real("ci_level", report.ci_level)
            .integer("ci_resamples", report.ci_resamples)
            .unsigned_integer("ci_seed", report.ci_seed)
            .real("ci_lo", report.ci_lo)
            .real("ci_hi", report.ci_hi)
            .real("elapsed_seconds", report.elapsed_seconds);
        out += w.str();
        out += '\n';
    }
    {
        RecordWriter w;
        w.scalar("row", "note").text("text", report.note);
        out += w.str();
        out += '\n';
    }
    for (std::size_t i = 0; i < report.n_cases; ++i) {
        RecordWriter w;
        w.scalar("row", "case")
            .unsigned_integer("index", i)
            .unsigned_integer("oracle", report.typed_oracle.correct[i] ? 1 : 0)
            .unsigned_integer("heuristic", report.typed_heuristic.correct[i] ? 1 : 0)
            .unsigned_integer("flat", report.flat.correct[i] ? 1 : 0);
        out += w.str();
        out += '\n';
    }
    return out;
}

std::string human_bench_report(const BenchReport& report) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "routing experiment  seed %llu  N=%zu (%zu contradiction / %zu temporal)\n\n",
                  static_cast<unsigned long long>(report.seed), report.n_cases,
                  report.n_contradiction, report.n_temporal);
    out += buf;
    out += "condition          overall  contradiction  temporal\n";
    for (const ConditionOutcome* outcome :
         {&report.typed_oracle, &report.typed_heuristic, &report.flat}) {
        std::snprintf(buf, sizeof buf, "%-18s  %6.3f         %6.3f    %6.3f\n",
                      std::string(to_string(outcome->condition)).c_str(), outcome->overall,
                      outcome->contradiction, outcome->temporal);
        out += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "\ndelta (typed_oracle - flat): %+.3f\n"
                  "bootstrap %.0f%% CI [%+.3f, %+.3f]  (R=%d, seed %llu)\n"
                  "McNemar exact: b=%d c=%d p=%.6g\n",
                  report.delta, report.ci_level * 100.0, report.ci_lo, report.ci_hi,
                  report.ci_resamples, static_cast<unsigned long long>(report.ci_seed),
                  report.discordant_b, report.discordant_c, report.mcnemar_p);
    out += buf;
    out += "note: " + report.note + "\n";
    std::snprintf(buf, sizeof buf, "elapsed: %.2f s\n", report.elapsed_seconds);
    out += buf;
    return out;
}

} // namespace stratum
