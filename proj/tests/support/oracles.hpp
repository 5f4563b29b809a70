#pragma once
// Reference implementations the test suites compare the engine against.
// Everything here is written directly from the documented contracts and
// shares no code with src/ — slower and simpler on purpose, so a bug in
// the engine cannot hide in a shared helper.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace oracle {

// ---- tokenizer ----------------------------------------------------------
// Lowercased ASCII [a-z0-9]+ runs; everything else separates.
inline std::vector<std::string> tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char raw : text) {
        char c = raw;
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
        if (keep) {
            current += c;
        } else if (!current.empty()) {
            out.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

inline std::set<std::string> token_set(const std::string& text) {
    const std::vector<std::string> all = tokens(text);
    return {all.begin(), all.end()};
}

// ---- BM25 ---------------------------------------------------------------
// idf = ln(1 + (N - df + 0.5)/(df + 0.5)); score sums over the UNIQUE
// query terms; k1 = 1.2, b = 0.75; only documents sharing a term score.
inline std::map<std::string, double> bm25_scores(
    const std::vector<std::pair<std::string, std::string>>& corpus, // (id, text)
    const std::string& query) {
    const double k1 = 1.2, b = 0.75;
    const std::size_t n = corpus.size();
    if (n == 0) return {};

    std::map<std::string, std::vector<std::string>> doc_tokens;
    double total_len = 0.0;
    for (const auto& [id, text] : corpus) {
        doc_tokens[id] = tokens(text);
        total_len += static_cast<double>(doc_tokens[id].size());
    }
    const double avg_len = total_len / static_cast<double>(n);

    const std::set<std::string> terms = token_set(query);
    std::map<std::string, double> scores;
    for (const std::string& term : terms) {
        std::size_t df = 0;
        for (const auto& [id, toks] : doc_tokens) {
            if (std::count(toks.begin(), toks.end(), term) > 0) ++df;
        }
        if (df == 0) continue;
        const double idf =
            std::log(1.0 + (static_cast<double>(n - df) + 0.5) / (static_cast<double>(df) + 0.5));
        for (const auto& [id, toks] : doc_tokens) {
            const double tf = static_cast<double>(std::count(toks.begin(), toks.end(), term));
            if (tf == 0.0) continue;
            const double len = static_cast<double>(toks.size());
            scores[id] += idf * (tf * (k1 + 1.0)) /
                          (tf + k1 * (1.0 - b + b * (avg_len == 0.0 ? 0.0 : len / avg_len)));
        }
    }
    return scores;
}

// ---- set similarity / vectors ------------------------------------------
inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const std::string& x : a) inter += b.count(x);
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

// ---- reciprocal-rank fusion --------------------------------------------
// fused(d) = sum over lists of 1/(k0 + rank), rank 1-based.
inline std::map<std::string, double> rrf(const std::vector<std::vector<std::string>>& ranked_id_lists,
                                         double k0) {
    std::map<std::string, double> fused;
    for (const auto& list : ranked_id_lists) {
        for (std::size_t i = 0; i < list.size(); ++i) {
            fused[list[i]] += 1.0 / (k0 + static_cast<double>(i + 1));
        }
    }
    return fused;
}

// ---- bi-temporal visibility --------------------------------------------
// Four independent clauses over two half-open windows.
inline bool visible(std::int64_t system_created, std::optional<std::int64_t> system_expired,
                    std::int64_t valid_from, std::optional<std::int64_t> valid_until,
                    std::int64_t system_time, std::int64_t valid_time) {
    const bool created_in_time = system_created <= system_time;
    const bool not_yet_expired = !(system_expired && *system_expired <= system_time);
    const bool valid_started = valid_from <= valid_time;
    const bool valid_not_ended = !(valid_until && *valid_until <= valid_time);
    return created_in_time && not_yet_expired && valid_started && valid_not_ended;
}

// ---- decay --------------------------------------------------------------
// retention = s0 * 2^(-elapsed / half_life); closed-form half-life growth
// min(h * g^count, cap) via pow (the engine multiplies in a loop).
inline double retention(double s0, double elapsed_ms, double half_life_ms) {
    return s0 * std::exp2(-elapsed_ms / half_life_ms);
}

inline double grown_half_life(double base_ms, double growth, int count, double cap_ms) {
    return std::min(base_ms * std::pow(growth, static_cast<double>(count)), cap_ms);
}

// ---- supersession -------------------------------------------------------
inline std::set<std::string> current_ids(const std::set<std::string>& all,
                                         const std::vector<std::pair<std::string, std::string>>& links) {
    std::set<std::string> out = all;
    for (const auto& [old_id, new_id] : links) out.erase(old_id);
    return out;
}

inline bool path_exists(const std::vector<std::pair<std::string, std::string>>& links,
                        const std::string& from, const std::string& to) {
    if (from == to) return true;
    std::set<std::string> seen{from};
    std::vector<std::string> frontier{from};
    while (!frontier.empty()) {
        const std::string node = frontier.back();
        frontier.pop_back();
        for (const auto& [old_id, new_id] : links) {
            if (old_id == node && seen.insert(new_id).second) {
                if (new_id == to) return true;
                frontier.push_back(new_id);
            }
        }
    }
    return false;
}

// Every transitive predecessor of `head` (the full improvement history).
inline std::set<std::string> chain_members(
    const std::vector<std::pair<std::string, std::string>>& links, const std::string& head) {
    std::set<std::string> members{head};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [old_id, new_id] : links) {
            if (members.count(new_id) && members.insert(old_id).second) grew = true;
        }
    }
    return members;
}

// ---- wisdom promotion gate ---------------------------------------------
// prediction -> core on >= min_sessions distinct sessions; core -> anchor
// on >= min_cycles contradiction-free cycles; any standing contradiction
// or non-active status blocks; anchors have nowhere to go.
inline std::optional<std::string> promotion(const std::string& tier, bool active,
                                            std::size_t sessions, int contradictions,
                                            int cycles, int min_sessions, int min_cycles) {
    if (!active || contradictions != 0) return std::nullopt;
    if (tier == "prediction" && sessions >= static_cast<std::size_t>(min_sessions)) return "core";
    if (tier == "core" && cycles >= min_cycles) return "anchor";
    return std::nullopt;
}

// ---- clustering ---------------------------------------------------------
// All-pairs Jaccard union-find; clusters meeting both minima, as id sets.
struct ClusterFact {
    std::string id;
    std::string content;
    std::optional<std::string> session;
};

inline std::vector<std::set<std::string>> clusters(const std::vector<ClusterFact>& facts,
                                                   double threshold, int min_occurrences,
                                                   int min_sessions) {
    const std::size_t n = facts.size();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::set<std::string>> tok(n);
    for (std::size_t i = 0; i < n; ++i) tok[i] = token_set(facts[i].content);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (jaccard(tok[i], tok[j]) >= threshold) parent[find(i)] = find(j);
        }
    }
    std::map<std::size_t, std::set<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].insert(i);

    std::vector<std::set<std::string>> out;
    for (const auto& [root, members] : groups) {
        if (members.size() < static_cast<std::size_t>(min_occurrences)) continue;
        std::set<std::string> sessions;
        for (std::size_t i : members) {
            if (facts[i].session) sessions.insert(*facts[i].session);
        }
        if (sessions.size() < static_cast<std::size_t>(min_sessions)) continue;
        std::set<std::string> ids;
        for (std::size_t i : members) ids.insert(facts[i].id);
        out.push_back(std::move(ids));
    }
    return out;
}

// ---- exact McNemar ------------------------------------------------------
// p = min(1, 2 * sum_{i<=min(b,c)} C(n,i) / 2^n) with the binomial sum in
// 128-bit integers (exact for n <= 127).
inline double mcnemar(int b, int c) {
    const int n = b + c;
    const int m = std::min(b, c);
    unsigned __int128 sum = 0;
    unsigned __int128 binom = 1; // C(n, 0)
    for (int i = 0; i <= m; ++i) {
        sum += binom;
        binom = binom * static_cast<unsigned __int128>(n - i) /
                static_cast<unsigned __int128>(i + 1);
    }
    const long double p =
        2.0L * static_cast<long double>(sum) / std::pow(2.0L, static_cast<long double>(n));
    return static_cast<double>(std::min(1.0L, p));
}

// ---- bootstrap, second implementation ----------------------------------
// Same documented algorithm — SplitMix64 (constants restated below),
// widening-multiply index map, nearest-rank quantiles — coded separately.
struct Splitmix {
    std::uint64_t state;
    explicit Splitmix(std::uint64_t seed) : state(seed) {}
    std::uint64_t operator()() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
    }
};

inline std::pair<double, double> bootstrap(const std::vector<std::pair<bool, bool>>& paired,
                                           int resamples, double level, std::uint64_t seed) {
    Splitmix rng(seed);
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(resamples));
    for (int r = 0; r < resamples; ++r) {
        double delta_sum = 0.0;
        for (std::size_t i = 0; i < paired.size(); ++i) {
            const auto& pick = paired[rng.index(paired.size())];
            delta_sum += (pick.first ? 1.0 : 0.0) - (pick.second ? 1.0 : 0.0);
        }
        stats.push_back(delta_sum / static_cast<double>(paired.size()));
    }
    std::sort(stats.begin(), stats.end());
    auto rank = [&](double p) {
        long k = static_cast<long>(std::ceil(p * static_cast<double>(resamples)));
        k = std::max(1L, std::min(static_cast<long>(resamples), k));
        return stats[static_cast<std::size_t>(k - 1)];
    };
    return {rank((1.0 - level) / 2.0), rank(1.0 - (1.0 - level) / 2.0)};
}

} // namespace oracle
