#include "stratum/config.hpp"

#include "stratum/record.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace stratum {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value, const std::string& key) {
    std::vector<std::string> out;
    std::string current;
    std::istringstream in(value);
    while (std::getline(in, current, ',')) {
        std::string item = trim(current);
        if (item.empty()) throw ConfigError(key + ": empty list element");
        out.push_back(item);
    }
    if (out.empty()) throw ConfigError(key + ": list must not be empty");
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i != 0) out += ",";
        out += items[i];
    }
    return out;
}

double parse_number(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw ConfigError(key + ": trailing junk in number");
        if (!std::isfinite(v)) throw ConfigError(key + ": number must be finite");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: " + value);
    }
}

int parse_int(const std::string& value, const std::string& key) {
    double v = parse_number(value, key);
    double rounded = std::nearbyint(v);
    if (rounded != v) throw ConfigError(key + ": expected an integer");
    return static_cast<int>(rounded);
}

} // namespace

void RouterLexicon::validate() const {
    auto check = [](const std::vector<std::string>& markers, const char* name) {
        if (markers.empty())
            throw ValidationError(std::string(name) + " must not be empty");
        for (const auto& m : markers) {
            if (m.empty()) throw ValidationError(std::string(name) + ": empty marker");
            for (char c : m) {
                bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == ' ';
                if (!ok)
                    throw ValidationError(std::string(name) +
                                          ": markers are lowercase words: " + m);
            }
        }
    };
    check(temporal_markers, "temporal_markers");
    check(directive_markers, "directive_markers");
}

void EngineConfig::validate() const {
    decay.validate();
    gate.validate();
    if (!(fusion.rrf_constant > 0.0))
        throw ValidationError("rrf_constant must be positive");
    router.validate();
    dream.validate();
}

EngineConfig parse_config(const std::string& text) {
    EngineConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": missing '='");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        if (!seen.insert(key).second)
            throw ConfigError("config: duplicate key " + key);

        if (key == "decay.initial_strength") {
            config.decay.initial_strength = parse_number(value, key);
        } else if (key == "decay.half_life_days") {
            config.decay.half_life = days(parse_number(value, key));
        } else if (key == "decay.reinforcement_growth") {
            config.decay.reinforcement_growth = parse_number(value, key);
        } else if (key == "decay.half_life_cap_days") {
            config.decay.half_life_cap = days(parse_number(value, key));
        } else if (key == "decay.recall_threshold") {
            config.decay.recall_threshold = parse_number(value, key);
        } else if (key == "gate.core_min_sessions") {
            config.gate.core_min_sessions = parse_int(value, key);
        } else if (key == "gate.anchor_min_cycles") {
            config.gate.anchor_min_cycles = parse_int(value, key);
        } else if (key == "fusion.rrf_constant") {
            config.fusion.rrf_constant = parse_number(value, key);
        } else if (key == "router.temporal_markers") {
            config.router.temporal_markers = split_list(value, key);
        } else if (key == "router.directive_markers") {
            config.router.directive_markers = split_list(value, key);
        } else if (key == "dream.min_occurrences") {
            config.dream.min_occurrences = parse_int(value, key);
        } else if (key == "dream.min_sessions") {
            config.dream.min_sessions = parse_int(value, key);
        } else if (key == "dream.jaccard_threshold") {
            config.dream.jaccard_threshold = parse_number(value, key);
        } else {
            throw ConfigError("config: unknown key " + key);
        }
    }
    try {
        config.validate();
    } catch (const ValidationError& e) {
        // Out-of-range settings are config-file problems to the caller.
        throw ConfigError(e.what());
    }
    return config;
}

std::string format_config(const EngineConfig& config) {
    auto as_days = [](Millis ms) {
        return static_cast<double>(ms) / static_cast<double>(kMillisPerDay);
    };
    std::ostringstream out;
    out << "decay.initial_strength = " << format_real(config.decay.initial_strength) << "\n";
    out << "decay.half_life_days = " << format_real(as_days(config.decay.half_life)) << "\n";
    out << "decay.reinforcement_growth = "
        << format_real(config.decay.reinforcement_growth) << "\n";
    out << "decay.half_life_cap_days = "
        << format_real(as_days(config.decay.half_life_cap)) << "\n";
    out << "decay.recall_threshold = " << format_real(config.decay.recall_threshold)
        << "\n";
    out << "gate.core_min_sessions = " << config.gate.core_min_sessions << "\n";
    out << "gate.anchor_min_cycles = " << config.gate.anchor_min_cycles << "\n";
    out << "fusion.rrf_constant = " << format_real(config.fusion.rrf_constant) << "\n";
    out << "router.temporal_markers = " << join_list(config.router.temporal_markers)
        << "\n";
    out << "router.directive_markers = " << join_list(config.router.directive_markers)
        << "\n";
    out << "dream.min_occurrences = " << config.dream.min_occurrences << "\n";
    out << "dream.min_sessions = " << config.dream.min_sessions << "\n";
    out << "dream.jaccard_threshold = " << format_real(config.dream.jaccard_threshold)
        << "\n";
    return out.str();
}

EngineConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) return EngineConfig{};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

void save_config_file(const std::string& path, const EngineConfig& config) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) throw StorageError("cannot write config file: " + path);
    out << format_config(config);
    out.flush();
    if (!out.good()) throw StorageError("config write failed: " + path);
}

} // namespace stratum
