#ifndef GCDNET_CLI_RUN_CONFIG_HPP
#define GCDNET_CLI_RUN_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/synth.hpp"
#include "gcdnet/trainer/config.hpp"

namespace gcdnet::cli {

/// Everything one command invocation needs.
///
/// Config files are flat `key=value` lines (`#` starts a comment). Model keys
/// are the hyperparameter names (learning_rate, batch_size, dropout,
/// hidden_dimension, n_layer, weight_decay, thres, gcd_drop, tau, patience,
/// max_epochs, seed, ablation, class_weighted, slope); run keys are graph,
/// seeds, split_seed, sample_size, bins, checkpoint; generator keys carry a
/// `synth.` prefix (synth.nodes, synth.fraud_ratio, synth.dim,
/// synth.relations, synth.avg_degree, synth.homophily, synth.camouflage_rate,
/// synth.camouflage_strength, synth.separation, synth.unlabeled_fraction,
/// synth.seed).
struct RunConfig {
    train::ModelConfig model;
    std::optional<std::filesystem::path> graph_path;
    std::optional<graph::SynthParams> synth;
    std::filesystem::path out_dir = ".";
    std::size_t seeds = 5;
    std::uint64_t split_seed = 0;
    std::size_t sample_size = 20;
    std::size_t bins = 20;
    std::optional<std::filesystem::path> checkpoint;

    /// Fully resolved settings (defaults included) in canonical form.
    std::map<std::string, std::string> resolved() const {
        auto kv = model.to_map();
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        if (graph_path) kv["graph"] = graph_path->string();
        if (synth) {
            kv["synth.nodes"] = std::to_string(synth->n_nodes);
            kv["synth.fraud_ratio"] = num(synth->fraud_ratio);
            kv["synth.dim"] = std::to_string(synth->dim);
            kv["synth.relations"] = std::to_string(synth->n_relations);
            kv["synth.avg_degree"] = num(synth->avg_degree);
            kv["synth.homophily"] = num(synth->homophily);
            kv["synth.camouflage_rate"] = num(synth->camouflage_rate);
            kv["synth.camouflage_strength"] = num(synth->camouflage_strength);
            kv["synth.separation"] = num(synth->separation);
            kv["synth.unlabeled_fraction"] = num(synth->unlabeled_fraction);
            kv["synth.seed"] = std::to_string(synth->seed);
        }
        kv["seeds"] = std::to_string(seeds);
        kv["split_seed"] = std::to_string(split_seed);
        kv["sample_size"] = std::to_string(sample_size);
        kv["bins"] = std::to_string(bins);
        return kv;
    }

    std::string hash() const { return train::config_hash(resolved()); }
};

/// Applies one setting; unknown keys are a configuration error.
inline void apply_setting(RunConfig& rc, const std::string& key, const std::string& value) {
    using namespace train::detail;
    if (train::apply_model_setting(rc.model, key, value)) return;
    if (key == "graph") {
        rc.graph_path = value;
        return;
    }
    if (key == "seeds") rc.seeds = parse_uint_setting(key, value);
    else if (key == "split_seed") rc.split_seed = parse_uint_setting(key, value);
    else if (key == "sample_size") rc.sample_size = parse_uint_setting(key, value);
    else if (key == "bins") rc.bins = parse_uint_setting(key, value);
    else if (key == "checkpoint") rc.checkpoint = value;
    else if (key.rfind("synth.", 0) == 0) {
        if (!rc.synth) rc.synth.emplace();
        auto& s = *rc.synth;
        const std::string k = key.substr(6);
        if (k == "nodes") s.n_nodes = parse_uint_setting(key, value);
        else if (k == "fraud_ratio") s.fraud_ratio = parse_double_setting(key, value);
        else if (k == "dim") s.dim = parse_uint_setting(key, value);
        else if (k == "relations") s.n_relations = parse_uint_setting(key, value);
        else if (k == "avg_degree") s.avg_degree = parse_double_setting(key, value);
        else if (k == "homophily") s.homophily = parse_double_setting(key, value);
        else if (k == "camouflage_rate") s.camouflage_rate = parse_double_setting(key, value);
        else if (k == "camouflage_strength") s.camouflage_strength = parse_double_setting(key, value);
        else if (k == "separation") s.separation = parse_double_setting(key, value);
        else if (k == "unlabeled_fraction") s.unlabeled_fraction = parse_double_setting(key, value);
        else if (k == "seed") s.seed = parse_uint_setting(key, value);
        else throw ConfigError("unknown setting '" + key + "'");
    } else {
        throw ConfigError("unknown setting '" + key + "'");
    }
}

/// Splits "key=value"; surrounding blanks are trimmed.
inline std::pair<std::string, std::string> split_assignment(const std::string& text, std::size_t line = 0) {
    const auto eq = text.find('=');
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
        throw ConfigError((line ? "config line " + std::to_string(line) + ": " : std::string{}) + "expected key=value, got '" +
                          text + "'");
    }
    auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key in '" + text + "'");
    return {key, value};
}

inline void apply_config_file(RunConfig& rc, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto [k, v] = split_assignment(line, n);
        apply_setting(rc, k, v);
    }
}

} // namespace gcdnet::cli

#endif // GCDNET_CLI_RUN_CONFIG_HPP
