#ifndef GCDNET_TRAINER_CONFIG_HPP
#define GCDNET_TRAINER_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <string>

#include "gcdnet/errors.hpp"
#include "gcdnet/gcdlayer/layer.hpp"

namespace gcdnet::train {

enum class Ablation { backbone, m1, m2, m3 };

/// Components switched on beyond the core GCD machinery.
struct AblationFlags {
    bool m1_core = true;
    bool m2_self_matrix = false;
    bool m3_dual_perspective = false;

    friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

inline const char* ablation_name(Ablation a) {
    switch (a) {
    case Ablation::backbone: return "backbone";
    case Ablation::m1: return "M1";
    case Ablation::m2: return "M2";
    default: return "M3";
    }
}

inline Ablation parse_ablation(const std::string& name) {
    if (name == "backbone") return Ablation::backbone;
    if (name == "M1" || name == "m1" || name == "light") return Ablation::m1;
    if (name == "M2" || name == "m2") return Ablation::m2;
    if (name == "M3" || name == "m3" || name == "full") return Ablation::m3;
    throw ConfigError("unknown ablation '" + name + "' (expected backbone, M1, M2 or M3)");
}

/// backbone and M1 share (false, false); backbone additionally drops the
/// whole GCD path (see ModelConfig::layer_config).
inline AblationFlags configure_ablation(Ablation a) {
    switch (a) {
    case Ablation::m2: return {true, true, false};
    case Ablation::m3: return {true, true, true};
    default: return {true, false, false};
    }
}

inline AblationFlags configure_ablation(const std::string& name) { return configure_ablation(parse_ablation(name)); }

/// Hyperparameters; defaults follow the T-Finance column of the reference setup.
struct ModelConfig {
    double learning_rate = 0.005;
    std::size_t batch_size = 1024;
    double dropout = 0.292;
    std::size_t hidden_dimension = 64;
    std::size_t n_layer = 1;
    double weight_decay = 0.0;
    double thres = 0.5;
    double gcd_drop = 0.0;
    double tau = 0.1;
    std::size_t max_epochs = 100;
    std::size_t patience = 30;
    std::uint64_t seed = 0;
    Ablation ablation = Ablation::m3;
    bool class_weighted = true;
    double slope = 0.2;

    AblationFlags flags() const { return configure_ablation(ablation); }
    bool uses_gcd() const { return ablation != Ablation::backbone; }

    void validate() const {
        if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
        if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
        if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
        if (hidden_dimension < 1) throw ConfigError("hidden_dimension must be >= 1");
        if (n_layer < 1) throw ConfigError("n_layer must be >= 1");
        if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
        if (!(thres > 0.0 && thres < 1.0)) throw ConfigError("thres must lie in (0, 1)");
        if (!(gcd_drop >= 0.0 && gcd_drop < 1.0)) throw ConfigError("gcd_drop must lie in [0, 1)");
        if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (!(slope > 0.0 && slope < 1.0)) throw ConfigError("slope must lie in (0, 1)");
    }

    layer::LayerConfig layer_config(std::size_t in_dim) const {
        const auto f = flags();
        layer::LayerConfig c;
        c.in_dim = in_dim;
        c.out_dim = hidden_dimension;
        c.gcd_drop = gcd_drop;
        c.use_self_matrix = f.m2_self_matrix;
        c.use_atypical = f.m3_dual_perspective;
        c.use_gcd = uses_gcd();
        c.n_layers = n_layer;
        c.slope = slope;
        return c;
    }

    /// Canonical key/value form; keys match the config file format.
    std::map<std::string, std::string> to_map() const {
        auto num = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        return {
            {"learning_rate", num(learning_rate)},
            {"batch_size", std::to_string(batch_size)},
            {"dropout", num(dropout)},
            {"hidden_dimension", std::to_string(hidden_dimension)},
            {"n_layer", std::to_string(n_layer)},
            {"weight_decay", num(weight_decay)},
            {"thres", num(thres)},
            {"gcd_drop", num(gcd_drop)},
            {"tau", num(tau)},
            {"max_epochs", std::to_string(max_epochs)},
            {"patience", std::to_string(patience)},
            {"seed", std::to_string(seed)},
            {"ablation", ablation_name(ablation)},
            {"class_weighted", class_weighted ? "true" : "false"},
            {"slope", num(slope)},
        };
    }
};

namespace detail {

inline double parse_double_setting(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

inline std::uint64_t parse_uint_setting(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        if (!v.empty() && v[0] != '-') out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
    return out;
}

inline bool parse_bool_setting(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

} // namespace detail

/// Applies one `key=value` setting. Returns false for keys that are not
/// model hyperparameters.
inline bool apply_model_setting(ModelConfig& c, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "learning_rate") c.learning_rate = parse_double_setting(key, value);
    else if (key == "batch_size") c.batch_size = parse_uint_setting(key, value);
    else if (key == "dropout") c.dropout = parse_double_setting(key, value);
    else if (key == "hidden_dimension") c.hidden_dimension = parse_uint_setting(key, value);
    else if (key == "n_layer") c.n_layer = parse_uint_setting(key, value);
    else if (key == "weight_decay") c.weight_decay = parse_double_setting(key, value);
    else if (key == "thres") c.thres = parse_double_setting(key, value);
    else if (key == "gcd_drop") c.gcd_drop = parse_double_setting(key, value);
    else if (key == "tau") c.tau = parse_double_setting(key, value);
    else if (key == "max_epochs") c.max_epochs = parse_uint_setting(key, value);
    else if (key == "patience") c.patience = parse_uint_setting(key, value);
    else if (key == "seed") c.seed = parse_uint_setting(key, value);
    else if (key == "ablation") c.ablation = parse_ablation(value);
    else if (key == "class_weighted") c.class_weighted = parse_bool_setting(key, value);
    else if (key == "slope") c.slope = parse_double_setting(key, value);
    else return false;
    return true;
}

inline ModelConfig model_config_from_map(const std::map<std::string, std::string>& kv) {
    ModelConfig c;
    for (const auto& [k, v] : kv)
        if (!apply_model_setting(c, k, v)) throw ConfigError("unknown model setting '" + k + "'");
    c.validate();
    return c;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Hash over sorted key=value lines.
inline std::string config_hash(const std::map<std::string, std::string>& kv) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : kv) h = fnv1a(k + "=" + v + "\n", h);
    return hash_hex(h);
}

} // namespace gcdnet::train

#endif // GCDNET_TRAINER_CONFIG_HPP
