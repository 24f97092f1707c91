#ifndef GCDNET_TRAINER_CHECKPOINT_HPP
#define GCDNET_TRAINER_CHECKPOINT_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/protogcd/protogcd.hpp"
#include "gcdnet/trainer/config.hpp"
#include "gcdnet/trainer/model.hpp"

namespace gcdnet::train {

// Versioned text container:
//
//   gcdnet-checkpoint 1
//   config_hash <16 hex digits>
//   in_dim <d>
//   config <key> <value>            (one line per model setting)
//   prototypes <d> <tau> <epoch>    (absent for the backbone)
//   <d fraud values>
//   <d benign values>
//   param <name> <rows> <cols>
//   <rows*cols values>
//   ...
//   end
//
// Values use 17 significant digits so a save/load cycle is exact.

struct Checkpoint {
    GcdGnn model;
    std::optional<proto::PrototypeState> prototypes;
    std::string config_hash;
};

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline void write_values(std::ostream& out, std::span<const double> v) {
    char buf[32];
    for (std::size_t k = 0; k < v.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", v[k]);
        if (k != 0) out << ' ';
        out << buf;
    }
    out << '\n';
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::vector<std::string> tokens(const char* what) {
        std::string line;
        if (!std::getline(in_, line)) throw ParseError(std::string("checkpoint truncated, expected ") + what, line_ + 1);
        ++line_;
        std::istringstream ss(line);
        std::vector<std::string> out;
        for (std::string t; ss >> t;) out.push_back(std::move(t));
        return out;
    }

    std::vector<double> values(std::size_t count, const char* what) {
        auto toks = tokens(what);
        if (toks.size() != count) {
            throw ParseError(std::string(what) + ": expected " + std::to_string(count) + " values, found " +
                                 std::to_string(toks.size()),
                             line_);
        }
        std::vector<double> out(count);
        for (std::size_t k = 0; k < count; ++k) {
            const auto& t = toks[k];
            const auto res = std::from_chars(t.data(), t.data() + t.size(), out[k]);
            if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) throw ParseError("bad number '" + t + "'", line_);
        }
        return out;
    }

    std::size_t size_value(const std::string& tok) const {
        std::size_t v = 0;
        const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) throw ParseError("bad count '" + tok + "'", line_);
        return v;
    }

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

} // namespace detail

inline void write_checkpoint(std::ostream& out, GcdGnn& model, const std::optional<proto::PrototypeState>& protos) {
    const auto kv = model.config().to_map();
    out << "gcdnet-checkpoint " << kCheckpointVersion << '\n';
    out << "config_hash " << config_hash(kv) << '\n';
    out << "in_dim " << model.in_dim() << '\n';
    for (const auto& [k, v] : kv) out << "config " << k << ' ' << v << '\n';
    if (protos) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", protos->tau);
        out << "prototypes " << protos->mu_fr.size() << ' ' << buf << ' ' << protos->epoch << '\n';
        detail::write_values(out, protos->mu_fr);
        detail::write_values(out, protos->mu_be);
    }
    for (auto* p : model.parameters()) {
        out << "param " << p->name << ' ' << p->tensor.rows() << ' ' << p->tensor.cols() << '\n';
        detail::write_values(out, p->tensor.values());
    }
    out << "end\n";
}

inline Checkpoint read_checkpoint(std::istream& in) {
    detail::LineReader reader(in);
    auto head = reader.tokens("header");
    if (head.size() != 2 || head[0] != "gcdnet-checkpoint") throw ParseError("not a gcdnet checkpoint", reader.line());
    if (head[1] != std::to_string(kCheckpointVersion)) {
        throw ParseError("unsupported checkpoint version " + head[1], reader.line());
    }
    auto hash_line = reader.tokens("config_hash");
    if (hash_line.size() != 2 || hash_line[0] != "config_hash") throw ParseError("expected config_hash", reader.line());
    auto dim_line = reader.tokens("in_dim");
    if (dim_line.size() != 2 || dim_line[0] != "in_dim") throw ParseError("expected in_dim", reader.line());
    const std::size_t in_dim = reader.size_value(dim_line[1]);

    std::map<std::string, std::string> kv;
    std::vector<std::string> toks = reader.tokens("config");
    while (!toks.empty() && toks[0] == "config") {
        if (toks.size() != 3) throw ParseError("config line must be 'config <key> <value>'", reader.line());
        kv[toks[1]] = toks[2];
        toks = reader.tokens("config or parameters");
    }
    if (config_hash(kv) != hash_line[1]) throw ParseError("config hash mismatch; checkpoint is corrupted");
    ModelConfig cfg;
    try {
        cfg = model_config_from_map(kv);
    } catch (const ConfigError& e) {
        throw ParseError(std::string("checkpoint config: ") + e.what());
    }

    Checkpoint ck{GcdGnn(cfg, in_dim), std::nullopt, hash_line[1]};
    if (!toks.empty() && toks[0] == "prototypes") {
        if (toks.size() != 4) throw ParseError("prototypes line must be 'prototypes <d> <tau> <epoch>'", reader.line());
        const std::size_t d = reader.size_value(toks[1]);
        proto::PrototypeState s;
        const auto res = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), s.tau);
        if (res.ec != std::errc{} || !(s.tau > 0.0)) throw ParseError("bad prototype temperature", reader.line());
        s.epoch = reader.size_value(toks[3]);
        s.mu_fr = reader.values(d, "fraud prototype");
        s.mu_be = reader.values(d, "benign prototype");
        ck.prototypes = std::move(s);
        toks = reader.tokens("parameters");
    }
    std::map<std::string, num::Parameter*> by_name;
    for (auto* p : ck.model.parameters()) by_name[p->name] = p;
    std::size_t loaded = 0;
    while (!(toks.size() == 1 && toks[0] == "end")) {
        if (toks.size() != 4 || toks[0] != "param") throw ParseError("expected 'param <name> <rows> <cols>' or 'end'", reader.line());
        auto it = by_name.find(toks[1]);
        if (it == by_name.end()) throw ParseError("unknown parameter '" + toks[1] + "'", reader.line());
        auto& t = it->second->tensor;
        const std::size_t rows = reader.size_value(toks[2]), cols = reader.size_value(toks[3]);
        if (rows != t.rows() || cols != t.cols()) {
            throw ParseError("parameter '" + toks[1] + "' has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", model expects " + num::shape_string(t.shape()),
                             reader.line());
        }
        t.storage() = reader.values(rows * cols, toks[1].c_str());
        ++loaded;
        toks = reader.tokens("parameters or end");
    }
    if (loaded != by_name.size()) {
        throw ParseError("checkpoint holds " + std::to_string(loaded) + " of " + std::to_string(by_name.size()) +
                         " parameters");
    }
    if (ck.model.uses_gcd() != ck.prototypes.has_value()) throw ParseError("prototype section does not match the model");
    if (ck.prototypes && ck.prototypes->mu_fr.size() != in_dim) throw ParseError("prototype dimension does not match in_dim");
    return ck;
}

inline void save_checkpoint(const std::filesystem::path& path, GcdGnn& model,
                            const std::optional<proto::PrototypeState>& protos) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    write_checkpoint(out, model, protos);
    if (!out) throw IoError("write failed for " + path.string());
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    return read_checkpoint(in);
}

} // namespace gcdnet::train

#endif // GCDNET_TRAINER_CHECKPOINT_HPP
