#ifndef GCDNET_GRAPHSTORE_IO_HPP
#define GCDNET_GRAPHSTORE_IO_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"

namespace gcdnet::graph {

// Text format:
//
//   nodes=<n> dim=<d> relations=<R>
//   features
//   <n lines of d space-separated decimals>
//   labels
//   <n entries from {0, 1, -1}, whitespace separated>
//   edges r=<k>
//   <src dst>
//   ...
//
// Blank lines and lines starting with '#' are ignored. Each relation has at
// most one edges section; a missing section means no edges.

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_tokens(std::string_view s, char extra_sep = ' ') {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    auto is_sep = [&](char c) { return c == ' ' || c == '\t' || c == '\r' || c == extra_sep; };
    while (i < s.size()) {
        while (i < s.size() && is_sep(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_sep(s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view tok) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view tok) {
    long long v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

inline std::size_t parse_index(std::string_view tok, std::size_t line) {
    auto v = parse_int(tok);
    if (!v || *v < 0) throw ParseError("expected a non-negative node id, got '" + std::string(tok) + "'", line);
    return static_cast<std::size_t>(*v);
}

/// Parses `key=<value>` and returns the value, or nullopt if the key differs.
inline std::optional<long long> keyed_int(std::string_view tok, std::string_view key) {
    if (tok.size() <= key.size() + 1 || tok.substr(0, key.size()) != key || tok[key.size()] != '=') return std::nullopt;
    return parse_int(tok.substr(key.size() + 1));
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline MultiRelationGraph read_graph(std::istream& in) {
    std::string raw;
    std::size_t line_no = 0;
    std::size_t n = 0, d = 0, n_rel = 0;
    bool have_header = false;

    enum class Section { none, features, labels, edges } section = Section::none;
    std::vector<double> features;
    std::vector<Label> labels;
    std::vector<std::vector<Edge>> edges;
    std::vector<bool> seen_relation;
    std::size_t feature_rows = 0;
    std::size_t current_rel = 0;
    bool seen_features = false, seen_labels = false;

    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto toks = detail::split_tokens(line);

        if (!have_header) {
            if (toks.size() != 3) throw ParseError("header must be 'nodes=<n> dim=<d> relations=<R>'", line_no);
            auto nv = detail::keyed_int(toks[0], "nodes");
            auto dv = detail::keyed_int(toks[1], "dim");
            auto rv = detail::keyed_int(toks[2], "relations");
            if (!nv || !dv || !rv || *nv < 0 || *dv < 1 || *rv < 0) {
                throw ParseError("header must be 'nodes=<n> dim=<d> relations=<R>'", line_no);
            }
            n = static_cast<std::size_t>(*nv);
            d = static_cast<std::size_t>(*dv);
            n_rel = static_cast<std::size_t>(*rv);
            features.reserve(n * d);
            edges.resize(n_rel);
            seen_relation.assign(n_rel, false);
            have_header = true;
            continue;
        }

        if (toks.size() == 1 && toks[0] == "features") {
            if (seen_features) throw ParseError("duplicate features section", line_no);
            seen_features = true;
            section = Section::features;
            continue;
        }
        if (toks.size() == 1 && toks[0] == "labels") {
            if (seen_labels) throw ParseError("duplicate labels section", line_no);
            seen_labels = true;
            section = Section::labels;
            continue;
        }
        if (toks.size() == 2 && toks[0] == "edges") {
            auto k = detail::keyed_int(toks[1], "r");
            if (!k || *k < 0 || static_cast<std::size_t>(*k) >= n_rel) {
                throw ParseError("edges section needs r=<k> with 0 <= k < " + std::to_string(n_rel), line_no);
            }
            current_rel = static_cast<std::size_t>(*k);
            if (seen_relation[current_rel]) throw ParseError("duplicate edges section for r=" + std::to_string(*k), line_no);
            seen_relation[current_rel] = true;
            section = Section::edges;
            continue;
        }

        switch (section) {
        case Section::none: throw ParseError("data outside of any section", line_no);
        case Section::features: {
            if (toks.size() != d) {
                throw ParseError("feature row has " + std::to_string(toks.size()) + " values, expected " + std::to_string(d),
                                 line_no);
            }
            if (feature_rows == n) throw ParseError("more than " + std::to_string(n) + " feature rows", line_no);
            for (auto tok : toks) {
                auto v = detail::parse_double(tok);
                if (!v) throw ParseError("bad feature value '" + std::string(tok) + "'", line_no);
                features.push_back(*v);
            }
            ++feature_rows;
            break;
        }
        case Section::labels:
            for (auto tok : toks) {
                auto v = detail::parse_int(tok);
                if (!v || (*v != 0 && *v != 1 && *v != -1)) {
                    throw ParseError("bad label '" + std::string(tok) + "', expected 0, 1 or -1", line_no);
                }
                if (labels.size() == n) throw ParseError("more than " + std::to_string(n) + " labels", line_no);
                labels.push_back(label_from_code(*v));
            }
            break;
        case Section::edges:
            if (toks.size() != 2) throw ParseError("edge row must be 'src dst'", line_no);
            edges[current_rel].emplace_back(detail::parse_index(toks[0], line_no), detail::parse_index(toks[1], line_no));
            break;
        }
    }
    if (!have_header) throw ParseError("missing header line");
    if (feature_rows != n) {
        throw ParseError("expected " + std::to_string(n) + " feature rows, found " + std::to_string(feature_rows));
    }
    if (labels.size() != n) {
        throw ParseError("expected " + std::to_string(n) + " labels, found " + std::to_string(labels.size()));
    }
    return MultiRelationGraph(num::Tensor({n, d}, std::move(features)), std::move(labels), edges);
}

inline MultiRelationGraph read_graph_csv(const std::filesystem::path& dir);

/// Loads either the single-file text format or, for a directory, the CSV
/// triple (features.csv, labels.csv, edges_r<k>.csv).
inline MultiRelationGraph load_graph(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) return read_graph_csv(path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file " + path.string());
    return read_graph(in);
}

/// Writes the text format. Features round-trip exactly (17 significant digits).
/// Each undirected edge is written once as (min, max).
inline void write_graph(std::ostream& out, const MultiRelationGraph& g) {
    out << "nodes=" << g.n_nodes() << " dim=" << g.dim() << " relations=" << g.n_relations() << '\n';
    out << "features\n";
    const auto& x = g.features();
    for (std::size_t i = 0; i < g.n_nodes(); ++i) {
        for (std::size_t j = 0; j < g.dim(); ++j) {
            if (j != 0) out << ' ';
            out << detail::format_double(x(i, j));
        }
        out << '\n';
    }
    out << "labels\n";
    for (auto l : g.labels()) out << label_code(l) << '\n';
    for (std::size_t r = 0; r < g.n_relations(); ++r) {
        out << "edges r=" << r << '\n';
        for (std::size_t i = 0; i < g.n_nodes(); ++i)
            for (auto j : g.neighbors(i, r))
                if (i <= j) out << i << ' ' << j << '\n';
    }
}

inline void save_graph(const std::filesystem::path& path, const MultiRelationGraph& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write graph file " + path.string());
    write_graph(out, g);
    if (!out) throw IoError("write failed for " + path.string());
}

namespace detail {

// Reads comma/whitespace separated rows; a first line that does not parse as
// numbers is taken as a header and skipped.
template <typename RowFn>
void read_csv_rows(const std::filesystem::path& path, RowFn&& on_row) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto toks = split_tokens(line, ',');
        if (line_no == 1 && !toks.empty() && !parse_double(toks[0])) continue;
        try {
            on_row(toks, line_no);
        } catch (const ParseError& e) {
            throw ParseError(path.filename().string() + ": " + e.what());
        }
    }
}

} // namespace detail

inline MultiRelationGraph read_graph_csv(const std::filesystem::path& dir) {
    std::vector<double> features;
    std::size_t d = 0, n = 0;
    detail::read_csv_rows(dir / "features.csv", [&](const auto& toks, std::size_t line) {
        if (n == 0) d = toks.size();
        if (toks.size() != d || d == 0) {
            throw ParseError("feature row has " + std::to_string(toks.size()) + " values, expected " + std::to_string(d), line);
        }
        for (auto tok : toks) {
            auto v = detail::parse_double(tok);
            if (!v) throw ParseError("bad feature value '" + std::string(tok) + "'", line);
            features.push_back(*v);
        }
        ++n;
    });
    std::vector<Label> labels;
    detail::read_csv_rows(dir / "labels.csv", [&](const auto& toks, std::size_t line) {
        // Either "label" or "node,label".
        auto tok = toks.back();
        auto v = detail::parse_int(tok);
        if (!v || (*v != 0 && *v != 1 && *v != -1)) throw ParseError("bad label '" + std::string(tok) + "'", line);
        labels.push_back(label_from_code(*v));
    });
    if (labels.size() != n) {
        throw ValidationError("labels.csv has " + std::to_string(labels.size()) + " entries for " + std::to_string(n) +
                              " feature rows");
    }
    std::vector<std::vector<Edge>> edges;
    for (std::size_t r = 0;; ++r) {
        const auto path = dir / ("edges_r" + std::to_string(r) + ".csv");
        if (!std::filesystem::exists(path)) break;
        auto& list = edges.emplace_back();
        detail::read_csv_rows(path, [&](const auto& toks, std::size_t line) {
            if (toks.size() != 2) throw ParseError("edge row must be 'src,dst'", line);
            list.emplace_back(detail::parse_index(toks[0], line), detail::parse_index(toks[1], line));
        });
    }
    return MultiRelationGraph(num::Tensor({n, d}, std::move(features)), std::move(labels), edges);
}

} // namespace gcdnet::graph

#endif // GCDNET_GRAPHSTORE_IO_HPP
