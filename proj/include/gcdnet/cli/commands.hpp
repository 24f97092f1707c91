#ifndef GCDNET_CLI_COMMANDS_HPP
#define GCDNET_CLI_COMMANDS_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gcdnet/cli/run_config.hpp"
#include "gcdnet/errors.hpp"
#include "gcdnet/evalkit/diagnostics.hpp"
#include "gcdnet/evalkit/export.hpp"
#include "gcdnet/evalkit/metrics.hpp"
#include "gcdnet/graphstore/io.hpp"
#include "gcdnet/graphstore/split.hpp"
#include "gcdnet/graphstore/synth.hpp"
#include "gcdnet/trainer/checkpoint.hpp"
#include "gcdnet/trainer/report.hpp"
#include "gcdnet/trainer/trainer.hpp"

namespace gcdnet::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Output layout under --out:
//   synth:   graph.txt
//   train:   report_seed<s>.jsonl, model_seed<s>.ckpt, summary.json, manifest.json
//   eval:    eval_metrics.json, manifest.json
//   analyze: distances.jsonl, gcd_bins.jsonl, embeddings.csv, manifest.json
// manifest.json is the only file holding wall-clock data.

namespace detail {

inline void prepare_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json manifest_base(const std::string& command, const RunConfig& rc) {
    json m;
    m["command"] = command;
    m["config_hash"] = rc.hash();
    m["seed"] = rc.model.seed;
    json cfg = json::object();
    for (const auto& [k, v] : rc.resolved()) cfg[k] = v;
    m["config"] = cfg;
    m["started_at"] = utc_now();
    return m;
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace detail

/// Rejects configurations that name both or neither graph source.
inline void require_graph_source(const RunConfig& rc) {
    if (rc.graph_path && rc.synth) throw ConfigError("set either 'graph' or synth.* parameters, not both");
    if (!rc.graph_path && !rc.synth) throw ConfigError("no graph: set 'graph' or synth.* parameters");
}

inline graph::MultiRelationGraph load_input_graph(const RunConfig& rc) {
    require_graph_source(rc);
    if (rc.graph_path) return graph::load_graph(*rc.graph_path);
    rc.synth->validate();
    return graph::generate_synthetic(*rc.synth);
}

struct SynthResult {
    fs::path graph_file;
    std::size_t n_nodes = 0;
    std::vector<std::size_t> edges_per_relation;
    double fraud_ratio = 0.0;
    double homophily = 0.0;
};

inline SynthResult cmd_synth(RunConfig rc, std::ostream& log) {
    if (rc.graph_path) throw ConfigError("synth does not take a 'graph' setting");
    if (!rc.synth) rc.synth.emplace();
    rc.synth->validate();
    detail::prepare_out_dir(rc.out_dir);
    const auto g = graph::generate_synthetic(*rc.synth);

    SynthResult res;
    res.graph_file = rc.out_dir / "graph.txt";
    graph::save_graph(res.graph_file, g);
    res.n_nodes = g.n_nodes();
    for (std::size_t r = 0; r < g.n_relations(); ++r) res.edges_per_relation.push_back(g.n_edges(r));
    const auto fraud = g.count(graph::Label::fraud), benign = g.count(graph::Label::benign);
    res.fraud_ratio = fraud + benign == 0 ? 0.0 : static_cast<double>(fraud) / static_cast<double>(fraud + benign);
    res.homophily = graph::realized_homophily(g);

    log << "nodes " << res.n_nodes << '\n';
    for (std::size_t r = 0; r < res.edges_per_relation.size(); ++r)
        log << "edges r=" << r << ' ' << res.edges_per_relation[r] << '\n';
    log << "fraud_ratio " << res.fraud_ratio << '\n';
    log << "homophily " << res.homophily << '\n';
    log << "wrote " << res.graph_file.string() << '\n';
    return res;
}

/// Mean and population standard deviation of one metric across seeds.
struct MetricSummary {
    std::vector<double> per_seed;
    double mean = 0.0;
    double std = 0.0;
};

inline MetricSummary summarize(std::vector<double> values) {
    MetricSummary s;
    s.per_seed = std::move(values);
    if (s.per_seed.empty()) return s;
    double sum = 0.0;
    for (double v : s.per_seed) sum += v;
    s.mean = sum / static_cast<double>(s.per_seed.size());
    double sq = 0.0;
    for (double v : s.per_seed) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(s.per_seed.size()));
    return s;
}

struct SeedRun {
    std::uint64_t seed = 0;
    train::TrainReport report;
    fs::path report_file;
    fs::path checkpoint_file;
    double seconds = 0.0;
};

struct TrainResult {
    std::vector<SeedRun> runs;
    std::optional<MetricSummary> auc;  ///< absent when any seed's test AUC is undefined
    MetricSummary f1_macro;
    MetricSummary g_mean;
};

inline std::string report_name(std::uint64_t seed) { return "report_seed" + std::to_string(seed) + ".jsonl"; }
inline std::string checkpoint_name(std::uint64_t seed) { return "model_seed" + std::to_string(seed) + ".ckpt"; }

/// Seeds run sequentially; each is independent, so results do not depend on order.
inline TrainResult cmd_train(const RunConfig& rc, std::ostream& log) {
    rc.model.validate();
    if (rc.seeds < 1) throw ConfigError("seeds must be >= 1");
    const auto g = load_input_graph(rc);
    const auto split = graph::stratified_split(g, rc.split_seed);
    detail::prepare_out_dir(rc.out_dir);
    auto manifest = detail::manifest_base("train", rc);

    TrainResult res;
    json timings = json::array();
    for (std::size_t k = 0; k < rc.seeds; ++k) {
        SeedRun run;
        run.seed = rc.model.seed + k;
        auto cfg = rc.model;
        cfg.seed = run.seed;
        const auto start = std::chrono::steady_clock::now();
        train::Trainer trainer(g, split, cfg);
        run.report = trainer.fit();
        run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        run.report_file = rc.out_dir / report_name(run.seed);
        run.checkpoint_file = rc.out_dir / checkpoint_name(run.seed);
        detail::write_text(run.report_file, train::report_string(run.report));
        train::save_checkpoint(run.checkpoint_file, trainer.model(), trainer.prototypes());

        json t;
        t["seed"] = run.seed;
        t["seconds"] = run.seconds;
        json epochs = json::array();
        for (const auto& e : run.report.epochs) epochs.push_back(e.seconds);
        t["epoch_seconds"] = epochs;
        timings.push_back(t);

        log << "seed " << run.seed << ": best_epoch " << run.report.best_epoch << ", test_auc ";
        if (run.report.test.auc) log << *run.report.test.auc;
        else log << "n/a";
        log << ", test_f1_macro " << run.report.test.f1_macro << ", test_g_mean " << run.report.test.g_mean << '\n';
        res.runs.push_back(std::move(run));
    }

    std::vector<double> aucs, f1s, gms;
    bool all_auc = true;
    for (const auto& r : res.runs) {
        if (r.report.test.auc) aucs.push_back(*r.report.test.auc);
        else all_auc = false;
        f1s.push_back(r.report.test.f1_macro);
        gms.push_back(r.report.test.g_mean);
    }
    if (all_auc) res.auc = summarize(aucs);
    res.f1_macro = summarize(f1s);
    res.g_mean = summarize(gms);

    auto metric = [](const MetricSummary& s) {
        json j;
        j["per_seed"] = s.per_seed;
        j["mean"] = s.mean;
        j["std"] = s.std;
        j["mean_x100"] = s.mean * 100.0;
        j["std_x10"] = s.std * 10.0;
        return j;
    };
    json summary;
    summary["config_hash"] = rc.hash();
    summary["ablation"] = train::ablation_name(rc.model.ablation);
    json seeds = json::array();
    for (const auto& r : res.runs) seeds.push_back(r.seed);
    summary["seeds"] = seeds;
    summary["test_auc"] = res.auc ? metric(*res.auc) : json(nullptr);
    summary["test_f1_macro"] = metric(res.f1_macro);
    summary["test_g_mean"] = metric(res.g_mean);
    detail::write_text(rc.out_dir / "summary.json", summary.dump(2) + "\n");

    manifest["timings"] = timings;
    manifest["finished_at"] = detail::utc_now();
    detail::write_text(rc.out_dir / "manifest.json", manifest.dump(2) + "\n");
    if (res.auc) log << "mean test_auc " << res.auc->mean << " (std " << res.auc->std << ")\n";
    return res;
}

/// A trainer bound to the run's graph and split with checkpointed weights.
struct RestoredRun {
    graph::MultiRelationGraph graph;
    graph::SplitAssignment split;
    train::ModelConfig model_config;
    std::optional<train::Trainer> trainer;
};

inline std::unique_ptr<RestoredRun> restore_run(const RunConfig& rc) {
    if (!rc.checkpoint) throw ConfigError("a checkpoint is required (--checkpoint or 'checkpoint=')");
    auto ck = train::load_checkpoint(*rc.checkpoint);
    auto run = std::make_unique<RestoredRun>(RestoredRun{load_input_graph(rc), {}, ck.model.config(), std::nullopt});
    if (ck.model.in_dim() != run->graph.dim()) {
        throw ValidationError("checkpoint expects feature dimension " + std::to_string(ck.model.in_dim()) +
                              ", graph has " + std::to_string(run->graph.dim()));
    }
    run->split = graph::stratified_split(run->graph, rc.split_seed);
    run->trainer.emplace(run->graph, run->split, run->model_config);
    run->trainer->restore(std::move(ck.model), std::move(ck.prototypes));
    return run;
}

inline eval::MetricSet cmd_eval(const RunConfig& rc, std::ostream& log) {
    auto run = restore_run(rc);
    detail::prepare_out_dir(rc.out_dir);
    auto manifest = detail::manifest_base("eval", rc);
    const auto m = run->trainer->evaluate(graph::Split::test);
    json j;
    j["checkpoint"] = rc.checkpoint->string();
    j["split_seed"] = rc.split_seed;
    j.update(train::metrics_json(m, "test_"));
    detail::write_text(rc.out_dir / "eval_metrics.json", j.dump(2) + "\n");
    manifest["finished_at"] = detail::utc_now();
    detail::write_text(rc.out_dir / "manifest.json", manifest.dump(2) + "\n");
    log << "test_auc ";
    if (m.auc) log << *m.auc;
    else log << "n/a";
    log << ", test_f1_macro " << m.f1_macro << ", test_g_mean " << m.g_mean << '\n';
    return m;
}

struct AnalyzeResult {
    std::optional<eval::DistanceReport> distances;  ///< absent for the backbone (no GCD)
    std::vector<eval::BinMetrics> bins;
};

inline AnalyzeResult cmd_analyze(const RunConfig& rc, std::ostream& log) {
    if (rc.bins < 1) throw ConfigError("bins must be >= 1");
    if (rc.sample_size < 1) throw ConfigError("sample_size must be >= 1");
    auto run = restore_run(rc);
    detail::prepare_out_dir(rc.out_dir);
    auto manifest = detail::manifest_base("analyze", rc);
    auto& trainer = *run->trainer;
    const auto inf = trainer.infer();
    const auto& g = run->graph;

    AnalyzeResult res;
    std::string dist_lines;
    if (inf.gcd) {
        // Both perspectives are always built here so distances exist for every variant.
        auto lc = run->model_config.layer_config(g.dim());
        lc.use_atypical = true;
        lc.gcd_drop = 0.0;
        const auto att = layer::build_attention<std::mt19937_64>(g, &*inf.gcd, lc, false, nullptr);
        res.distances = eval::gcd_weighted_distances(g, inf.layer_input, att, inf.gcd->g, rc.sample_size, rc.model.seed);
        for (const auto& n : res.distances->nodes) {
            json j;
            j["node"] = n.node;
            j["gcd"] = n.gcd;
            j["d_typ"] = n.d_typ;
            j["d_atyp"] = n.d_atyp;
            j["d_avg"] = n.d_avg;
            j["rate_of_change"] = n.rate_of_change;
            dist_lines += j.dump() + "\n";
        }
        json s;
        s["type"] = "summary";
        s["mean_d_typ"] = res.distances->mean_typ();
        s["mean_d_atyp"] = res.distances->mean_atyp();
        s["mean_d_avg"] = res.distances->mean_avg();
        dist_lines += s.dump() + "\n";

        std::vector<double> scores, gcd;
        std::vector<int> y;
        for (auto i : run->split.nodes(graph::Split::test)) {
            const auto l = g.label(i);
            if (l == graph::Label::unlabeled) continue;
            scores.push_back(inf.probability[i]);
            y.push_back(l == graph::Label::fraud ? 1 : 0);
            gcd.push_back(inf.gcd->g[i]);
        }
        res.bins = eval::per_gcd_range_metrics(scores, y, gcd, 2.0 / static_cast<double>(rc.bins), run->model_config.thres);
    } else {
        log << "model has no GCD path; distances and GCD bins are empty\n";
    }
    detail::write_text(rc.out_dir / "distances.jsonl", dist_lines);

    std::string bin_lines;
    for (const auto& b : res.bins) {
        json j;
        j["lo"] = b.lo;
        j["hi"] = b.hi;
        j["count"] = b.count;
        j.update(train::metrics_json(b.metrics, ""));
        bin_lines += j.dump() + "\n";
    }
    detail::write_text(rc.out_dir / "gcd_bins.jsonl", bin_lines);
    eval::export_embeddings(g.features(), inf.layer_input, g.labels(), rc.out_dir / "embeddings.csv");

    manifest["checkpoint"] = rc.checkpoint->string();
    manifest["finished_at"] = detail::utc_now();
    detail::write_text(rc.out_dir / "manifest.json", manifest.dump(2) + "\n");
    if (res.distances) {
        log << "mean d_typ " << res.distances->mean_typ() << ", mean d_atyp " << res.distances->mean_atyp() << '\n';
    }
    return res;
}

} // namespace gcdnet::cli

#endif // GCDNET_CLI_COMMANDS_HPP
