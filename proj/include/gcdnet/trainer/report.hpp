#ifndef GCDNET_TRAINER_REPORT_HPP
#define GCDNET_TRAINER_REPORT_HPP

#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "gcdnet/evalkit/metrics.hpp"
#include "gcdnet/trainer/trainer.hpp"

namespace gcdnet::train {

// JSONL layout: one {"type":"epoch",...} record per epoch (epoch 0 is the
// evaluation before training) followed by one {"type":"final",...} record.
// Wall-clock times are deliberately absent; they go to the run manifest.

inline nlohmann::ordered_json metrics_json(const eval::MetricSet& m, const std::string& prefix) {
    nlohmann::ordered_json j;
    j[prefix + "auc"] = m.auc ? nlohmann::ordered_json(*m.auc) : nlohmann::ordered_json(nullptr);
    j[prefix + "f1_macro"] = m.f1_macro;
    j[prefix + "g_mean"] = m.g_mean;
    j[prefix + "support_fraud"] = m.support_fraud;
    j[prefix + "support_benign"] = m.support_benign;
    return j;
}

inline nlohmann::ordered_json epoch_json(const EpochStats& e) {
    nlohmann::ordered_json j;
    j["type"] = "epoch";
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["batch_loss"] = e.batch_loss;
    j.update(metrics_json(e.valid, "valid_"));
    return j;
}

inline nlohmann::ordered_json final_json(const TrainReport& r) {
    nlohmann::ordered_json j;
    j["type"] = "final";
    j["best_epoch"] = r.best_epoch;
    j["best_valid_auc"] = r.best_valid_auc ? nlohmann::ordered_json(*r.best_valid_auc) : nlohmann::ordered_json(nullptr);
    j["epochs_run"] = r.epochs.empty() ? 0 : r.epochs.back().epoch;
    j["skipped_batches"] = r.skipped_batches;
    j.update(metrics_json(r.test, "test_"));
    return j;
}

inline void write_report(std::ostream& out, const TrainReport& r) {
    for (const auto& e : r.epochs) out << epoch_json(e).dump() << '\n';
    out << final_json(r).dump() << '\n';
}

inline std::string report_string(const TrainReport& r) {
    std::ostringstream os;
    write_report(os, r);
    return os.str();
}

} // namespace gcdnet::train

#endif // GCDNET_TRAINER_REPORT_HPP
