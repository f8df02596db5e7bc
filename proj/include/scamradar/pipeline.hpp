#pragma once

#include "scamradar/association.hpp"
#include "scamradar/config.hpp"
#include "scamradar/features.hpp"
#include "scamradar/forest.hpp"
#include "scamradar/impact.hpp"

namespace scamradar {

struct DetectOutcome {
    LabelStore labels;
    std::map<AccountAddress, FeatureVector> features;
    std::set<AccountAddress> ml_flagged;
    std::set<AccountAddress> ml_verified;
    std::set<AccountAddress> ml_unverified;
    ImpactReport impact;
    MarketStats stats;
    size_t replay_discrepancies = 0;
};

// The full detection pass: seed, expand, extract, classify, verify, expand
// again, collusion, impact. The classifier trains on the labeled tokens
// (official vs scam) and runs over the unlabeled remainder; when either
// class is empty that stage is skipped and only the heuristics apply.
DetectOutcome run_detect(const DataStore& store, const std::vector<OfficialEntry>& official,
                         const std::vector<Label>& user_labels,
                         const std::vector<std::string>& brand_keywords,
                         const PipelineConfig& cfg);

// labels_out.csv, features.csv, impact_report.json, rug_histogram.csv,
// market_stats.json, detect_summary.json under out_dir.
void write_detect_outputs(const std::filesystem::path& out_dir, const DetectOutcome& outcome);

// Assembles the classifier dataset from extracted features and ground-truth
// scam rows (ScamToken entries mark the positive class).
Dataset dataset_from_truth(const std::map<AccountAddress, FeatureVector>& features,
                           const std::set<AccountAddress>& scam_tokens);

}  // namespace scamradar
