#include "scamradar/pipeline.hpp"

#include <fstream>

#include <json.hpp>

#include "scamradar/util.hpp"

namespace scamradar {

DetectOutcome run_detect(const DataStore& store, const std::vector<OfficialEntry>& official,
                         const std::vector<Label>& user_labels,
                         const std::vector<std::string>& brand_keywords,
                         const PipelineConfig& cfg) {
    DetectOutcome out;
    require_weth_price(store.prices, official);
    out.replay_discrepancies = validate_replay(store).size();

    std::set<AccountAddress> valuable = valuable_from_officials(official);
    for (const auto& text : cfg.extra_valuable) valuable.insert(canonicalize_address(text));

    out.labels = seed_ground_truth(store, official, user_labels);
    expand_guilt(store, out.labels);

    FeatureExtractor extractor(store, cfg.tracked_liquidity_usd);
    out.features = extractor.extract_all(cfg.jobs);

    // Supervised stage over the not-yet-labeled tokens.
    Dataset training;
    std::vector<AccountAddress> unlabeled;
    for (const auto& [addr, row] : out.features) {
        if (out.labels.has(addr, LabelKind::ScamToken)) {
            training.x.push_back(row.v);
            training.y.push_back(1);
        } else if (out.labels.has(addr, LabelKind::OfficialToken)) {
            training.x.push_back(row.v);
            training.y.push_back(0);
        } else {
            unlabeled.push_back(addr);
        }
    }
    bool has0 = false, has1 = false;
    for (int y : training.y) (y ? has1 : has0) = true;
    if (has0 && has1 && !unlabeled.empty()) {
        ForestModel model = train(training, cfg.classifier, cfg.seed, cfg.jobs);
        std::vector<int> flagged(unlabeled.size());
        std::vector<const FeatureVector*> rows(unlabeled.size());
        for (size_t i = 0; i < unlabeled.size(); ++i) rows[i] = &out.features.at(unlabeled[i]);
        parallel_for(unlabeled.size(), cfg.jobs,
                     [&](size_t i) { flagged[i] = predict(model, rows[i]->v).label; });
        for (size_t i = 0; i < unlabeled.size(); ++i)
            if (flagged[i]) out.ml_flagged.insert(unlabeled[i]);
    }

    auto verify = verify_flagged(store, out.labels, out.ml_flagged, brand_keywords, cfg.min_group);
    out.ml_verified = std::move(verify.verified);
    out.ml_unverified = std::move(verify.unverified);

    expand_guilt(store, out.labels);
    detect_collusion(store, out.labels, valuable, cfg.jobs);

    out.impact = build_impact_report(store, out.labels, valuable, cfg.drain_fraction,
                                     cfg.min_occurrences, cfg.jobs);
    out.stats = market_stats(store);
    return out;
}

void write_detect_outputs(const std::filesystem::path& out_dir, const DetectOutcome& outcome) {
    std::filesystem::create_directories(out_dir);
    write_labels_csv(out_dir / "labels_out.csv", outcome.labels);
    write_features_csv(out_dir / "features.csv", outcome.features);
    write_impact_report(out_dir / "impact_report.json", outcome.impact);
    write_rug_histogram(out_dir / "rug_histogram.csv", outcome.impact);
    write_market_stats(out_dir / "market_stats.json", outcome.stats);

    nlohmann::ordered_json j;
    j["replayDiscrepancies"] = outcome.replay_discrepancies;
    j["mlFlagged"] = outcome.ml_flagged.size();
    j["mlVerified"] = outcome.ml_verified.size();
    j["mlUnverified"] = outcome.ml_unverified.size();
    auto label_counts = nlohmann::ordered_json::object();
    for (auto kind : {LabelKind::OfficialToken, LabelKind::ScamToken, LabelKind::ScamPool,
                      LabelKind::ScamTokenCreator, LabelKind::ScamPoolCreator,
                      LabelKind::CollusionAddress, LabelKind::ContractDeployerExcluded})
        label_counts[to_string(kind)] = outcome.labels.subjects_with(kind).size();
    j["labelCounts"] = label_counts;
    auto unverified = nlohmann::ordered_json::array();
    for (const auto& a : outcome.ml_unverified) unverified.push_back(a.render());
    j["unverifiedFlagged"] = unverified;
    std::ofstream out(out_dir / "detect_summary.json", std::ios::trunc);
    out << j.dump(2) << '\n';
}

Dataset dataset_from_truth(const std::map<AccountAddress, FeatureVector>& features,
                           const std::set<AccountAddress>& scam_tokens) {
    Dataset data;
    for (const auto& [addr, row] : features) {
        data.x.push_back(row.v);
        data.y.push_back(scam_tokens.count(addr) ? 1 : 0);
    }
    return data;
}

}  // namespace scamradar
