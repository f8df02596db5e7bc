#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "scamradar/pipeline.hpp"
#include "scamradar/scenario.hpp"
#include "scamradar/util.hpp"

namespace {

using namespace scamradar;

constexpr int kExitOk = 0;
constexpr int kExitDataError = 1;
constexpr int kExitConfigError = 2;

uint64_t env_seed_fallback(uint64_t flag_value, bool flag_set) {
    if (flag_set) return flag_value;
    if (const char* env = std::getenv("SCAM_RADAR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("SCAM_RADAR_SEED is not a number");
        }
    }
    return flag_value;
}

CampaignCounts parse_campaigns(const std::string& spec) {
    CampaignCounts counts{};
    std::string item;
    std::stringstream ss(spec);
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("bad --campaigns entry '" + item + "', expected kind=count");
        std::string kind = scamradar::trim(item.substr(0, eq));
        int count = 0;
        try {
            count = std::stoi(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad campaign count in '" + item + "'");
        }
        if (kind == "rugpull") counts.rug_pull = count;
        else if (kind == "pump") counts.pump_and_dump = count;
        else if (kind == "secondround") counts.second_round = count;
        else if (kind == "collusion") counts.collusion = count;
        else if (kind == "advancefee") counts.advance_fee = count;
        else throw ConfigError("unknown campaign kind '" + kind + "'");
    }
    return counts;
}

struct CommonArgs {
    std::string config_file;
    std::string data_dir;
    std::string out_dir;
    uint64_t seed = 42;
    bool seed_set = false;
    unsigned jobs = 0;
    bool jobs_set = false;

    PipelineConfig build() const {
        PipelineConfig cfg;
        if (!config_file.empty()) cfg = load_config_file(config_file);
        if (!data_dir.empty()) cfg.data_dir = data_dir;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.seed = env_seed_fallback(seed_set ? seed : cfg.seed, seed_set);
        if (jobs_set) cfg.jobs = jobs;
        if (cfg.jobs == 0) cfg.jobs = 1;
        cfg.resolve_paths();
        return cfg;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data = true) {
    cmd->add_option("--config", args.config_file, "config file (flat TOML subset)");
    if (needs_data) cmd->add_option("--data", args.data_dir, "input data directory");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "random seed (SCAM_RADAR_SEED as fallback)")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--jobs", args.jobs, "worker threads")
        ->each([&](const std::string&) { args.jobs_set = true; });
}

DataStore load_inputs(const PipelineConfig& cfg) {
    StorePaths paths{cfg.tokens, cfg.pools, cfg.events, cfg.transfers, cfg.prices};
    return load_store(paths);
}

std::set<AccountAddress> truth_scam_tokens(const std::filesystem::path& path) {
    std::set<AccountAddress> scam;
    for (const auto& row : load_truth_labels(path))
        if (row.kind == "ScamToken") scam.insert(row.address);
    return scam;
}

int cmd_generate(const CommonArgs& common, const std::string& campaigns_spec, int benign,
                 double victims, int horizon_days, double official_activity, double benign_swaps,
                 int multi_creators, int tokens_per_creator, bool deployer_demo) {
    ScenarioConfig cfg;
    cfg.seed = env_seed_fallback(common.seed, common.seed_set);
    if (!campaigns_spec.empty()) cfg.campaigns = parse_campaigns(campaigns_spec);
    cfg.benign_tokens = benign;
    cfg.victims_mean = victims;
    cfg.horizon_days = horizon_days;
    cfg.official_activity_mean = official_activity;
    cfg.benign_swaps_mean = benign_swaps;
    cfg.multi_token_creator_count = multi_creators;
    cfg.tokens_per_creator = tokens_per_creator;
    cfg.excluded_deployer_demo = deployer_demo;

    auto market = generate_market(cfg);
    audit_market(market);
    std::filesystem::path out = common.out_dir.empty() ? "data" : common.out_dir;
    write_market(market, out);

    size_t scam_pools = 0;
    for (const auto& row : market.truth)
        if (row.kind == "ScamPool") ++scam_pools;
    std::cout << "generated " << market.store.tokens.size() << " tokens, "
              << market.store.pools.size() << " pools, " << market.store.events.size()
              << " events, " << market.store.transfers.size() << " transfers ("
              << scam_pools << " scam pools) -> " << out.string() << "\n";
    return kExitOk;
}

int cmd_ingest_check(const CommonArgs& common) {
    PipelineConfig cfg = common.build();
    std::vector<IngestReject> rejects;
    LoadOptions opt{&rejects};
    StorePaths paths{cfg.tokens, cfg.pools, cfg.events, cfg.transfers, cfg.prices};
    DataStore store = load_store(paths, opt);
    auto discrepancies = validate_replay(store);

    std::cout << "accepted: " << store.tokens.size() << " tokens, " << store.pools.size()
              << " pools, " << store.events.size() << " events, " << store.transfers.size()
              << " transfers\n";
    std::cout << "rejected records: " << rejects.size() << "\n";
    for (const auto& r : rejects)
        std::cout << "  " << r.file << ":" << r.line << " field=" << r.field << " " << r.message
                  << "\n";
    std::cout << "replay discrepancies: " << discrepancies.size() << "\n";
    for (const auto& d : discrepancies)
        std::cout << "  event[" << d.event_index << "] " << d.detail << "\n";
    return rejects.empty() && discrepancies.empty() ? kExitOk : kExitDataError;
}

int cmd_features(const CommonArgs& common) {
    PipelineConfig cfg = common.build();
    DataStore store = load_inputs(cfg);
    FeatureExtractor extractor(store, cfg.tracked_liquidity_usd);
    auto rows = extractor.extract_all(cfg.jobs);
    std::filesystem::create_directories(cfg.out_dir);
    write_features_csv(cfg.out_dir / "features.csv", rows);
    std::cout << "wrote " << rows.size() << " feature rows to "
              << (cfg.out_dir / "features.csv").string() << "\n";
    return kExitOk;
}

int cmd_train(const CommonArgs& common, const std::string& truth_path) {
    PipelineConfig cfg = common.build();
    if (!truth_path.empty()) cfg.truth = truth_path;
    if (cfg.truth.empty()) throw ConfigError("train needs --truth (or truth_labels.csv in --data)");
    cfg.validate();
    DataStore store = load_inputs(cfg);
    FeatureExtractor extractor(store, cfg.tracked_liquidity_usd);
    auto rows = extractor.extract_all(cfg.jobs);
    Dataset data = dataset_from_truth(rows, truth_scam_tokens(cfg.truth));
    ForestModel model = train(data, cfg.classifier, cfg.seed, cfg.jobs);
    std::filesystem::create_directories(cfg.out_dir);
    model.save(cfg.out_dir / "model.json");
    std::cout << "trained " << model.trees.size() << " trees on " << data.size() << " rows -> "
              << (cfg.out_dir / "model.json").string() << "\n";
    return kExitOk;
}

int cmd_eval(const CommonArgs& common, const std::string& truth_path, int folds,
             const std::string& model_kind) {
    PipelineConfig cfg = common.build();
    if (!truth_path.empty()) cfg.truth = truth_path;
    if (folds > 0) cfg.folds = folds;
    if (cfg.folds < 2) throw ConfigError("--folds must be >= 2");
    if (cfg.truth.empty()) throw ConfigError("eval needs --truth (or truth_labels.csv in --data)");
    cfg.validate();

    DataStore store = load_inputs(cfg);
    FeatureExtractor extractor(store, cfg.tracked_liquidity_usd);
    auto rows = extractor.extract_all(cfg.jobs);
    Dataset data = dataset_from_truth(rows, truth_scam_tokens(cfg.truth));

    EvalReport report;
    if (model_kind == "rf")
        report = cross_validate(data, cfg.classifier, cfg.folds, cfg.seed, cfg.jobs);
    else if (model_kind == "logreg")
        report = cross_validate_baseline(data, BaselineKind::Logistic, cfg.folds, cfg.seed);
    else if (model_kind == "svm")
        report = cross_validate_baseline(data, BaselineKind::LinearSvm, cfg.folds, cfg.seed);
    else
        throw ConfigError("unknown --model '" + model_kind + "' (rf, logreg, svm)");

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir / "eval_report.json", std::ios::trunc);
        out << report.to_json() << '\n';
    }
    std::cout << "model=" << model_kind << " folds=" << cfg.folds
              << " precision=" << report.aggregate.precision
              << " recall=" << report.aggregate.recall << " f1=" << report.aggregate.f1 << "\n";
    return kExitOk;
}

int cmd_detect(const CommonArgs& common, const std::string& labels_path,
               const std::string& keywords_path) {
    PipelineConfig cfg = common.build();
    if (!labels_path.empty()) cfg.user_labels = labels_path;
    if (!keywords_path.empty()) cfg.keywords = keywords_path;
    cfg.validate();

    DataStore store = load_inputs(cfg);
    auto official = load_official_tokens(cfg.official);
    std::vector<Label> user_labels;
    if (!cfg.user_labels.empty()) user_labels = load_user_labels(cfg.user_labels);
    std::vector<std::string> keywords;
    if (!cfg.keywords.empty()) keywords = load_keywords(cfg.keywords);

    DetectOutcome outcome = run_detect(store, official, user_labels, keywords, cfg);
    write_detect_outputs(cfg.out_dir, outcome);

    std::cout << "scam tokens: " << outcome.labels.subjects_with(LabelKind::ScamToken).size()
              << ", scam pools: " << outcome.labels.subjects_with(LabelKind::ScamPool).size()
              << ", collusion addresses: "
              << outcome.labels.subjects_with(LabelKind::CollusionAddress).size()
              << ", flagged-unverified: " << outcome.ml_unverified.size() << "\n";
    std::cout << "total scammer profit: $" << outcome.impact.total_profit_usd << " from "
              << outcome.impact.total_victims << " distinct victims\n";
    std::cout << "reports written to " << cfg.out_dir.string() << "\n";
    return kExitOk;
}

int cmd_report(const CommonArgs& common) {
    PipelineConfig cfg = common.build();
    DataStore store = load_inputs(cfg);
    MarketStats stats = market_stats(store);
    std::filesystem::create_directories(cfg.out_dir);
    write_market_stats(cfg.out_dir / "market_stats.json", stats);
    std::cout << "market: " << stats.tokens << " tokens, " << stats.pools << " pools, "
              << stats.events << " events; top-1% event share " << stats.top1pct_event_share
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scamradar: rug-pull detection pipeline for constant-product DEX event logs"};
    app.require_subcommand(1);

    CommonArgs gen_args, ingest_args, feat_args, train_args, eval_args, detect_args, report_args;

    auto* gen = app.add_subcommand("generate", "emit a synthetic labeled market");
    std::string campaigns_spec;
    int benign = 1000, horizon_days = 120, multi_creators = 0, tokens_per_creator = 1;
    double victims = 3.5, official_activity = 240.0, benign_swaps = 22.0;
    bool deployer_demo = false;
    add_common(gen, gen_args, /*needs_data=*/false);
    gen->add_option("--campaigns", campaigns_spec,
                    "kind=count list: rugpull,pump,secondround,collusion,advancefee");
    gen->add_option("--benign", benign, "benign token count");
    gen->add_option("--victims", victims, "mean victims per scam pool");
    gen->add_option("--horizon-days", horizon_days, "market length in days");
    gen->add_option("--official-activity", official_activity, "mean swaps per official pool");
    gen->add_option("--benign-swaps", benign_swaps, "mean swaps per benign pool");
    gen->add_option("--multi-creators", multi_creators, "creators that run several campaigns");
    gen->add_option("--tokens-per-creator", tokens_per_creator, "campaigns per shared creator");
    gen->add_flag("--deployer-demo", deployer_demo, "plant an excluded contract-deployer case");

    auto* ingest = app.add_subcommand("ingest-check", "parse, validate, and replay the inputs");
    add_common(ingest, ingest_args);

    auto* feats = app.add_subcommand("features", "extract per-token feature vectors");
    add_common(feats, feat_args);

    auto* train_cmd = app.add_subcommand("train", "train the classifier on ground truth");
    std::string train_truth;
    add_common(train_cmd, train_args);
    train_cmd->add_option("--truth", train_truth, "truth_labels.csv path");

    auto* eval_cmd = app.add_subcommand("eval", "stratified k-fold cross validation");
    std::string eval_truth, eval_model = "rf";
    int eval_folds = 0;
    add_common(eval_cmd, eval_args);
    eval_cmd->add_option("--truth", eval_truth, "truth_labels.csv path");
    eval_cmd->add_option("--folds", eval_folds, "fold count (>= 2)");
    eval_cmd->add_option("--model", eval_model, "rf (default), logreg, or svm");

    auto* detect = app.add_subcommand("detect", "run the full detection pipeline");
    std::string detect_labels, detect_keywords;
    add_common(detect, detect_args);
    detect->add_option("--labels", detect_labels, "user label csv (address,kind)");
    detect->add_option("--keywords", detect_keywords, "brand keyword list, one per line");

    auto* report = app.add_subcommand("report", "descriptive market statistics");
    add_common(report, report_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (gen->parsed())
            return cmd_generate(gen_args, campaigns_spec, benign, victims, horizon_days,
                                official_activity, benign_swaps, multi_creators,
                                tokens_per_creator, deployer_demo);
        if (ingest->parsed()) return cmd_ingest_check(ingest_args);
        if (feats->parsed()) return cmd_features(feat_args);
        if (train_cmd->parsed()) return cmd_train(train_args, train_truth);
        if (eval_cmd->parsed()) return cmd_eval(eval_args, eval_truth, eval_folds, eval_model);
        if (detect->parsed()) return cmd_detect(detect_args, detect_labels, detect_keywords);
        if (report->parsed()) return cmd_report(report_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const IngestError& e) {
        std::cerr << "data error";
        if (e.line > 0) std::cerr << " (line " << e.line << ", field " << e.field << ")";
        std::cerr << ": " << e.what() << "\n";
        return kExitDataError;
    } catch (const DuplicateRecord& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const MissingPrice& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const InsufficientData& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const DegenerateDataset& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitOk;
}
