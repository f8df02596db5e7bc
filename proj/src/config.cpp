#include "scamradar/config.hpp"

#include <fstream>

#include "scamradar/errors.hpp"
#include "scamradar/util.hpp"

namespace scamradar {

void PipelineConfig::resolve_paths() {
    if (data_dir.empty()) return;
    auto fill = [&](std::filesystem::path& p, const char* name) {
        if (p.empty()) p = data_dir / name;
    };
    fill(tokens, "tokens.csv");
    fill(pools, "pools.csv");
    fill(events, "events.jsonl");
    fill(transfers, "transfers.jsonl");
    fill(official, "official.csv");
    fill(prices, "prices.csv");
    auto fill_optional = [&](std::filesystem::path& p, const char* name) {
        if (p.empty() && std::filesystem::exists(data_dir / name)) p = data_dir / name;
    };
    fill_optional(user_labels, "labels.csv");
    fill_optional(keywords, "brand_keywords.txt");
    fill_optional(truth, "truth_labels.csv");
}

void PipelineConfig::validate() const {
    if (folds < 2) throw ConfigError("folds must be >= 2");
    if (classifier.n_trees < 1) throw ConfigError("n_trees must be >= 1");
    if (classifier.min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
    if (classifier.features_per_split < 1 ||
        classifier.features_per_split > static_cast<int>(kFeatureCount))
        throw ConfigError("features_per_split out of range");
    if (drain_fraction <= 0 || drain_fraction > 1)
        throw ConfigError("drain_fraction must lie in (0,1]");
    if (min_group < 2) throw ConfigError("min_group must be >= 2");
    if (min_occurrences < 1) throw ConfigError("min_occurrences must be >= 1");
    if (tracked_liquidity_usd < 0) throw ConfigError("tracked_liquidity_usd must be >= 0");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

namespace {

std::string unquote(const std::string& v, const std::string& where) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (!v.empty() && v.front() == '"')
        throw ConfigError("unterminated string at " + where);
    return v;
}

int64_t to_int(const std::string& v, const std::string& where) {
    try {
        size_t pos = 0;
        int64_t r = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("expected integer for " + where + ", got '" + v + "'");
    }
}

double to_double(const std::string& v, const std::string& where) {
    try {
        size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("expected number for " + where + ", got '" + v + "'");
    }
}

}  // namespace

PipelineConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    PipelineConfig cfg;
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string text = trim(line);
        if (text.empty()) continue;
        std::string where = path.string() + ":" + std::to_string(line_no);
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("malformed section at " + where);
            section = trim(text.substr(1, text.size() - 2));
            continue;
        }
        auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value at " + where);
        std::string key = trim(text.substr(0, eq));
        std::string value = unquote(trim(text.substr(eq + 1)), where);
        std::string full = section.empty() ? key : section + "." + key;

        if (full == "seed") cfg.seed = static_cast<uint64_t>(to_int(value, where));
        else if (full == "jobs") cfg.jobs = static_cast<unsigned>(to_int(value, where));
        else if (full == "paths.data_dir") cfg.data_dir = value;
        else if (full == "paths.tokens") cfg.tokens = value;
        else if (full == "paths.pools") cfg.pools = value;
        else if (full == "paths.events") cfg.events = value;
        else if (full == "paths.transfers") cfg.transfers = value;
        else if (full == "paths.official") cfg.official = value;
        else if (full == "paths.prices") cfg.prices = value;
        else if (full == "paths.labels") cfg.user_labels = value;
        else if (full == "paths.keywords") cfg.keywords = value;
        else if (full == "paths.truth") cfg.truth = value;
        else if (full == "paths.out_dir") cfg.out_dir = value;
        else if (full == "classifier.n_trees") cfg.classifier.n_trees = static_cast<int>(to_int(value, where));
        else if (full == "classifier.max_depth") cfg.classifier.max_depth = static_cast<int>(to_int(value, where));
        else if (full == "classifier.min_leaf") cfg.classifier.min_leaf = static_cast<int>(to_int(value, where));
        else if (full == "classifier.features_per_split")
            cfg.classifier.features_per_split = static_cast<int>(to_int(value, where));
        else if (full == "classifier.folds") cfg.folds = static_cast<int>(to_int(value, where));
        else if (full == "thresholds.drain_fraction") cfg.drain_fraction = to_double(value, where);
        else if (full == "thresholds.min_group") cfg.min_group = static_cast<int>(to_int(value, where));
        else if (full == "thresholds.min_occurrences")
            cfg.min_occurrences = static_cast<int>(to_int(value, where));
        else if (full == "thresholds.tracked_liquidity_usd")
            cfg.tracked_liquidity_usd = to_double(value, where);
        else if (full == "valuable.extra") cfg.extra_valuable.push_back(value);
        else throw ConfigError("unknown config key '" + full + "' at " + where);
    }
    return cfg;
}

}  // namespace scamradar
