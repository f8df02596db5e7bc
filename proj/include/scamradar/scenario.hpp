#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scamradar/ingest.hpp"

namespace scamradar {

enum class CampaignKind {
    RugPull,
    PumpAndDumpRugPull,
    SecondRoundRugPull,
    CollusionRugPull,
    AdvanceFee,
    Benign,
};

const char* to_string(CampaignKind k);

struct CampaignCounts {
    int rug_pull = 0;
    int pump_and_dump = 0;
    int second_round = 0;
    int collusion = 0;
    int advance_fee = 0;
    int total() const {
        return rug_pull + pump_and_dump + second_round + collusion + advance_fee;
    }
};

struct ScenarioConfig {
    uint64_t seed = 42;
    int benign_tokens = 1000;
    CampaignCounts campaigns{700, 100, 80, 96, 24};
    double victims_mean = 3.5;
    int horizon_days = 120;

    // Organic-activity dials; the small values are for compact test stores.
    double official_activity_mean = 240.0;
    double benign_swaps_mean = 22.0;
    int benign_swaps_cap = 320;

    // How scam tokens are named; the remainder gets unique one-off names that
    // only creator expansion can reach.
    double name_clone_fraction = 0.45;
    double shared_fake_name_fraction = 0.40;
    double brand_name_fraction = 0.15;

    // Groups the first count*size scam campaigns under shared creators, with
    // one name-clone leader and unique-named followers per creator.
    int multi_token_creator_count = 0;
    int tokens_per_creator = 1;

    // Plants a Contract Deployer address that created one seeded scam token
    // and a batch of benign tokens, plus the matching user-label row.
    bool excluded_deployer_demo = false;
    int excluded_deployer_benign_tokens = 50;

    double advance_fee_fraction = 0.05;
    int user_population = 0;  // 0 = derived from victims_mean and campaign count

    void validate() const;  // throws ConfigError
};

// The per-campaign plan; kept for the audit pass.
struct CampaignScript {
    CampaignKind kind = CampaignKind::RugPull;
    std::vector<AccountAddress> scammer_addresses;
    std::pair<TokenAmount, TokenAmount> initial_liquidity;  // (valuable side, token side)
    int victim_count = 0;
    int64_t mint_ts = 0;
    int64_t burn_ts = 0;
    uint64_t rng_seed = 0;
    AccountAddress token;
    AccountAddress pool;
};

struct TruthRow {
    AccountAddress address;
    std::string kind;  // ScamToken, ScamPool, ...Creator, CollusionAddress, Victim, AdvanceFeeCollector
    std::string rule;
};

// Exact per-pool accounting kept while scripting; the downstream impact
// numbers are checked against this.
struct PoolLedger {
    AccountAddress pool;
    AccountAddress token;
    AccountAddress valuable;
    BigInt valuable_in_units = 0;   // scam addresses -> pool
    BigInt valuable_out_units = 0;  // pool -> scam addresses
    BigInt gross_in_units = 0;      // mint legs only
    BigInt gross_out_units = 0;     // burn legs only
    double profit_usd = 0;
    double gross_profit_usd = 0;
    int victim_count = 0;
    int64_t rug_interval_s = -1;
    int rounds = 0;
    bool scammer_swap_involved = false;
    std::optional<std::pair<AccountAddress, double>> advance_fee;
    std::map<std::string, std::vector<AccountAddress>> collusion;  // p1..p4, twohop
};

struct GeneratedMarket {
    DataStore store;
    std::vector<OfficialEntry> official;
    std::vector<TruthRow> truth;
    std::vector<PoolLedger> ledger;
    std::vector<CampaignScript> scripts;
    std::vector<std::string> brand_keywords;
    std::vector<Label> user_labels;
};

// Deterministic: equal config (including seed) gives identical output,
// including file bytes written by write_market.
GeneratedMarket generate_market(const ScenarioConfig& config);

// Emits the ingest file set plus truth_labels.csv and truth_ledger.json.
void write_market(const GeneratedMarket& market, const std::filesystem::path& dir);

// Rescans scripts and emitted records; throws std::logic_error when a scam
// role is missing from the truth rows, a victim touches scam money flow, or
// the pool logs fail engine replay.
void audit_market(const GeneratedMarket& market);

std::vector<TruthRow> load_truth_labels(const std::filesystem::path& path);

}  // namespace scamradar
