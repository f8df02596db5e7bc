#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scamradar/association.hpp"
#include "scamradar/ingest.hpp"

namespace scamradar {

struct AdvanceFeeFinding {
    AccountAddress fee_address;
    double fraction = 0;
    int occurrences = 0;
};

struct PoolScamProfile {
    AccountAddress pool;
    int64_t first_mint_ts = -1;        // first scam-address mint
    int64_t first_major_burn_ts = -1;  // first scam-address drain burn
    int64_t rug_interval_seconds = -1;
    int rounds = 0;  // completed add-then-drain cycles by scam addresses
    bool scammer_swap_involved = false;
    std::optional<AdvanceFeeFinding> advance_fee;
    bool complete = false;  // false: no scam-address mint was found on the pool
};

// Requires a ScamPool label. Scam addresses are everything labeled
// ScamTokenCreator, ScamPoolCreator, or CollusionAddress. A burn is a drain
// when it removes at least drain_fraction of the burner's LP balance.
PoolScamProfile profile_rug(const DataStore& store, const LabelStore& labels,
                            const AccountAddress& pool, double drain_fraction = 0.9,
                            int fee_min_occurrences = 5);

// Looks for a fixed third-party address receiving a consistent fraction of
// the main token transfer across at least min_occurrences transactions.
std::optional<AdvanceFeeFinding> detect_advance_fee(const DataStore& store,
                                                    const AccountAddress& token,
                                                    int min_occurrences = 5,
                                                    double rel_tolerance = 1e-6);

struct PoolProfit {
    double profit_usd = 0;        // all valuable-token flows with scam addresses
    double gross_profit_usd = 0;  // burn minus mint legs only
    int victim_count = 0;         // distinct non-scam addresses with pool events
};

// Valuable-token flows between the pool and scam-labeled addresses, valued at
// snapshot prices; scam-token legs count as worthless.
PoolProfit compute_profit(const DataStore& store, const LabelStore& labels,
                          const AccountAddress& pool, const std::set<AccountAddress>& valuable);

struct ConservationIssue {
    AccountAddress pool;
    std::string detail;
};

// Recorded flows versus engine-replayed final reserves, exact integer check.
std::vector<ConservationIssue> check_conservation(const DataStore& store);

struct ImpactReport {
    struct PoolEntry {
        AccountAddress pool;
        AccountAddress token;
        PoolProfit profit;
        PoolScamProfile profile;
    };
    std::vector<PoolEntry> pools;
    double total_profit_usd = 0;
    double total_gross_profit_usd = 0;
    int64_t total_victims = 0;  // distinct across all scam pools
    double mean_profit_per_pool = 0;
    double share_under_1h = 0;   // of pools with a measured rug interval
    double share_under_1d = 0;
};

ImpactReport build_impact_report(const DataStore& store, const LabelStore& labels,
                                 const std::set<AccountAddress>& valuable,
                                 double drain_fraction = 0.9, int min_occurrences = 5,
                                 unsigned jobs = 1);

void write_impact_report(const std::filesystem::path& path, const ImpactReport& report);
void write_rug_histogram(const std::filesystem::path& path, const ImpactReport& report);

// Descriptive statistics over whatever is loaded: event-share concentration,
// participant breakdown by event type, daily counts, volume shares.
struct MarketStats {
    int64_t tokens = 0, pools = 0, events = 0, transfers = 0, addresses = 0;
    int64_t mints = 0, swaps = 0, burns = 0;
    double top1pct_event_share = 0;
    double top5pct_event_share = 0;
    double top1pct_volume_share = 0;
    double share_addresses_swap_only = 0;
    double share_addresses_mintburn_only = 0;
    int64_t pools_under_one_usd = 0;
    std::map<int64_t, int64_t> daily_events;  // day index (unix/86400) -> count
};

MarketStats market_stats(const DataStore& store);
void write_market_stats(const std::filesystem::path& path, const MarketStats& stats);

}  // namespace scamradar
