#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scamradar/ingest.hpp"

namespace scamradar {

// Per-token event view: every pool event of every pool the token sits in,
// in canonical order, bracketed by the token's first/last activity.
struct TokenTimeline {
    AccountAddress token;
    std::vector<size_t> event_indices;  // into store.events
    int64_t t_start = 0;
    int64_t t_end = 0;
    int64_t study_time = 0;
};

// Event classes a feature can range over. SwapTo buys the token (token flows
// out of the pool), SwapFrom sells it.
enum class EventClass { Mint, Swap, SwapTo, SwapFrom, Burn };

constexpr size_t kFeatureCount = 40;

struct FeatureVector {
    std::array<double, kFeatureCount> v{};

    static const std::array<const char*, kFeatureCount>& names();
    static int index_of(const std::string& name);  // -1 if unknown

    double operator[](size_t i) const { return v[i]; }
    double& operator[](size_t i) { return v[i]; }
    double get(const std::string& name) const { return v[index_of(name)]; }
};

// Missing-value code shared by every ratio, time-position, and investor
// average whose defining set is empty.
constexpr double kSentinel = -1.0;

// Mean relative position of a class's events inside [t_start, t_end]:
// sentinel when the class is empty, 0 when the window is a single instant.
double time_position(const DataStore& store, const TokenTimeline& timeline, EventClass cls);

class FeatureExtractor {
public:
    explicit FeatureExtractor(const DataStore& store, double tracked_liquidity_usd = 1.0);

    TokenTimeline timeline(const AccountAddress& token) const;  // throws NotFound
    FeatureVector extract(const AccountAddress& token) const;   // throws NotFound

    // One row per registry token, keyed and ordered by address.
    std::map<AccountAddress, FeatureVector> extract_all(unsigned jobs = 1) const;

private:
    const DataStore& store_;
    double tracked_liquidity_usd_;
    // Store-wide investor aggregates.
    std::map<AccountAddress, int> pools_touched_;
    std::map<AccountAddress, int64_t> mintburn_count_;
    std::map<AccountAddress, int64_t> swap_count_;
    std::map<AccountAddress, bool> pool_tracked_;
};

void write_features_csv(const std::filesystem::path& path,
                        const std::map<AccountAddress, FeatureVector>& rows);

}  // namespace scamradar
