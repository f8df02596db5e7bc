#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scamradar/amm.hpp"
#include "scamradar/core.hpp"

namespace scamradar {

// One static USD snapshot used everywhere a dollar value is reported.
struct PriceTable {
    std::map<AccountAddress, double> usd;
    std::string valuation_date;

    std::optional<double> try_usd(const AccountAddress& token) const {
        auto it = usd.find(token);
        return it == usd.end() ? std::nullopt : std::optional<double>(it->second);
    }
    double usd_of(const AccountAddress& token) const;  // throws MissingPrice
};

struct OfficialEntry {
    AccountAddress address;
    std::string name;    // normalized
    std::string symbol;  // normalized
};

// A record skipped in collecting mode; loaders throw instead when no sink is given.
struct IngestReject {
    std::string file;
    std::size_t line = 0;
    std::string field;
    std::string message;
};

struct LoadOptions {
    std::vector<IngestReject>* rejects = nullptr;
};

// Immutable after build_indices(); all views below index into `events` and
// `transfers`, which hold the canonical (timestamp, tx, logIndex) order.
struct DataStore {
    std::map<AccountAddress, TokenInfo> tokens;
    std::map<AccountAddress, PoolInfo> pools;
    std::vector<PoolEvent> events;
    std::vector<TransferRecord> transfers;
    PriceTable prices;
    int64_t study_time = 0;

    std::map<AccountAddress, std::vector<size_t>> events_by_pool;
    std::map<AccountAddress, std::vector<size_t>> events_by_token;
    std::map<AccountAddress, std::vector<size_t>> events_by_initiator;
    std::map<AccountAddress, std::vector<AccountAddress>> pools_by_token;
    std::map<AccountAddress, std::vector<size_t>> transfers_by_token;
    std::map<AccountAddress, std::vector<size_t>> transfers_by_from;
    std::map<AccountAddress, std::vector<size_t>> transfers_by_to;

    // Which side of `pool` the token sits on: 0, 1, or -1 if absent.
    int token_side(const AccountAddress& pool, const AccountAddress& token) const;

    void sort_and_index();  // sorts, rejects duplicate (tx, logIndex), builds views
};

// --- loaders -----------------------------------------------------------------

std::map<AccountAddress, TokenInfo> load_tokens(const std::filesystem::path& path,
                                                LoadOptions opt = {});
std::map<AccountAddress, PoolInfo> load_pools(const std::filesystem::path& path,
                                              const std::map<AccountAddress, TokenInfo>& tokens,
                                              LoadOptions opt = {});
std::vector<PoolEvent> load_events(const std::filesystem::path& path,
                                   const std::map<AccountAddress, TokenInfo>& tokens,
                                   const std::map<AccountAddress, PoolInfo>& pools,
                                   LoadOptions opt = {});
std::vector<TransferRecord> load_transfers(const std::filesystem::path& path,
                                           const std::map<AccountAddress, TokenInfo>& tokens,
                                           LoadOptions opt = {});
std::vector<OfficialEntry> load_official_tokens(const std::filesystem::path& path,
                                                LoadOptions opt = {});
PriceTable load_price_table(const std::filesystem::path& path, LoadOptions opt = {});
std::vector<Label> load_user_labels(const std::filesystem::path& path, LoadOptions opt = {});
std::vector<std::string> load_keywords(const std::filesystem::path& path);

struct StorePaths {
    std::filesystem::path tokens;
    std::filesystem::path pools;
    std::filesystem::path events;
    std::filesystem::path transfers;
    std::filesystem::path prices;
};

// Loads and cross-validates the full input set. load_price_table already
// requires ETH; WETH presence is checked against the official list, which is
// the only place the real WETH address is known.
DataStore load_store(const StorePaths& paths, LoadOptions opt = {});

void require_weth_price(const PriceTable& prices, const std::vector<OfficialEntry>& official);

// --- writers (used by the generator and for snapshots) -------------------------

void write_events(const std::filesystem::path& path, const std::vector<PoolEvent>& events);
void write_transfers(const std::filesystem::path& path, const std::vector<TransferRecord>& transfers);
void write_tokens(const std::filesystem::path& path,
                  const std::map<AccountAddress, TokenInfo>& tokens);
void write_pools(const std::filesystem::path& path,
                 const std::map<AccountAddress, PoolInfo>& pools);
void write_official(const std::filesystem::path& path, const std::vector<OfficialEntry>& entries);
void write_prices(const std::filesystem::path& path, const PriceTable& prices);

// --- replay validation ----------------------------------------------------------

struct Discrepancy {
    size_t event_index;  // into store.events
    std::string detail;
};

// Replays every pool's log through the AMM engine and reports events whose
// recorded outputs deviate from the engine by more than one base unit.
std::vector<Discrepancy> validate_replay(const DataStore& store);

}  // namespace scamradar
