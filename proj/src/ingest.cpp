#include "scamradar/ingest.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

using nlohmann::ordered_json;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string(), 0, "file");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    return out;
}

// Runs one line's parser; routes failures to the reject sink or rethrows.
template <typename Fn>
void guard_line(const std::filesystem::path& file, size_t line_no, LoadOptions opt, Fn&& fn) {
    try {
        fn();
    } catch (const IngestError& e) {
        if (!opt.rejects) throw IngestError(e.what(), line_no, e.field);
        opt.rejects->push_back({file.string(), line_no, e.field, e.what()});
    } catch (const DuplicateRecord& e) {
        if (!opt.rejects) throw;
        opt.rejects->push_back({file.string(), line_no, "", e.what()});
    } catch (const std::exception& e) {
        if (!opt.rejects) throw IngestError(e.what(), line_no, "");
        opt.rejects->push_back({file.string(), line_no, "", e.what()});
    }
}

AccountAddress field_address(const ordered_json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_string())
        throw IngestError("missing or non-string field", 0, field);
    try {
        return AccountAddress::parse(j[field].get<std::string>());
    } catch (const ParseError& e) {
        throw IngestError(e.what(), 0, field);
    }
}

int64_t field_int(const ordered_json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number_integer())
        throw IngestError("missing or non-integer field", 0, field);
    return j[field].get<int64_t>();
}

TokenAmount field_amount(const ordered_json& j, const char* field, int decimals) {
    if (!j.contains(field) || !j[field].is_string())
        throw IngestError("missing or non-string amount field", 0, field);
    try {
        return TokenAmount::parse(j[field].get<std::string>(), decimals);
    } catch (const ParseError& e) {
        throw IngestError(e.what(), 0, field);
    }
}

AccountAddress parse_token_or_eth(const std::string& s, const char* field) {
    if (s == "ETH") return AccountAddress::eth_sentinel();
    try {
        return AccountAddress::parse(s);
    } catch (const ParseError& e) {
        throw IngestError(e.what(), 0, field);
    }
}

std::string render_token_or_eth(const AccountAddress& a) {
    return a.is_eth() ? "ETH" : a.render();
}

void expect_header(std::ifstream& in, const std::filesystem::path& path, const char* expected) {
    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty file, expected header", 1, "header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
        throw IngestError("bad header in " + path.string() + ": expected '" + expected + "'", 1,
                          "header");
}

}  // namespace

double PriceTable::usd_of(const AccountAddress& token) const {
    auto p = try_usd(token);
    if (!p) throw MissingPrice("no USD price for " + render_token_or_eth(token));
    return *p;
}

int DataStore::token_side(const AccountAddress& pool, const AccountAddress& token) const {
    auto it = pools.find(pool);
    if (it == pools.end()) return -1;
    if (it->second.token0 == token) return 0;
    if (it->second.token1 == token) return 1;
    return -1;
}

void DataStore::sort_and_index() {
    auto by_key = [](const auto& a, const auto& b) { return a.key() < b.key(); };
    std::sort(events.begin(), events.end(), by_key);
    std::sort(transfers.begin(), transfers.end(), by_key);

    std::set<std::pair<TxHash, int32_t>> seen;
    for (const auto& e : events)
        if (!seen.insert({e.tx_hash, e.log_index}).second)
            throw DuplicateRecord("duplicate event (tx, logIndex): " + e.tx_hash.render() + " #" +
                                  std::to_string(e.log_index));
    seen.clear();
    for (const auto& t : transfers)
        if (!seen.insert({t.tx_hash, t.log_index}).second)
            throw DuplicateRecord("duplicate transfer (tx, logIndex): " + t.tx_hash.render() +
                                  " #" + std::to_string(t.log_index));

    events_by_pool.clear();
    events_by_token.clear();
    events_by_initiator.clear();
    pools_by_token.clear();
    transfers_by_token.clear();
    transfers_by_from.clear();
    transfers_by_to.clear();

    for (const auto& [addr, pool] : pools) {
        pools_by_token[pool.token0].push_back(addr);
        pools_by_token[pool.token1].push_back(addr);
    }
    for (size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        events_by_pool[e.pool].push_back(i);
        events_by_initiator[e.initiator].push_back(i);
        auto it = pools.find(e.pool);
        if (it != pools.end()) {
            events_by_token[it->second.token0].push_back(i);
            if (it->second.token1 != it->second.token0)
                events_by_token[it->second.token1].push_back(i);
        }
    }
    for (size_t i = 0; i < transfers.size(); ++i) {
        const auto& t = transfers[i];
        transfers_by_token[t.token].push_back(i);
        transfers_by_from[t.from].push_back(i);
        transfers_by_to[t.to].push_back(i);
    }

    study_time = 0;
    if (!events.empty()) study_time = std::max(study_time, events.back().timestamp);
    if (!transfers.empty()) study_time = std::max(study_time, transfers.back().timestamp);
}

// --- CSV loaders ----------------------------------------------------------------

std::map<AccountAddress, TokenInfo> load_tokens(const std::filesystem::path& path,
                                                LoadOptions opt) {
    auto in = open_input(path);
    expect_header(in, path, "address,name,symbol,decimals,creator,createdTs");
    std::map<AccountAddress, TokenInfo> out;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            auto f = csv_split(line);
            if (f.size() != 6) throw IngestError("expected 6 fields", 0, "row");
            TokenInfo t;
            t.address = AccountAddress::parse(f[0]);
            t.name = f[1];
            t.symbol = f[2];
            t.decimals = std::stoi(f[3]);
            if (t.decimals < 0 || t.decimals > 36)
                throw IngestError("decimals out of range", 0, "decimals");
            t.creator = AccountAddress::parse(f[4]);
            t.creation_time = std::stoll(f[5]);
            if (!out.emplace(t.address, t).second)
                throw DuplicateRecord("duplicate token address " + f[0]);
        });
    }
    return out;
}

std::map<AccountAddress, PoolInfo> load_pools(const std::filesystem::path& path,
                                              const std::map<AccountAddress, TokenInfo>& tokens,
                                              LoadOptions opt) {
    auto in = open_input(path);
    expect_header(in, path, "address,token0,token1,creator,createdTs");
    std::map<AccountAddress, PoolInfo> out;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            auto f = csv_split(line);
            if (f.size() != 5) throw IngestError("expected 5 fields", 0, "row");
            PoolInfo p;
            p.address = AccountAddress::parse(f[0]);
            p.token0 = AccountAddress::parse(f[1]);
            p.token1 = AccountAddress::parse(f[2]);
            p.creator = AccountAddress::parse(f[3]);
            p.creation_time = std::stoll(f[4]);
            if (!(p.token0 < p.token1))
                throw IngestError("pool tokens not in canonical order", 0, "token0");
            if (!tokens.count(p.token0)) throw IngestError("unknown token0", 0, "token0");
            if (!tokens.count(p.token1)) throw IngestError("unknown token1", 0, "token1");
            if (!out.emplace(p.address, p).second)
                throw DuplicateRecord("duplicate pool address " + f[0]);
        });
    }
    return out;
}

std::vector<OfficialEntry> load_official_tokens(const std::filesystem::path& path,
                                                LoadOptions opt) {
    auto in = open_input(path);
    expect_header(in, path, "address,name,symbol");
    std::vector<OfficialEntry> out;
    std::set<AccountAddress> seen;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            auto f = csv_split(line);
            if (f.size() != 3) throw IngestError("expected 3 fields", 0, "row");
            OfficialEntry e;
            e.address = AccountAddress::parse(f[0]);
            e.name = normalize_name(f[1]);
            e.symbol = normalize_name(f[2]);
            if (!seen.insert(e.address).second)
                throw DuplicateRecord("duplicate official token " + f[0]);
            out.push_back(e);
        });
    }
    return out;
}

PriceTable load_price_table(const std::filesystem::path& path, LoadOptions opt) {
    auto in = open_input(path);
    expect_header(in, path, "address,usd");
    PriceTable table;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            auto f = csv_split(line);
            if (f.size() != 2) throw IngestError("expected 2 fields", 0, "row");
            AccountAddress token = parse_token_or_eth(f[0], "address");
            double usd = std::stod(f[1]);
            if (!(usd >= 0)) throw IngestError("negative price", 0, "usd");
            if (!table.usd.emplace(token, usd).second)
                throw DuplicateRecord("duplicate price row " + f[0]);
        });
    }
    if (!table.usd.count(AccountAddress::eth_sentinel()))
        throw IngestError("required-price: ETH missing from price table", 0, "address");
    return table;
}

std::vector<Label> load_user_labels(const std::filesystem::path& path, LoadOptions opt) {
    auto in = open_input(path);
    expect_header(in, path, "address,kind");
    std::vector<Label> out;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            auto f = csv_split(line);
            if (f.size() != 2) throw IngestError("expected 2 fields", 0, "row");
            Label l;
            l.subject = AccountAddress::parse(f[0]);
            auto kind = label_kind_from_string(f[1]);
            if (!kind || (*kind != LabelKind::ScamToken && *kind != LabelKind::OfficialToken &&
                          *kind != LabelKind::ContractDeployerExcluded))
                throw IngestError("unsupported user label kind '" + f[1] + "'", 0, "kind");
            l.kind = *kind;
            l.provenance = Provenance::UserSupplied;
            l.evidence = "user label file";
            out.push_back(l);
        });
    }
    return out;
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto word = normalize_name(line);
        if (!word.empty()) out.push_back(word);
    }
    return out;
}

// --- JSONL loaders -----------------------------------------------------------------

std::vector<PoolEvent> load_events(const std::filesystem::path& path,
                                   const std::map<AccountAddress, TokenInfo>& tokens,
                                   const std::map<AccountAddress, PoolInfo>& pools,
                                   LoadOptions opt) {
    auto in = open_input(path);
    std::vector<PoolEvent> out;
    std::set<std::pair<TxHash, int32_t>> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            ordered_json j;
            try {
                j = ordered_json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw IngestError(e.what(), 0, "json");
            }
            PoolEvent e;
            if (!j.contains("tx") || !j["tx"].is_string())
                throw IngestError("missing tx", 0, "tx");
            e.tx_hash = TxHash::parse(j["tx"].get<std::string>());
            e.log_index = static_cast<int32_t>(field_int(j, "logIndex"));
            e.timestamp = field_int(j, "ts");
            e.pool = field_address(j, "pool");
            auto pit = pools.find(e.pool);
            if (pit == pools.end()) throw IngestError("unknown pool", 0, "pool");
            const TokenInfo& t0 = tokens.at(pit->second.token0);
            const TokenInfo& t1 = tokens.at(pit->second.token1);
            if (!j.contains("kind") || !j["kind"].is_string())
                throw IngestError("missing kind", 0, "kind");
            auto kind = event_kind_from_string(j["kind"].get<std::string>());
            if (!kind) throw IngestError("unknown event kind", 0, "kind");
            e.kind = *kind;
            e.initiator = field_address(j, "initiator");
            e.amount0_in = field_amount(j, "a0in", t0.decimals);
            e.amount1_in = field_amount(j, "a1in", t1.decimals);
            e.amount0_out = field_amount(j, "a0out", t0.decimals);
            e.amount1_out = field_amount(j, "a1out", t1.decimals);
            e.lp_delta = field_amount(j, "lp", 18);
            e.check_invariants();
            if (!seen.insert({e.tx_hash, e.log_index}).second)
                throw DuplicateRecord("duplicate event (tx, logIndex)");
            out.push_back(std::move(e));
        });
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return out;
}

std::vector<TransferRecord> load_transfers(const std::filesystem::path& path,
                                           const std::map<AccountAddress, TokenInfo>& tokens,
                                           LoadOptions opt) {
    auto in = open_input(path);
    std::vector<TransferRecord> out;
    std::set<std::pair<TxHash, int32_t>> seen;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        guard_line(path, line_no, opt, [&] {
            ordered_json j;
            try {
                j = ordered_json::parse(line);
            } catch (const nlohmann::json::parse_error& e) {
                throw IngestError(e.what(), 0, "json");
            }
            TransferRecord t;
            if (!j.contains("tx") || !j["tx"].is_string())
                throw IngestError("missing tx", 0, "tx");
            t.tx_hash = TxHash::parse(j["tx"].get<std::string>());
            t.log_index = static_cast<int32_t>(field_int(j, "logIndex"));
            t.timestamp = field_int(j, "ts");
            if (!j.contains("token") || !j["token"].is_string())
                throw IngestError("missing token", 0, "token");
            t.token = parse_token_or_eth(j["token"].get<std::string>(), "token");
            int decimals = 18;
            if (!t.token.is_eth()) {
                auto it = tokens.find(t.token);
                if (it == tokens.end()) throw IngestError("unknown token", 0, "token");
                decimals = it->second.decimals;
            }
            t.from = field_address(j, "from");
            t.to = field_address(j, "to");
            t.amount = field_amount(j, "amount", decimals);
            if (!seen.insert({t.tx_hash, t.log_index}).second)
                throw DuplicateRecord("duplicate transfer (tx, logIndex)");
            out.push_back(std::move(t));
        });
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
    return out;
}

DataStore load_store(const StorePaths& paths, LoadOptions opt) {
    DataStore store;
    store.tokens = load_tokens(paths.tokens, opt);
    store.pools = load_pools(paths.pools, store.tokens, opt);
    store.events = load_events(paths.events, store.tokens, store.pools, opt);
    store.transfers = load_transfers(paths.transfers, store.tokens, opt);
    store.prices = load_price_table(paths.prices, opt);
    store.sort_and_index();
    return store;
}

void require_weth_price(const PriceTable& prices, const std::vector<OfficialEntry>& official) {
    for (const auto& e : official)
        if (e.symbol == "weth" && !prices.try_usd(e.address))
            throw IngestError("required-price: WETH (" + e.address.render() + ") missing", 0,
                              "address");
}

// --- writers -------------------------------------------------------------------------

void write_events(const std::filesystem::path& path, const std::vector<PoolEvent>& events) {
    auto out = open_output(path);
    for (const auto& e : events) {
        ordered_json j;
        j["tx"] = e.tx_hash.render();
        j["logIndex"] = e.log_index;
        j["ts"] = e.timestamp;
        j["pool"] = e.pool.render();
        j["kind"] = to_string(e.kind);
        j["initiator"] = e.initiator.render();
        j["a0in"] = e.amount0_in.render_units();
        j["a1in"] = e.amount1_in.render_units();
        j["a0out"] = e.amount0_out.render_units();
        j["a1out"] = e.amount1_out.render_units();
        j["lp"] = e.lp_delta.render_units();
        out << j.dump() << '\n';
    }
}

void write_transfers(const std::filesystem::path& path,
                     const std::vector<TransferRecord>& transfers) {
    auto out = open_output(path);
    for (const auto& t : transfers) {
        ordered_json j;
        j["tx"] = t.tx_hash.render();
        j["logIndex"] = t.log_index;
        j["ts"] = t.timestamp;
        j["token"] = render_token_or_eth(t.token);
        j["from"] = t.from.render();
        j["to"] = t.to.render();
        j["amount"] = t.amount.render_units();
        out << j.dump() << '\n';
    }
}

void write_tokens(const std::filesystem::path& path,
                  const std::map<AccountAddress, TokenInfo>& tokens) {
    auto out = open_output(path);
    out << "address,name,symbol,decimals,creator,createdTs\n";
    for (const auto& [addr, t] : tokens)
        out << csv_join({addr.render(), t.name, t.symbol, std::to_string(t.decimals),
                         t.creator.render(), std::to_string(t.creation_time)})
            << '\n';
}

void write_pools(const std::filesystem::path& path,
                 const std::map<AccountAddress, PoolInfo>& pools) {
    auto out = open_output(path);
    out << "address,token0,token1,creator,createdTs\n";
    for (const auto& [addr, p] : pools)
        out << csv_join({addr.render(), p.token0.render(), p.token1.render(), p.creator.render(),
                         std::to_string(p.creation_time)})
            << '\n';
}

void write_official(const std::filesystem::path& path, const std::vector<OfficialEntry>& entries) {
    auto out = open_output(path);
    out << "address,name,symbol\n";
    for (const auto& e : entries)
        out << csv_join({e.address.render(), e.name, e.symbol}) << '\n';
}

void write_prices(const std::filesystem::path& path, const PriceTable& prices) {
    auto out = open_output(path);
    out << "address,usd\n";
    char buf[64];
    for (const auto& [token, usd] : prices.usd) {
        std::snprintf(buf, sizeof(buf), "%.10g", usd);
        out << csv_join({render_token_or_eth(token), buf}) << '\n';
    }
}

// --- replay validation ------------------------------------------------------------------

std::vector<Discrepancy> validate_replay(const DataStore& store) {
    std::vector<Discrepancy> out;
    auto off_by_more_than_one = [](const TokenAmount& a, const TokenAmount& b) {
        const Uint256 &x = a.units(), &y = b.units();
        Uint256 diff = x > y ? x - y : y - x;
        return diff > 1;
    };

    for (const auto& [pool_addr, event_indices] : store.events_by_pool) {
        auto pit = store.pools.find(pool_addr);
        if (pit == store.pools.end()) continue;
        const TokenInfo& t0 = store.tokens.at(pit->second.token0);
        const TokenInfo& t1 = store.tokens.at(pit->second.token1);
        PoolState st = PoolState::empty(t0.decimals, t1.decimals);

        for (size_t idx : event_indices) {
            const PoolEvent& e = store.events[idx];
            try {
                switch (e.kind) {
                    case EventKind::Mint: {
                        auto r = mint(st, e.initiator, e.amount0_in, e.amount1_in);
                        if (off_by_more_than_one(r.lp_minted, e.lp_delta))
                            out.push_back({idx, "mint lp mismatch: engine " +
                                                    r.lp_minted.render_units() + " vs recorded " +
                                                    e.lp_delta.render_units()});
                        break;
                    }
                    case EventKind::Burn: {
                        PoolState granted = st;
                        granted.lp_balances[e.initiator] = e.lp_delta;
                        auto r = burn(granted, e.initiator, e.lp_delta);
                        if (off_by_more_than_one(r.out0, e.amount0_out) ||
                            off_by_more_than_one(r.out1, e.amount1_out))
                            out.push_back({idx, "burn output mismatch: engine (" +
                                                    r.out0.render_units() + ", " +
                                                    r.out1.render_units() + ") vs recorded (" +
                                                    e.amount0_out.render_units() + ", " +
                                                    e.amount1_out.render_units() + ")"});
                        break;
                    }
                    case EventKind::Swap: {
                        SwapSide side = e.amount0_in.is_zero() ? SwapSide::OneForZero
                                                               : SwapSide::ZeroForOne;
                        const TokenAmount& in =
                            side == SwapSide::ZeroForOne ? e.amount0_in : e.amount1_in;
                        const TokenAmount& rec_out =
                            side == SwapSide::ZeroForOne ? e.amount1_out : e.amount0_out;
                        auto r = swap(st, e.initiator, side, in);
                        if (off_by_more_than_one(r.amount_out, rec_out))
                            out.push_back({idx, "swap output mismatch: engine " +
                                                    r.amount_out.render_units() +
                                                    " vs recorded " + rec_out.render_units()});
                        break;
                    }
                }
            } catch (const AmmError& err) {
                out.push_back({idx, std::string("engine rejected event: ") + err.what()});
            } catch (const AmountError& err) {
                out.push_back({idx, std::string("amount error during replay: ") + err.what()});
            }

            // Advance by the recorded amounts so one bad event cannot cascade.
            try {
                st.reserve0 = st.reserve0.add(e.amount0_in).sub(e.amount0_out);
                st.reserve1 = st.reserve1.add(e.amount1_in).sub(e.amount1_out);
                if (e.kind == EventKind::Mint) {
                    st.lp_total_supply = st.lp_total_supply.add(e.lp_delta);
                    auto [it, fresh] = st.lp_balances.try_emplace(e.initiator, e.lp_delta);
                    if (!fresh) it->second = it->second.add(e.lp_delta);
                } else if (e.kind == EventKind::Burn) {
                    st.lp_total_supply = st.lp_total_supply.sub(e.lp_delta);
                }
            } catch (const AmountError& err) {
                out.push_back({idx, std::string("recorded amounts drain below zero: ") + err.what()});
                break;
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.event_index < b.event_index; });
    return out;
}

}  // namespace scamradar
