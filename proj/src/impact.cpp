#include "scamradar/impact.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

std::set<AccountAddress> scam_address_set(const LabelStore& labels) {
    std::set<AccountAddress> out;
    for (auto kind : {LabelKind::ScamTokenCreator, LabelKind::ScamPoolCreator,
                      LabelKind::CollusionAddress})
        for (const auto& a : labels.subjects_with(kind)) out.insert(a);
    return out;
}

double units_to_usd(const BigInt& units, double price, int decimals) {
    return units.convert_to<double>() / std::pow(10.0, decimals) * price;
}

}  // namespace

PoolScamProfile profile_rug(const DataStore& store, const LabelStore& labels,
                            const AccountAddress& pool, double drain_fraction,
                            int fee_min_occurrences) {
    if (!labels.has(pool, LabelKind::ScamPool))
        throw PreconditionError("pool is not labeled ScamPool: " + pool.render());

    PoolScamProfile profile;
    profile.pool = pool;
    auto scam = scam_address_set(labels);

    auto eit = store.events_by_pool.find(pool);
    if (eit == store.events_by_pool.end()) return profile;

    std::map<AccountAddress, Uint256> lp_balance;
    bool cycle_filled = false;
    const auto drain_num = static_cast<uint64_t>(std::llround(drain_fraction * 1e9));

    for (size_t idx : eit->second) {
        const PoolEvent& e = store.events[idx];
        const bool is_scam = scam.count(e.initiator) > 0;
        switch (e.kind) {
            case EventKind::Mint:
                lp_balance[e.initiator] += e.lp_delta.units();
                if (is_scam) {
                    if (profile.first_mint_ts < 0) profile.first_mint_ts = e.timestamp;
                    cycle_filled = true;
                }
                break;
            case EventKind::Burn: {
                Uint256 held = lp_balance[e.initiator];
                Uint256 burned = e.lp_delta.units();
                lp_balance[e.initiator] = burned > held ? Uint256(0) : held - burned;
                if (is_scam && held > 0) {
                    bool drained =
                        Uint512(burned) * 1000000000u >= Uint512(held) * drain_num;
                    if (drained) {
                        if (cycle_filled) {
                            profile.rounds += 1;
                            cycle_filled = false;
                        }
                        if (profile.first_major_burn_ts < 0 && profile.first_mint_ts >= 0) {
                            profile.first_major_burn_ts = e.timestamp;
                            profile.rug_interval_seconds = e.timestamp - profile.first_mint_ts;
                        }
                    }
                }
                break;
            }
            case EventKind::Swap:
                if (is_scam) profile.scammer_swap_involved = true;
                break;
        }
    }
    profile.complete = profile.first_mint_ts >= 0;

    // Advance-fee scan covers the scam token(s) the pool trades.
    const PoolInfo& info = store.pools.at(pool);
    for (const auto& token : {info.token0, info.token1}) {
        if (!labels.has(token, LabelKind::ScamToken)) continue;
        if (auto finding = detect_advance_fee(store, token, fee_min_occurrences)) {
            profile.advance_fee = finding;
            break;
        }
    }
    return profile;
}

std::optional<AdvanceFeeFinding> detect_advance_fee(const DataStore& store,
                                                    const AccountAddress& token,
                                                    int min_occurrences, double rel_tolerance) {
    auto it = store.transfers_by_token.find(token);
    if (it == store.transfers_by_token.end()) return std::nullopt;

    std::set<AccountAddress> pool_addrs;
    if (auto pit = store.pools_by_token.find(token); pit != store.pools_by_token.end())
        pool_addrs.insert(pit->second.begin(), pit->second.end());

    // Group the token's transfers per transaction.
    std::map<TxHash, std::vector<size_t>> by_tx;
    for (size_t idx : it->second) by_tx[store.transfers[idx].tx_hash].push_back(idx);

    std::map<AccountAddress, std::vector<double>> candidate_fractions;
    for (const auto& [tx, indices] : by_tx) {
        if (indices.size() < 2) continue;
        size_t main_idx = indices[0];
        for (size_t idx : indices)
            if (store.transfers[idx].amount.units() > store.transfers[main_idx].amount.units())
                main_idx = idx;
        const TransferRecord& main = store.transfers[main_idx];
        if (main.amount.is_zero()) continue;
        for (size_t idx : indices) {
            if (idx == main_idx) continue;
            const TransferRecord& side = store.transfers[idx];
            if (side.to == main.from || side.to == main.to || pool_addrs.count(side.to)) continue;
            double fraction = side.amount.to_double() / main.amount.to_double();
            candidate_fractions[side.to].push_back(fraction);
        }
    }

    for (const auto& [addr, fractions] : candidate_fractions) {
        if (static_cast<int>(fractions.size()) < min_occurrences) continue;
        double sum = 0;
        for (double f : fractions) sum += f;
        double mean = sum / static_cast<double>(fractions.size());
        if (mean <= 0) continue;
        bool consistent = true;
        for (double f : fractions)
            if (std::abs(f - mean) > rel_tolerance * mean) {
                consistent = false;
                break;
            }
        if (consistent)
            return AdvanceFeeFinding{addr, mean, static_cast<int>(fractions.size())};
    }
    return std::nullopt;
}

PoolProfit compute_profit(const DataStore& store, const LabelStore& labels,
                          const AccountAddress& pool, const std::set<AccountAddress>& valuable) {
    if (!labels.has(pool, LabelKind::ScamPool))
        throw PreconditionError("pool is not labeled ScamPool: " + pool.render());
    const PoolInfo& info = store.pools.at(pool);
    auto scam = scam_address_set(labels);

    struct SideFlow {
        bool is_valuable = false;
        double price = 0;
        int decimals = 18;
        BigInt in = 0, out = 0;          // scam-address flows, all event kinds
        BigInt mint_in = 0, burn_out = 0;  // liquidity legs only
    };
    SideFlow side[2];
    for (int s = 0; s < 2; ++s) {
        const AccountAddress& token = s == 0 ? info.token0 : info.token1;
        side[s].is_valuable = valuable.count(token) > 0;
        side[s].decimals = store.tokens.at(token).decimals;
        if (side[s].is_valuable) side[s].price = store.prices.usd_of(token);  // throws MissingPrice
    }

    PoolProfit result;
    std::set<AccountAddress> participants;
    auto eit = store.events_by_pool.find(pool);
    if (eit != store.events_by_pool.end()) {
        for (size_t idx : eit->second) {
            const PoolEvent& e = store.events[idx];
            participants.insert(e.initiator);
            if (!scam.count(e.initiator)) continue;
            const TokenAmount* ins[2] = {&e.amount0_in, &e.amount1_in};
            const TokenAmount* outs[2] = {&e.amount0_out, &e.amount1_out};
            for (int s = 0; s < 2; ++s) {
                if (!side[s].is_valuable) continue;
                side[s].in += BigInt(ins[s]->units());
                side[s].out += BigInt(outs[s]->units());
                if (e.kind == EventKind::Mint) side[s].mint_in += BigInt(ins[s]->units());
                if (e.kind == EventKind::Burn) side[s].burn_out += BigInt(outs[s]->units());
            }
        }
    }
    for (int s = 0; s < 2; ++s) {
        if (!side[s].is_valuable) continue;
        result.profit_usd += units_to_usd(side[s].out - side[s].in, side[s].price, side[s].decimals);
        result.gross_profit_usd +=
            units_to_usd(side[s].burn_out - side[s].mint_in, side[s].price, side[s].decimals);
    }
    for (const auto& a : participants)
        if (!scam.count(a)) ++result.victim_count;
    return result;
}

std::vector<ConservationIssue> check_conservation(const DataStore& store) {
    std::vector<ConservationIssue> issues;
    for (const auto& [pool_addr, indices] : store.events_by_pool) {
        auto pit = store.pools.find(pool_addr);
        if (pit == store.pools.end()) continue;
        const TokenInfo& t0 = store.tokens.at(pit->second.token0);
        const TokenInfo& t1 = store.tokens.at(pit->second.token1);

        BigInt net0 = 0, net1 = 0;
        PoolState st = PoolState::empty(t0.decimals, t1.decimals);
        bool engine_ok = true;
        for (size_t idx : indices) {
            const PoolEvent& e = store.events[idx];
            net0 += BigInt(e.amount0_in.units());
            net0 -= BigInt(e.amount0_out.units());
            net1 += BigInt(e.amount1_in.units());
            net1 -= BigInt(e.amount1_out.units());
            if (!engine_ok) continue;
            try {
                switch (e.kind) {
                    case EventKind::Mint:
                        st = mint(st, e.initiator, e.amount0_in, e.amount1_in).state;
                        break;
                    case EventKind::Burn:
                        st = burn(st, e.initiator, e.lp_delta).state;
                        break;
                    case EventKind::Swap: {
                        SwapSide s = e.amount0_in.is_zero() ? SwapSide::OneForZero
                                                            : SwapSide::ZeroForOne;
                        st = swap(st, e.initiator,
                                  s, s == SwapSide::ZeroForOne ? e.amount0_in : e.amount1_in)
                                 .state;
                        break;
                    }
                }
            } catch (const std::exception& ex) {
                engine_ok = false;
                issues.push_back({pool_addr, std::string("engine replay failed: ") + ex.what()});
            }
        }
        if (!engine_ok) continue;
        if (net0 != BigInt(st.reserve0.units()) || net1 != BigInt(st.reserve1.units()))
            issues.push_back(
                {pool_addr, "recorded net flows (" + net0.str() + ", " + net1.str() +
                                ") differ from engine reserves (" + st.reserve0.render_units() +
                                ", " + st.reserve1.render_units() + ")"});
    }
    return issues;
}

ImpactReport build_impact_report(const DataStore& store, const LabelStore& labels,
                                 const std::set<AccountAddress>& valuable, double drain_fraction,
                                 int min_occurrences, unsigned jobs) {
    auto pools = labels.subjects_with(LabelKind::ScamPool);
    std::vector<AccountAddress> order(pools.begin(), pools.end());

    ImpactReport report;
    report.pools.resize(order.size());
    parallel_for(order.size(), jobs, [&](size_t i) {
        ImpactReport::PoolEntry entry;
        entry.pool = order[i];
        const PoolInfo& info = store.pools.at(order[i]);
        entry.token = labels.has(info.token0, LabelKind::ScamToken) ? info.token0 : info.token1;
        entry.profile = profile_rug(store, labels, order[i], drain_fraction, min_occurrences);
        entry.profit = compute_profit(store, labels, order[i], valuable);
        report.pools[i] = std::move(entry);
    });

    auto scam = scam_address_set(labels);
    std::set<AccountAddress> all_victims;
    int64_t with_interval = 0, under_1h = 0, under_1d = 0;
    for (const auto& entry : report.pools) {
        report.total_profit_usd += entry.profit.profit_usd;
        report.total_gross_profit_usd += entry.profit.gross_profit_usd;
        if (entry.profile.rug_interval_seconds >= 0) {
            ++with_interval;
            if (entry.profile.rug_interval_seconds < 3600) ++under_1h;
            if (entry.profile.rug_interval_seconds < 86400) ++under_1d;
        }
        auto eit = store.events_by_pool.find(entry.pool);
        if (eit == store.events_by_pool.end()) continue;
        for (size_t idx : eit->second) {
            const auto& who = store.events[idx].initiator;
            if (!scam.count(who)) all_victims.insert(who);
        }
    }
    report.total_victims = static_cast<int64_t>(all_victims.size());
    report.mean_profit_per_pool =
        report.pools.empty() ? 0 : report.total_profit_usd / static_cast<double>(report.pools.size());
    if (with_interval > 0) {
        report.share_under_1h = static_cast<double>(under_1h) / static_cast<double>(with_interval);
        report.share_under_1d = static_cast<double>(under_1d) / static_cast<double>(with_interval);
    }
    return report;
}

void write_impact_report(const std::filesystem::path& path, const ImpactReport& report) {
    nlohmann::ordered_json j;
    auto pools = nlohmann::ordered_json::array();
    for (const auto& e : report.pools) {
        nlohmann::ordered_json p;
        p["pool"] = e.pool.render();
        p["token"] = e.token.render();
        p["profitUsd"] = e.profit.profit_usd;
        p["grossProfitUsd"] = e.profit.gross_profit_usd;
        p["victimCount"] = e.profit.victim_count;
        p["rugIntervalSeconds"] = e.profile.rug_interval_seconds;
        p["rounds"] = e.profile.rounds;
        p["scammerSwapInvolved"] = e.profile.scammer_swap_involved;
        p["profileComplete"] = e.profile.complete;
        if (e.profile.advance_fee) {
            p["advanceFee"] = {{"address", e.profile.advance_fee->fee_address.render()},
                               {"fraction", e.profile.advance_fee->fraction},
                               {"occurrences", e.profile.advance_fee->occurrences}};
        }
        pools.push_back(p);
    }
    j["pools"] = pools;
    j["aggregates"] = {{"totalProfitUsd", report.total_profit_usd},
                       {"totalGrossProfitUsd", report.total_gross_profit_usd},
                       {"totalVictims", report.total_victims},
                       {"meanProfitPerPoolUsd", report.mean_profit_per_pool},
                       {"rugShareUnder1h", report.share_under_1h},
                       {"rugShareUnder1d", report.share_under_1d}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << j.dump(2) << '\n';
}

void write_rug_histogram(const std::filesystem::path& path, const ImpactReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << "pool,rugIntervalSeconds\n";
    for (const auto& e : report.pools)
        if (e.profile.rug_interval_seconds >= 0)
            out << e.pool.render() << ',' << e.profile.rug_interval_seconds << '\n';
}

MarketStats market_stats(const DataStore& store) {
    MarketStats s;
    s.tokens = static_cast<int64_t>(store.tokens.size());
    s.pools = static_cast<int64_t>(store.pools.size());
    s.events = static_cast<int64_t>(store.events.size());
    s.transfers = static_cast<int64_t>(store.transfers.size());

    std::map<AccountAddress, std::pair<bool, bool>> addr_kinds;  // (swapped, minted-or-burnt)
    for (const auto& e : store.events) {
        auto& k = addr_kinds[e.initiator];
        if (e.kind == EventKind::Swap) {
            k.first = true;
            ++s.swaps;
        } else {
            k.second = true;
            e.kind == EventKind::Mint ? ++s.mints : ++s.burns;
        }
        ++s.daily_events[e.timestamp / 86400];
    }
    s.addresses = static_cast<int64_t>(addr_kinds.size());
    if (s.addresses > 0) {
        int64_t swap_only = 0, mintburn_only = 0;
        for (const auto& [addr, k] : addr_kinds) {
            if (k.first && !k.second) ++swap_only;
            if (!k.first && k.second) ++mintburn_only;
        }
        s.share_addresses_swap_only =
            static_cast<double>(swap_only) / static_cast<double>(s.addresses);
        s.share_addresses_mintburn_only =
            static_cast<double>(mintburn_only) / static_cast<double>(s.addresses);
    }

    // Event concentration across pools.
    std::vector<int64_t> counts;
    std::vector<double> volumes;
    for (const auto& [pool_addr, indices] : store.events_by_pool) {
        counts.push_back(static_cast<int64_t>(indices.size()));
        auto pit = store.pools.find(pool_addr);
        double vol = 0;
        BigInt net0 = 0, net1 = 0;
        for (size_t idx : indices) {
            const PoolEvent& e = store.events[idx];
            net0 += BigInt(e.amount0_in.units()) - BigInt(e.amount0_out.units());
            net1 += BigInt(e.amount1_in.units()) - BigInt(e.amount1_out.units());
            if (e.kind != EventKind::Swap || pit == store.pools.end()) continue;
            auto priced = [&](const AccountAddress& token, const TokenAmount& in,
                              const TokenAmount& out, double& dst) {
                if (auto p = store.prices.try_usd(token)) {
                    dst = (in.is_zero() ? out : in).to_double() * *p;
                    return true;
                }
                return false;
            };
            double usd = 0;
            if (!priced(pit->second.token0, e.amount0_in, e.amount0_out, usd))
                priced(pit->second.token1, e.amount1_in, e.amount1_out, usd);
            vol += usd;
        }
        volumes.push_back(vol);
        if (pit != store.pools.end()) {
            double liquidity = 0;
            const TokenInfo& t0 = store.tokens.at(pit->second.token0);
            const TokenInfo& t1 = store.tokens.at(pit->second.token1);
            if (auto p = store.prices.try_usd(t0.address))
                liquidity += net0.convert_to<double>() / std::pow(10.0, t0.decimals) * *p;
            if (auto p = store.prices.try_usd(t1.address))
                liquidity += net1.convert_to<double>() / std::pow(10.0, t1.decimals) * *p;
            if (liquidity < 1.0) ++s.pools_under_one_usd;
        }
    }
    auto top_share = [](std::vector<int64_t> v, double pct) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end(), std::greater<>());
        size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(v.size() * pct)));
        int64_t total = 0, top = 0;
        for (size_t i = 0; i < v.size(); ++i) {
            total += v[i];
            if (i < k) top += v[i];
        }
        return total > 0 ? static_cast<double>(top) / static_cast<double>(total) : 0.0;
    };
    s.top1pct_event_share = top_share(counts, 0.01);
    s.top5pct_event_share = top_share(counts, 0.05);
    if (!volumes.empty()) {
        std::sort(volumes.begin(), volumes.end(), std::greater<>());
        size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(volumes.size() * 0.01)));
        double total = 0, top = 0;
        for (size_t i = 0; i < volumes.size(); ++i) {
            total += volumes[i];
            if (i < k) top += volumes[i];
        }
        s.top1pct_volume_share = total > 0 ? top / total : 0.0;
    }
    return s;
}

void write_market_stats(const std::filesystem::path& path, const MarketStats& s) {
    nlohmann::ordered_json j;
    j["tokens"] = s.tokens;
    j["pools"] = s.pools;
    j["events"] = s.events;
    j["transfers"] = s.transfers;
    j["addresses"] = s.addresses;
    j["mints"] = s.mints;
    j["swaps"] = s.swaps;
    j["burns"] = s.burns;
    j["top1pctEventShare"] = s.top1pct_event_share;
    j["top5pctEventShare"] = s.top5pct_event_share;
    j["top1pctVolumeShare"] = s.top1pct_volume_share;
    j["shareAddressesSwapOnly"] = s.share_addresses_swap_only;
    j["shareAddressesMintBurnOnly"] = s.share_addresses_mintburn_only;
    j["poolsUnderOneUsd"] = s.pools_under_one_usd;
    auto daily = nlohmann::ordered_json::array();
    for (const auto& [day, count] : s.daily_events)
        daily.push_back({{"day", day}, {"events", count}});
    j["dailyEvents"] = daily;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << j.dump(2) << '\n';
}

}  // namespace scamradar
