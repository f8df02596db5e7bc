// Test-only brute-force oracle for the 40 per-token features. Every feature
// rescans the raw event/transfer logs on its own, with no shared indices or
// cached aggregates, so it stays independent of the FeatureExtractor path.
#pragma once

#include <cmath>
#include <set>

#include "scamradar/features.hpp"

namespace scamradar::oracle {

inline bool pool_has_token(const DataStore& store, const AccountAddress& pool,
                           const AccountAddress& token) {
    auto it = store.pools.find(pool);
    return it != store.pools.end() &&
           (it->second.token0 == token || it->second.token1 == token);
}

inline int side_of(const DataStore& store, const AccountAddress& pool,
                   const AccountAddress& token) {
    const PoolInfo& p = store.pools.at(pool);
    return p.token0 == token ? 0 : 1;
}

// Event-class predicate, written out independently.
inline bool event_in_class(const DataStore& store, const PoolEvent& e, const AccountAddress& token,
                           EventClass cls) {
    if (!pool_has_token(store, e.pool, token)) return false;
    int side = side_of(store, e.pool, token);
    const TokenAmount& tok_in = side == 0 ? e.amount0_in : e.amount1_in;
    const TokenAmount& tok_out = side == 0 ? e.amount0_out : e.amount1_out;
    switch (cls) {
        case EventClass::Mint: return e.kind == EventKind::Mint;
        case EventClass::Burn: return e.kind == EventKind::Burn;
        case EventClass::Swap: return e.kind == EventKind::Swap;
        case EventClass::SwapTo: return e.kind == EventKind::Swap && !tok_out.is_zero();
        case EventClass::SwapFrom: return e.kind == EventKind::Swap && !tok_in.is_zero();
    }
    return false;
}

inline std::vector<const PoolEvent*> token_events(const DataStore& store,
                                                  const AccountAddress& token) {
    std::vector<const PoolEvent*> out;
    for (const auto& e : store.events)
        if (pool_has_token(store, e.pool, token)) out.push_back(&e);
    return out;
}

inline double oracle_time_position(const DataStore& store, const AccountAddress& token,
                                   EventClass cls) {
    auto events = token_events(store, token);
    if (events.empty()) return -1.0;
    int64_t t_start = events.front()->timestamp;
    int64_t t_end = events.back()->timestamp;
    int64_t sum = 0, n = 0;
    for (const auto* e : events) {
        if (!event_in_class(store, *e, token, cls)) continue;
        sum += e->timestamp - t_start;
        ++n;
    }
    if (n == 0) return -1.0;
    if (t_end == t_start) return 0.0;
    return static_cast<double>(sum) / static_cast<double>(n) /
           static_cast<double>(t_end - t_start);
}

inline double count_in_class(const DataStore& store, const AccountAddress& token, EventClass cls) {
    int64_t n = 0;
    for (const auto& e : store.events)
        if (event_in_class(store, e, token, cls)) ++n;
    return static_cast<double>(n);
}

inline double addr_count_in_class(const DataStore& store, const AccountAddress& token,
                                  EventClass cls) {
    std::set<AccountAddress> who;
    for (const auto& e : store.events)
        if (event_in_class(store, e, token, cls)) who.insert(e.initiator);
    return static_cast<double>(who.size());
}

inline FeatureVector extract(const DataStore& store, const AccountAddress& token,
                             double tracked_threshold_usd = 1.0) {
    FeatureVector f;
    auto events = token_events(store, token);
    const bool has_events = !events.empty();
    int64_t t_start = has_events ? events.front()->timestamp : 0;
    int64_t t_end = has_events ? events.back()->timestamp : 0;

    f[FeatureVector::index_of("T_period")] =
        has_events ? static_cast<double>(t_end - t_start) : -1.0;
    f[FeatureVector::index_of("T_interval")] =
        has_events ? static_cast<double>(store.study_time - t_end) : -1.0;
    f[FeatureVector::index_of("P_mint")] = oracle_time_position(store, token, EventClass::Mint);
    f[FeatureVector::index_of("P_swap")] = oracle_time_position(store, token, EventClass::Swap);
    f[FeatureVector::index_of("P_swapfrom")] =
        oracle_time_position(store, token, EventClass::SwapFrom);
    f[FeatureVector::index_of("P_swapto")] =
        oracle_time_position(store, token, EventClass::SwapTo);
    f[FeatureVector::index_of("P_burn")] = oracle_time_position(store, token, EventClass::Burn);

    double n_txu = static_cast<double>(events.size());
    int64_t n_txe = 0;
    for (const auto& t : store.transfers)
        if (t.token == token) ++n_txe;

    double n_mint = count_in_class(store, token, EventClass::Mint);
    double n_swap = count_in_class(store, token, EventClass::Swap);
    double n_swapto = count_in_class(store, token, EventClass::SwapTo);
    double n_swapfrom = count_in_class(store, token, EventClass::SwapFrom);
    double n_burn = count_in_class(store, token, EventClass::Burn);

    f[FeatureVector::index_of("N_TxU")] = n_txu;
    f[FeatureVector::index_of("N_TxE")] = static_cast<double>(n_txe);
    f[FeatureVector::index_of("N_mint")] = n_mint;
    f[FeatureVector::index_of("N_swap")] = n_swap;
    f[FeatureVector::index_of("N_swapto")] = n_swapto;
    f[FeatureVector::index_of("N_swapfrom")] = n_swapfrom;
    f[FeatureVector::index_of("RE_swapfrom_swapto")] =
        n_swapto > 0 ? n_swapfrom / n_swapto : -1.0;
    f[FeatureVector::index_of("N_burn")] = n_burn;

    double a_mint = addr_count_in_class(store, token, EventClass::Mint);
    double a_swap = addr_count_in_class(store, token, EventClass::Swap);
    double a_swapto = addr_count_in_class(store, token, EventClass::SwapTo);
    double a_swapfrom = addr_count_in_class(store, token, EventClass::SwapFrom);
    double a_burn = addr_count_in_class(store, token, EventClass::Burn);
    std::set<AccountAddress> everyone;
    for (const auto* e : events) everyone.insert(e->initiator);
    double a_all = static_cast<double>(everyone.size());

    f[FeatureVector::index_of("A_mint")] = a_mint;
    f[FeatureVector::index_of("A_swap")] = a_swap;
    f[FeatureVector::index_of("A_swapto")] = a_swapto;
    f[FeatureVector::index_of("A_swapfrom")] = a_swapfrom;
    f[FeatureVector::index_of("A_burn")] = a_burn;
    f[FeatureVector::index_of("A_all")] = a_all;

    auto re = [&](double n) { return n_txu > 0 ? n / n_txu : -1.0; };
    f[FeatureVector::index_of("RE_mint_all")] = re(n_mint);
    f[FeatureVector::index_of("RE_swap_all")] = re(n_swap);
    f[FeatureVector::index_of("RE_swapto_all")] = re(n_swapto);
    f[FeatureVector::index_of("RE_swapfrom_all")] = re(n_swapfrom);
    f[FeatureVector::index_of("RE_burn_all")] = re(n_burn);
    auto ra = [&](double a) { return a_all > 0 ? a / a_all : -1.0; };
    f[FeatureVector::index_of("RA_mint_all")] = ra(a_mint);
    f[FeatureVector::index_of("RA_swap_all")] = ra(a_swap);
    f[FeatureVector::index_of("RA_swapto_all")] = ra(a_swapto);
    f[FeatureVector::index_of("RA_swapfrom_all")] = ra(a_swapfrom);
    f[FeatureVector::index_of("RA_burn_all")] = ra(a_burn);

    // Investor features: rescan the whole log per participant.
    auto pools_touched = [&](const AccountAddress& who) {
        std::set<AccountAddress> pools;
        for (const auto& e : store.events)
            if (e.initiator == who) pools.insert(e.pool);
        return static_cast<int64_t>(pools.size());
    };
    auto events_by = [&](const AccountAddress& who, bool swaps) {
        int64_t n = 0;
        for (const auto& e : store.events)
            if (e.initiator == who && (e.kind == EventKind::Swap) == swaps) ++n;
        return n;
    };
    std::set<AccountAddress> mintburn_people, swap_people;
    for (const auto* e : events) {
        if (e->kind == EventKind::Swap) swap_people.insert(e->initiator);
        else mintburn_people.insert(e->initiator);
    }
    auto avg_over = [&](const std::set<AccountAddress>& who, auto&& fn) {
        if (who.empty()) return -1.0;
        int64_t sum = 0;
        for (const auto& a : who) sum += fn(a);
        return static_cast<double>(sum) / static_cast<double>(who.size());
    };
    f[FeatureVector::index_of("L_mintburn")] =
        avg_over(mintburn_people, [&](const AccountAddress& a) { return pools_touched(a); });
    f[FeatureVector::index_of("L_swap")] =
        avg_over(swap_people, [&](const AccountAddress& a) { return pools_touched(a); });
    f[FeatureVector::index_of("C_mintburn")] =
        avg_over(mintburn_people, [&](const AccountAddress& a) { return events_by(a, false); });
    f[FeatureVector::index_of("C_swap")] =
        avg_over(swap_people, [&](const AccountAddress& a) { return events_by(a, true); });

    // Uniswap-side features.
    int64_t n_pool = 0;
    for (const auto& [addr, pool] : store.pools)
        if (pool.token0 == token || pool.token1 == token) ++n_pool;
    f[FeatureVector::index_of("N_pool")] = static_cast<double>(n_pool);

    auto pool_final_liquidity_usd = [&](const AccountAddress& pool_addr) {
        const PoolInfo& p = store.pools.at(pool_addr);
        BigInt net0 = 0, net1 = 0;
        for (const auto& e : store.events) {
            if (e.pool != pool_addr) continue;
            net0 += BigInt(e.amount0_in.units());
            net0 -= BigInt(e.amount0_out.units());
            net1 += BigInt(e.amount1_in.units());
            net1 -= BigInt(e.amount1_out.units());
        }
        double usd = 0;
        if (auto pr = store.prices.try_usd(p.token0))
            usd += net0.convert_to<double>() /
                   std::pow(10.0, store.tokens.at(p.token0).decimals) * *pr;
        if (auto pr = store.prices.try_usd(p.token1))
            usd += net1.convert_to<double>() /
                   std::pow(10.0, store.tokens.at(p.token1).decimals) * *pr;
        return usd;
    };

    double v_token = 0, v_tracked = 0, v_untracked = 0, n_liquidity = 0;
    for (const auto& e : store.events) {
        if (!pool_has_token(store, e.pool, token)) continue;
        int side = side_of(store, e.pool, token);
        const TokenAmount& tok_in = side == 0 ? e.amount0_in : e.amount1_in;
        if (e.kind == EventKind::Mint) n_liquidity += tok_in.to_double();
        if (e.kind != EventKind::Swap) continue;
        const TokenAmount& tok_out = side == 0 ? e.amount0_out : e.amount1_out;
        v_token += (tok_in.is_zero() ? tok_out : tok_in).to_double();

        const PoolInfo& p = store.pools.at(e.pool);
        double usd = 0;
        if (auto pr = store.prices.try_usd(p.token0))
            usd = (e.amount0_in.is_zero() ? e.amount0_out : e.amount0_in).to_double() * *pr;
        else if (auto pr2 = store.prices.try_usd(p.token1))
            usd = (e.amount1_in.is_zero() ? e.amount1_out : e.amount1_in).to_double() * *pr2;
        v_untracked += usd;
        if (pool_final_liquidity_usd(e.pool) >= tracked_threshold_usd) v_tracked += usd;
    }
    f[FeatureVector::index_of("V_token")] = v_token;
    f[FeatureVector::index_of("V_tracked")] = v_tracked;
    f[FeatureVector::index_of("V_untracked")] = v_untracked;
    f[FeatureVector::index_of("N_liquidity")] = n_liquidity;
    return f;
}

}  // namespace scamradar::oracle
