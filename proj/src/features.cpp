#include "scamradar/features.hpp"

#include <fstream>
#include <set>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

enum FeatureIndex : size_t {
    F_T_period,
    F_T_interval,
    F_P_mint,
    F_P_swap,
    F_P_swapfrom,
    F_P_swapto,
    F_P_burn,
    F_N_TxU,
    F_N_TxE,
    F_N_mint,
    F_N_swap,
    F_N_swapto,
    F_N_swapfrom,
    F_RE_swapfrom_swapto,
    F_N_burn,
    F_A_mint,
    F_A_swap,
    F_A_swapto,
    F_A_swapfrom,
    F_A_burn,
    F_A_all,
    F_RE_mint_all,
    F_RE_swap_all,
    F_RE_swapto_all,
    F_RE_swapfrom_all,
    F_RE_burn_all,
    F_RA_mint_all,
    F_RA_swap_all,
    F_RA_swapto_all,
    F_RA_swapfrom_all,
    F_RA_burn_all,
    F_L_mintburn,
    F_L_swap,
    F_C_mintburn,
    F_C_swap,
    F_N_pool,
    F_V_token,
    F_V_tracked,
    F_V_untracked,
    F_N_liquidity,
};

// True when the event belongs to the class, relative to `side` (which side of
// the pool the token occupies).
bool in_class(const PoolEvent& e, int side, EventClass cls) {
    switch (cls) {
        case EventClass::Mint: return e.kind == EventKind::Mint;
        case EventClass::Burn: return e.kind == EventKind::Burn;
        case EventClass::Swap: return e.kind == EventKind::Swap;
        case EventClass::SwapTo:
            return e.kind == EventKind::Swap &&
                   !(side == 0 ? e.amount0_out : e.amount1_out).is_zero();
        case EventClass::SwapFrom:
            return e.kind == EventKind::Swap &&
                   !(side == 0 ? e.amount0_in : e.amount1_in).is_zero();
    }
    return false;
}

double ratio_or_sentinel(double num, double den) { return den > 0 ? num / den : kSentinel; }

}  // namespace

const std::array<const char*, kFeatureCount>& FeatureVector::names() {
    static const std::array<const char*, kFeatureCount> kNames = {
        "T_period",        "T_interval",      "P_mint",          "P_swap",
        "P_swapfrom",      "P_swapto",        "P_burn",          "N_TxU",
        "N_TxE",           "N_mint",          "N_swap",          "N_swapto",
        "N_swapfrom",      "RE_swapfrom_swapto", "N_burn",       "A_mint",
        "A_swap",          "A_swapto",        "A_swapfrom",      "A_burn",
        "A_all",           "RE_mint_all",     "RE_swap_all",     "RE_swapto_all",
        "RE_swapfrom_all", "RE_burn_all",     "RA_mint_all",     "RA_swap_all",
        "RA_swapto_all",   "RA_swapfrom_all", "RA_burn_all",     "L_mintburn",
        "L_swap",          "C_mintburn",      "C_swap",          "N_pool",
        "V_token",         "V_tracked",       "V_untracked",     "N_liquidity",
    };
    return kNames;
}

int FeatureVector::index_of(const std::string& name) {
    const auto& all = names();
    for (size_t i = 0; i < all.size(); ++i)
        if (name == all[i]) return static_cast<int>(i);
    return -1;
}

double time_position(const DataStore& store, const TokenTimeline& timeline, EventClass cls) {
    int64_t offset_sum = 0;
    int64_t n = 0;
    for (size_t idx : timeline.event_indices) {
        const PoolEvent& e = store.events[idx];
        int side = store.token_side(e.pool, timeline.token);
        if (!in_class(e, side, cls)) continue;
        offset_sum += e.timestamp - timeline.t_start;
        ++n;
    }
    if (n == 0) return kSentinel;
    if (timeline.t_end == timeline.t_start) return 0.0;
    return static_cast<double>(offset_sum) / static_cast<double>(n) /
           static_cast<double>(timeline.t_end - timeline.t_start);
}

FeatureExtractor::FeatureExtractor(const DataStore& store, double tracked_liquidity_usd)
    : store_(store), tracked_liquidity_usd_(tracked_liquidity_usd) {
    std::map<AccountAddress, std::set<AccountAddress>> pools_of_addr;
    for (const auto& e : store_.events) {
        pools_of_addr[e.initiator].insert(e.pool);
        if (e.kind == EventKind::Swap)
            ++swap_count_[e.initiator];
        else
            ++mintburn_count_[e.initiator];
    }
    for (const auto& [addr, pools] : pools_of_addr)
        pools_touched_[addr] = static_cast<int>(pools.size());

    // A pool is volume-tracked when its final reserves are worth at least the
    // threshold at snapshot prices; unpriced sides contribute nothing.
    for (const auto& [pool_addr, indices] : store_.events_by_pool) {
        auto pit = store_.pools.find(pool_addr);
        if (pit == store_.pools.end()) continue;
        BigInt net0 = 0, net1 = 0;
        for (size_t idx : indices) {
            const PoolEvent& e = store_.events[idx];
            net0 += BigInt(e.amount0_in.units());
            net0 -= BigInt(e.amount0_out.units());
            net1 += BigInt(e.amount1_in.units());
            net1 -= BigInt(e.amount1_out.units());
        }
        double usd = 0;
        const TokenInfo& t0 = store_.tokens.at(pit->second.token0);
        const TokenInfo& t1 = store_.tokens.at(pit->second.token1);
        if (auto p = store_.prices.try_usd(t0.address))
            usd += net0.convert_to<double>() / std::pow(10.0, t0.decimals) * *p;
        if (auto p = store_.prices.try_usd(t1.address))
            usd += net1.convert_to<double>() / std::pow(10.0, t1.decimals) * *p;
        pool_tracked_[pool_addr] = usd >= tracked_liquidity_usd_;
    }
}

TokenTimeline FeatureExtractor::timeline(const AccountAddress& token) const {
    if (!store_.tokens.count(token)) throw NotFound("unknown token " + token.render());
    TokenTimeline tl;
    tl.token = token;
    tl.study_time = store_.study_time;
    auto it = store_.events_by_token.find(token);
    if (it != store_.events_by_token.end()) tl.event_indices = it->second;
    if (!tl.event_indices.empty()) {
        tl.t_start = store_.events[tl.event_indices.front()].timestamp;
        tl.t_end = store_.events[tl.event_indices.back()].timestamp;
    }
    return tl;
}

FeatureVector FeatureExtractor::extract(const AccountAddress& token) const {
    TokenTimeline tl = timeline(token);
    FeatureVector f;
    const bool has_events = !tl.event_indices.empty();

    f[F_T_period] = has_events ? static_cast<double>(tl.t_end - tl.t_start) : kSentinel;
    f[F_T_interval] = has_events ? static_cast<double>(tl.study_time - tl.t_end) : kSentinel;
    f[F_P_mint] = time_position(store_, tl, EventClass::Mint);
    f[F_P_swap] = time_position(store_, tl, EventClass::Swap);
    f[F_P_swapfrom] = time_position(store_, tl, EventClass::SwapFrom);
    f[F_P_swapto] = time_position(store_, tl, EventClass::SwapTo);
    f[F_P_burn] = time_position(store_, tl, EventClass::Burn);

    int64_t n_mint = 0, n_swap = 0, n_swapto = 0, n_swapfrom = 0, n_burn = 0;
    std::set<AccountAddress> a_mint, a_swap, a_swapto, a_swapfrom, a_burn, a_all;
    std::set<AccountAddress> participants_mintburn, participants_swap;
    double v_token = 0, v_tracked = 0, v_untracked = 0, n_liquidity = 0;

    for (size_t idx : tl.event_indices) {
        const PoolEvent& e = store_.events[idx];
        int side = store_.token_side(e.pool, token);
        a_all.insert(e.initiator);
        switch (e.kind) {
            case EventKind::Mint: {
                ++n_mint;
                a_mint.insert(e.initiator);
                participants_mintburn.insert(e.initiator);
                const TokenAmount& tok_in = side == 0 ? e.amount0_in : e.amount1_in;
                n_liquidity += tok_in.to_double();
                break;
            }
            case EventKind::Burn:
                ++n_burn;
                a_burn.insert(e.initiator);
                participants_mintburn.insert(e.initiator);
                break;
            case EventKind::Swap: {
                ++n_swap;
                a_swap.insert(e.initiator);
                participants_swap.insert(e.initiator);
                if (in_class(e, side, EventClass::SwapTo)) {
                    ++n_swapto;
                    a_swapto.insert(e.initiator);
                } else {
                    ++n_swapfrom;
                    a_swapfrom.insert(e.initiator);
                }
                const TokenAmount& tok_moved = side == 0
                                                   ? (e.amount0_in.is_zero() ? e.amount0_out
                                                                             : e.amount0_in)
                                                   : (e.amount1_in.is_zero() ? e.amount1_out
                                                                             : e.amount1_in);
                v_token += tok_moved.to_double();

                // USD value of the trade: the first priced side wins.
                const PoolInfo& pool = store_.pools.at(e.pool);
                double usd = 0;
                auto side_usd = [&](const AccountAddress& side_token, const TokenAmount& in,
                                    const TokenAmount& out, double& dst) {
                    if (auto p = store_.prices.try_usd(side_token)) {
                        dst = (in.is_zero() ? out : in).to_double() * *p;
                        return true;
                    }
                    return false;
                };
                if (!side_usd(pool.token0, e.amount0_in, e.amount0_out, usd))
                    side_usd(pool.token1, e.amount1_in, e.amount1_out, usd);
                v_untracked += usd;
                auto tracked = pool_tracked_.find(e.pool);
                if (tracked != pool_tracked_.end() && tracked->second) v_tracked += usd;
                break;
            }
        }
    }

    int64_t n_txu = static_cast<int64_t>(tl.event_indices.size());
    int64_t n_txe = 0;
    if (auto it = store_.transfers_by_token.find(token); it != store_.transfers_by_token.end())
        n_txe = static_cast<int64_t>(it->second.size());

    f[F_N_TxU] = static_cast<double>(n_txu);
    f[F_N_TxE] = static_cast<double>(n_txe);
    f[F_N_mint] = static_cast<double>(n_mint);
    f[F_N_swap] = static_cast<double>(n_swap);
    f[F_N_swapto] = static_cast<double>(n_swapto);
    f[F_N_swapfrom] = static_cast<double>(n_swapfrom);
    f[F_RE_swapfrom_swapto] =
        ratio_or_sentinel(static_cast<double>(n_swapfrom), static_cast<double>(n_swapto));
    f[F_N_burn] = static_cast<double>(n_burn);
    f[F_A_mint] = static_cast<double>(a_mint.size());
    f[F_A_swap] = static_cast<double>(a_swap.size());
    f[F_A_swapto] = static_cast<double>(a_swapto.size());
    f[F_A_swapfrom] = static_cast<double>(a_swapfrom.size());
    f[F_A_burn] = static_cast<double>(a_burn.size());
    f[F_A_all] = static_cast<double>(a_all.size());

    double txu = static_cast<double>(n_txu);
    f[F_RE_mint_all] = ratio_or_sentinel(static_cast<double>(n_mint), txu);
    f[F_RE_swap_all] = ratio_or_sentinel(static_cast<double>(n_swap), txu);
    f[F_RE_swapto_all] = ratio_or_sentinel(static_cast<double>(n_swapto), txu);
    f[F_RE_swapfrom_all] = ratio_or_sentinel(static_cast<double>(n_swapfrom), txu);
    f[F_RE_burn_all] = ratio_or_sentinel(static_cast<double>(n_burn), txu);

    double all = static_cast<double>(a_all.size());
    f[F_RA_mint_all] = ratio_or_sentinel(static_cast<double>(a_mint.size()), all);
    f[F_RA_swap_all] = ratio_or_sentinel(static_cast<double>(a_swap.size()), all);
    f[F_RA_swapto_all] = ratio_or_sentinel(static_cast<double>(a_swapto.size()), all);
    f[F_RA_swapfrom_all] = ratio_or_sentinel(static_cast<double>(a_swapfrom.size()), all);
    f[F_RA_burn_all] = ratio_or_sentinel(static_cast<double>(a_burn.size()), all);

    auto investor_avg = [&](const std::set<AccountAddress>& who,
                            const std::map<AccountAddress, int>& pools) {
        if (who.empty()) return kSentinel;
        int64_t sum = 0;
        for (const auto& a : who) {
            auto it = pools.find(a);
            sum += it == pools.end() ? 0 : it->second;
        }
        return static_cast<double>(sum) / static_cast<double>(who.size());
    };
    auto investor_avg64 = [&](const std::set<AccountAddress>& who,
                              const std::map<AccountAddress, int64_t>& counts) {
        if (who.empty()) return kSentinel;
        int64_t sum = 0;
        for (const auto& a : who) {
            auto it = counts.find(a);
            sum += it == counts.end() ? 0 : it->second;
        }
        return static_cast<double>(sum) / static_cast<double>(who.size());
    };
    f[F_L_mintburn] = investor_avg(participants_mintburn, pools_touched_);
    f[F_L_swap] = investor_avg(participants_swap, pools_touched_);
    f[F_C_mintburn] = investor_avg64(participants_mintburn, mintburn_count_);
    f[F_C_swap] = investor_avg64(participants_swap, swap_count_);

    auto pools_it = store_.pools_by_token.find(token);
    f[F_N_pool] =
        pools_it == store_.pools_by_token.end() ? 0.0 : static_cast<double>(pools_it->second.size());
    f[F_V_token] = v_token;
    f[F_V_tracked] = v_tracked;
    f[F_V_untracked] = v_untracked;
    f[F_N_liquidity] = n_liquidity;
    return f;
}

std::map<AccountAddress, FeatureVector> FeatureExtractor::extract_all(unsigned jobs) const {
    std::vector<AccountAddress> order;
    order.reserve(store_.tokens.size());
    for (const auto& [addr, _] : store_.tokens) order.push_back(addr);
    std::vector<FeatureVector> rows(order.size());
    parallel_for(order.size(), jobs, [&](size_t i) { rows[i] = extract(order[i]); });
    std::map<AccountAddress, FeatureVector> out;
    for (size_t i = 0; i < order.size(); ++i) out.emplace(order[i], rows[i]);
    return out;
}

void write_features_csv(const std::filesystem::path& path,
                        const std::map<AccountAddress, FeatureVector>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << "token";
    for (const char* name : FeatureVector::names()) out << ',' << name;
    out << '\n';
    char buf[40];
    for (const auto& [addr, f] : rows) {
        out << addr.render();
        for (size_t i = 0; i < kFeatureCount; ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", f[i]);
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace scamradar
