#include "scamradar/scenario.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

constexpr int64_t kDay = 86400;
constexpr int64_t kMarketStart = 1588712400;  // 2020-05-05 21:00 UTC

struct OfficialSpec {
    const char* address;
    const char* name;
    const char* symbol;
    int decimals;
    double usd;
};

// Well-known mainnet registry entries; the USD column is the static snapshot.
const OfficialSpec kOfficials[] = {
    {"0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2", "Wrapped Ether", "WETH", 18, 600.0},
    {"0xdac17f958d2ee523a2206206994597c13d831ec7", "Tether USD", "USDT", 6, 1.0},
    {"0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48", "USD Coin", "USDC", 6, 1.0},
    {"0x6b175474e89094c44da98b954eedeac495271d0f", "Dai Stablecoin", "DAI", 18, 1.0},
    {"0x1f9840a85d5af5bf1d1762f925bdaddc4201f984", "Uniswap", "UNI", 18, 3.5},
    {"0x2260fac5e5542a773aa44fbcfedf7c193bc2c599", "Wrapped BTC", "WBTC", 8, 19000.0},
    {"0x514910771af9ca656af840dff83e8264ecf986ca", "ChainLink Token", "LINK", 18, 13.0},
    {"0x0bc529c00c6401aef6d220be8c6ea1667f6ad93e", "yearn.finance", "YFI", 18, 24000.0},
    {"0x7fc66500c84a76ad7e9c93437bfc5ac33e2ddae9", "Aave Token", "AAVE", 18, 85.0},
    {"0xc00e94cb662c3520282e6f5717214004a7f26888", "Compound", "COMP", 18, 150.0},
    {"0xc011a73ee8576fb46f5e1c5751ca3b9fe0af2a6f", "Synthetix Network Token", "SNX", 18, 15.0},
    {"0x9f8f72aa9304c8b593d555f12ef6589cc3a579a2", "Maker", "MKR", 18, 560.0},
};

const char* kFakeDefiNames[] = {
    "borrowdale.finance", "yieldnest.finance", "moonfarm.network", "stakepile.cash",
    "degenfield.farm",    "vaultspring.capital", "astrofold.finance", "rocketglen.swap",
    "plutonic.network",   "gemline.protocol",
};

const char* kBrandKeywords[] = {"tiktok", "google", "amazon",  "trump",
                                "elon",   "tesla",  "netflix", "spacex"};
const char* kBrandSuffixes[] = {"coin", "token", "cash", "swap", "network"};

const char* kBenignFirst[] = {"solar",  "amber",  "quiet",   "copper", "violet", "cedar",
                              "marble", "summit", "river",   "frost",  "ember",  "willow",
                              "cobalt", "meadow", "onyx",    "prairie"};
const char* kBenignSecond[] = {"harbor", "garden", "beacon", "lantern", "orchard", "canyon",
                               "harvest", "compass", "bridge", "quarry", "anchor", "grove"};

enum class NameCategory { Clone, SharedFake, Brand, Unique };

Uint256 pow10_units(int decimals) {
    Uint256 v = 1;
    for (int i = 0; i < decimals; ++i) v *= 10;
    return v;
}

// usd -> base units at micro-token resolution; deterministic.
Uint256 usd_to_units(double usd, double price_usd, int decimals) {
    double tokens = usd / price_usd;
    auto micro = static_cast<uint64_t>(std::llround(tokens * 1e6));
    if (micro == 0) micro = 1;
    return Uint256(micro) * pow10_units(decimals - 6);
}

Uint256 whole_tokens(uint64_t count, int decimals) {
    return Uint256(count) * pow10_units(decimals);
}

Uint256 frac_units(const Uint256& u, double f) {
    auto num = static_cast<uint64_t>(std::llround(f * 1e9));
    return ((Uint512(u) * num) / 1000000000u).convert_to<Uint256>();
}

double units_to_usd(const BigInt& units, double price_usd, int decimals) {
    return units.convert_to<double>() / std::pow(10.0, decimals) * price_usd;
}

// Mint-to-burn interval mixture: 37% inside one hour, 86% inside one day,
// the rest up to a week; drawn well away from the bucket edges so clamp
// bumps cannot move a pool across a bucket.
int64_t draw_rug_interval(Rng& rng) {
    double u = rng.uniform01();
    if (u < 0.37) return rng.range_i64(300, 3570);
    if (u < 0.86) return rng.range_i64(3720, 85900);
    return rng.range_i64(87100, 604000);
}

struct MarketBuilder {
    const ScenarioConfig& cfg;
    GeneratedMarket out;
    std::set<AccountAddress> used_addresses;
    std::set<std::string> used_names;
    std::vector<AccountAddress> users;
    std::set<AccountAddress> scam_roles;
    std::set<AccountAddress> victims;
    std::set<AccountAddress> valuable;
    std::set<std::pair<AccountAddress, std::string>> truth_seen;
    int64_t t_begin = kMarketStart;
    int64_t t_end = 0;

    explicit MarketBuilder(const ScenarioConfig& c) : cfg(c) {
        t_end = t_begin + cfg.horizon_days * kDay;
    }

    AccountAddress fresh_address(Rng& rng) {
        for (;;) {
            std::array<uint8_t, 20> b;
            for (size_t i = 0; i < 20; i += 8) {
                uint64_t w = rng.next_u64();
                for (size_t j = 0; j < 8 && i + j < 20; ++j)
                    b[i + j] = static_cast<uint8_t>(w >> (8 * j));
            }
            auto a = AccountAddress::from_bytes(b);
            if (a.is_eth()) continue;
            if (used_addresses.insert(a).second) return a;
        }
    }

    TxHash fresh_tx(Rng& rng) {
        std::array<uint8_t, 32> b;
        for (size_t i = 0; i < 32; i += 8) {
            uint64_t w = rng.next_u64();
            for (size_t j = 0; j < 8; ++j) b[i + j] = static_cast<uint8_t>(w >> (8 * j));
        }
        return TxHash::from_bytes(b);
    }

    void add_truth(const AccountAddress& a, const std::string& kind, const std::string& rule) {
        if (truth_seen.insert({a, kind}).second) out.truth.push_back({a, kind, rule});
    }

    void add_transfer(Rng& rng, int64_t ts, const AccountAddress& token, const AccountAddress& from,
                      const AccountAddress& to, Uint256 units, int decimals,
                      std::optional<TxHash> tx = std::nullopt, int32_t log_index = 0) {
        TransferRecord t;
        t.tx_hash = tx ? *tx : fresh_tx(rng);
        t.log_index = log_index;
        t.timestamp = ts;
        t.token = token;
        t.from = from;
        t.to = to;
        t.amount = TokenAmount(units, decimals);
        out.store.transfers.push_back(std::move(t));
    }
};

// Applies engine operations and records the matching PoolEvent, keeping
// per-pool timestamps strictly increasing so replay order equals emission
// order. Tracks the scam ledger when the pool belongs to a campaign.
struct PoolSim {
    MarketBuilder& mb;
    PoolInfo info;
    PoolState st;
    int val_side = 0;  // which side holds the valuable counter token
    const TokenInfo* tok[2] = {nullptr, nullptr};
    int64_t last_ts = 0;

    PoolLedger* lg = nullptr;
    const std::set<AccountAddress>* members = nullptr;  // campaign scam addresses
    std::set<AccountAddress> pool_victims;
    bool cycle_filled = false;
    int64_t first_scam_mint_ts = -1;

    PoolSim(MarketBuilder& b, const AccountAddress& valuable_token, const TokenInfo& other,
            Rng& rng)
        : mb(b) {
        const TokenInfo& vt = b.out.store.tokens.at(valuable_token);
        info.address = b.fresh_address(rng);
        if (vt.address < other.address) {
            info.token0 = vt.address;
            info.token1 = other.address;
            val_side = 0;
        } else {
            info.token0 = other.address;
            info.token1 = vt.address;
            val_side = 1;
        }
        st = PoolState::empty(b.out.store.tokens.at(info.token0).decimals,
                              b.out.store.tokens.at(info.token1).decimals);
    }

    const TokenInfo& valuable_info() const {
        return mb.out.store.tokens.at(val_side == 0 ? info.token0 : info.token1);
    }
    const TokenInfo& other_info() const {
        return mb.out.store.tokens.at(val_side == 0 ? info.token1 : info.token0);
    }
    const TokenAmount& val_reserve() const { return val_side == 0 ? st.reserve0 : st.reserve1; }
    const TokenAmount& tok_reserve() const { return val_side == 0 ? st.reserve1 : st.reserve0; }

    bool is_member(const AccountAddress& a) const { return members && members->count(a) > 0; }

    int64_t clamp_ts(int64_t ts) {
        if (ts <= last_ts) ts = last_ts + 1;
        last_ts = ts;
        return ts;
    }

    PoolEvent base_event(Rng& rng, EventKind kind, const AccountAddress& who, int64_t ts) {
        PoolEvent e;
        e.tx_hash = mb.fresh_tx(rng);
        e.log_index = 0;
        e.timestamp = ts;
        e.pool = info.address;
        e.kind = kind;
        e.initiator = who;
        e.amount0_in = e.amount0_out = TokenAmount::zero(st.reserve0.decimals());
        e.amount1_in = e.amount1_out = TokenAmount::zero(st.reserve1.decimals());
        e.lp_delta = TokenAmount::zero(18);
        return e;
    }

    void note_victim(const AccountAddress& who) {
        if (lg && !is_member(who)) {
            pool_victims.insert(who);
            mb.victims.insert(who);
        }
    }

    int64_t emit_mint(Rng& rng, const AccountAddress& who, Uint256 val_units, Uint256 tok_units,
                      int64_t ts) {
        ts = clamp_ts(ts);
        TokenAmount v(val_units, valuable_info().decimals);
        TokenAmount t(tok_units, other_info().decimals);
        TokenAmount in0 = val_side == 0 ? v : t;
        TokenAmount in1 = val_side == 0 ? t : v;
        auto r = mint(st, who, in0, in1);
        PoolEvent e = base_event(rng, EventKind::Mint, who, ts);
        e.amount0_in = in0;
        e.amount1_in = in1;
        e.lp_delta = r.lp_minted;
        mb.out.store.events.push_back(e);
        if (info.creation_time == 0) {
            info.creation_time = ts;
            info.creator = who;
        }
        if (lg && is_member(who)) {
            lg->valuable_in_units += BigInt(v.units());
            lg->gross_in_units += BigInt(v.units());
            if (first_scam_mint_ts < 0) first_scam_mint_ts = ts;
            cycle_filled = true;
        }
        note_victim(who);
        st = std::move(r.state);
        return ts;
    }

    struct RatioMint {
        int64_t ts = 0;
        Uint256 val_units = 0;
        bool ok = false;
    };

    // Ratio-matched liquidity add sized as a fraction of the reserves. The
    // floored side is always the one with the larger base-unit reserve, which
    // keeps the relative ratio error around 1/reserve, far inside the engine
    // tolerance even for 6- or 8-decimal tokens.
    RatioMint emit_mint_ratio(Rng& rng, const AccountAddress& who, double frac, int64_t ts) {
        RatioMint out;
        const Uint256& vres = val_reserve().units();
        const Uint256& tres = tok_reserve().units();
        Uint256 v, t;
        if (tres >= vres) {
            v = frac_units(vres, frac);
            if (v == 0) return out;
            t = ((Uint512(v) * Uint512(tres)) / Uint512(vres)).convert_to<Uint256>();
        } else {
            t = frac_units(tres, frac);
            if (t == 0) return out;
            v = ((Uint512(t) * Uint512(vres)) / Uint512(tres)).convert_to<Uint256>();
        }
        if (v == 0 || t == 0) return out;
        out.ts = emit_mint(rng, who, v, t, ts);
        out.val_units = v;
        out.ok = true;
        return out;
    }

    struct SwapRecord {
        int64_t ts = 0;
        Uint256 out_units = 0;
        TxHash tx;
        bool ok = false;
    };

    SwapRecord emit_swap(Rng& rng, const AccountAddress& who, bool buy_token, Uint256 in_units,
                         int64_t ts) {
        SwapRecord rec;
        if (in_units == 0 || !st.has_liquidity()) return rec;
        // buy_token: valuable goes in, token comes out.
        bool in_is_side0 = buy_token ? val_side == 0 : val_side != 0;
        SwapSide side = in_is_side0 ? SwapSide::ZeroForOne : SwapSide::OneForZero;
        TokenAmount in(in_units, in_is_side0 ? st.reserve0.decimals() : st.reserve1.decimals());
        SwapResult r;
        try {
            r = swap(st, who, side, in);
        } catch (const AmmError&) {
            return rec;  // dust or drained pool: drop the planned trade
        }
        ts = clamp_ts(ts);
        PoolEvent e = base_event(rng, EventKind::Swap, who, ts);
        if (in_is_side0) {
            e.amount0_in = in;
            e.amount1_out = r.amount_out;
        } else {
            e.amount1_in = in;
            e.amount0_out = r.amount_out;
        }
        mb.out.store.events.push_back(e);
        if (lg && is_member(who)) {
            lg->scammer_swap_involved = true;
            if (buy_token)
                lg->valuable_in_units += BigInt(in_units);
            else
                lg->valuable_out_units += BigInt(r.amount_out.units());
        }
        note_victim(who);
        rec.ts = ts;
        rec.out_units = r.amount_out.units();
        rec.tx = e.tx_hash;
        rec.ok = true;
        st = std::move(r.state);
        return rec;
    }

    int64_t emit_burn(Rng& rng, const AccountAddress& who, Uint256 lp_units, int64_t ts) {
        TokenAmount held = st.lp_balance_of(who);
        if (lp_units == 0 || held.is_zero()) return last_ts;
        if (lp_units > held.units()) lp_units = held.units();
        ts = clamp_ts(ts);
        TokenAmount lp(lp_units, 18);
        auto r = burn(st, who, lp);
        PoolEvent e = base_event(rng, EventKind::Burn, who, ts);
        e.amount0_out = r.out0;
        e.amount1_out = r.out1;
        e.lp_delta = lp;
        mb.out.store.events.push_back(e);
        if (lg && is_member(who)) {
            const TokenAmount& val_out = val_side == 0 ? r.out0 : r.out1;
            lg->valuable_out_units += BigInt(val_out.units());
            lg->gross_out_units += BigInt(val_out.units());
            bool drained = Uint512(lp_units) * 10 >= Uint512(held.units()) * 9;
            if (drained && cycle_filled) {
                lg->rounds += 1;
                cycle_filled = false;
                if (lg->rug_interval_s < 0 && first_scam_mint_ts >= 0)
                    lg->rug_interval_s = ts - first_scam_mint_ts;
            }
        }
        note_victim(who);
        st = std::move(r.state);
        return ts;
    }

    void finalize() {
        mb.out.store.pools.emplace(info.address, info);
        if (lg) lg->victim_count = static_cast<int>(pool_victims.size());
    }
};

// --- organic (non-scam) activity -------------------------------------------------

void run_organic_pool(MarketBuilder& mb, PoolSim& sim, Rng& rng, const AccountAddress& owner,
                      Uint256 init_val, Uint256 init_tok, int64_t start_ts, int64_t end_ts,
                      int swap_count, int extra_lp_count) {
    sim.emit_mint(rng, owner, init_val, init_tok, start_ts);

    struct Planned {
        int64_t ts;
        int what;  // 0 swap, 1 lp mint, 2 lp burn
        size_t actor;
        double x;
        bool buy;
    };
    std::vector<Planned> plan;
    plan.reserve(swap_count + 2 * extra_lp_count + 2);

    for (int i = 0; i < swap_count; ++i) {
        Planned p;
        p.ts = rng.range_i64(start_ts + 60, end_ts);
        p.what = 0;
        p.actor = rng.below(mb.users.size());
        p.buy = rng.uniform01() < 0.55;
        p.x = std::clamp(rng.lognormal(std::log(150.0), 1.2), 10.0, 5000.0);
        plan.push_back(p);
    }
    std::vector<size_t> lps;
    for (int i = 0; i < extra_lp_count; ++i) {
        Planned p;
        p.ts = rng.range_i64(start_ts + 120, start_ts + (end_ts - start_ts) * 2 / 3);
        p.what = 1;
        p.actor = rng.below(mb.users.size());
        p.x = rng.uniform(0.05, 0.4);
        plan.push_back(p);
        lps.push_back(p.actor);
    }
    for (size_t i = 0; i < lps.size(); ++i) {
        if (rng.uniform01() < 0.55) {
            Planned p;
            p.ts = rng.range_i64(start_ts + (end_ts - start_ts) * 2 / 3, end_ts);
            p.what = 2;
            p.actor = lps[i];
            p.x = rng.uniform(0.2, 0.6);
            plan.push_back(p);
        }
    }
    if (rng.uniform01() < 0.5) {  // owner trims a slice late, never a drain
        Planned p;
        p.ts = rng.range_i64(start_ts + (end_ts - start_ts) * 3 / 4, end_ts);
        p.what = 2;
        p.actor = SIZE_MAX;
        p.x = rng.uniform(0.1, 0.4);
        plan.push_back(p);
    }
    std::stable_sort(plan.begin(), plan.end(),
                     [](const Planned& a, const Planned& b) { return a.ts < b.ts; });

    const double val_price = mb.out.store.prices.usd.at(sim.valuable_info().address);
    for (const auto& p : plan) {
        AccountAddress who = p.actor == SIZE_MAX ? owner : mb.users[p.actor];
        switch (p.what) {
            case 0: {
                if (p.buy) {
                    Uint256 in = usd_to_units(p.x, val_price, sim.valuable_info().decimals);
                    if (in > frac_units(sim.val_reserve().units(), 0.2))
                        in = frac_units(sim.val_reserve().units(), 0.2);
                    sim.emit_swap(rng, who, true, in, p.ts);
                } else {
                    Uint256 in = frac_units(sim.tok_reserve().units(), rng.uniform(0.0005, 0.01));
                    sim.emit_swap(rng, who, false, in, p.ts);
                }
                break;
            }
            case 1:
                sim.emit_mint_ratio(rng, who, p.x, p.ts);
                break;
            case 2:
                sim.emit_burn(rng, who, frac_units(sim.st.lp_balance_of(who).units(), p.x), p.ts);
                break;
        }
    }
}

void emit_token_transfers(MarketBuilder& mb, Rng& rng, const TokenInfo& token, int count,
                          int64_t start_ts, int64_t end_ts) {
    for (int i = 0; i < count; ++i) {
        size_t a = rng.below(mb.users.size());
        size_t b = rng.below(mb.users.size());
        if (a == b) b = (b + 1) % mb.users.size();
        Uint256 units = whole_tokens(1 + rng.below(5000), token.decimals);
        mb.add_transfer(rng, rng.range_i64(start_ts, end_ts), token.address, mb.users[a],
                        mb.users[b], units, token.decimals);
    }
}

// --- scam campaigns ------------------------------------------------------------------

struct NamePlan {
    NameCategory category;
    std::string name;
    std::string symbol;
};

std::vector<NamePlan> plan_scam_names(const ScenarioConfig& cfg, int count, Rng& rng) {
    std::vector<NamePlan> plans(count);
    std::vector<int> shared_indices;
    int brand_counter = 0, unique_counter = 0, clone_counter = 0;

    for (int i = 0; i < count; ++i) {
        bool grouped = i < cfg.multi_token_creator_count * cfg.tokens_per_creator;
        NameCategory cat;
        if (grouped) {
            cat = (i % cfg.tokens_per_creator == 0) ? NameCategory::Clone : NameCategory::Unique;
        } else {
            double u = rng.uniform01();
            if (u < cfg.name_clone_fraction) cat = NameCategory::Clone;
            else if (u < cfg.name_clone_fraction + cfg.shared_fake_name_fraction)
                cat = NameCategory::SharedFake;
            else if (u < cfg.name_clone_fraction + cfg.shared_fake_name_fraction +
                             cfg.brand_name_fraction)
                cat = NameCategory::Brand;
            else
                cat = NameCategory::Unique;
        }
        plans[i].category = cat;
        switch (cat) {
            case NameCategory::Clone: {
                const auto& off = kOfficials[rng.below(std::size(kOfficials))];
                plans[i].name = off.name;
                plans[i].symbol = rng.uniform01() < 0.5
                                      ? off.symbol
                                      : std::string(off.symbol) + std::to_string(clone_counter);
                ++clone_counter;
                break;
            }
            case NameCategory::SharedFake:
                shared_indices.push_back(i);
                break;
            case NameCategory::Brand: {
                const char* kw = kBrandKeywords[rng.below(std::size(kBrandKeywords))];
                const char* sfx = kBrandSuffixes[rng.below(std::size(kBrandSuffixes))];
                plans[i].name = std::string(kw) + " " + sfx;
                plans[i].symbol = "BR" + std::to_string(brand_counter++);
                break;
            }
            case NameCategory::Unique:
                plans[i].name = "lone venture " + std::to_string(unique_counter);
                plans[i].symbol = "LNV" + std::to_string(unique_counter);
                ++unique_counter;
                break;
        }
    }

    // Identical-name groups of 3; a size-1 tail reuses the previous group's
    // name so no shared name is left as a singleton.
    std::string prev_name, prev_sym;
    for (size_t g = 0, k = 0; k < shared_indices.size(); ++g) {
        size_t remaining = shared_indices.size() - k;
        size_t take = remaining == 4 ? 4 : std::min<size_t>(3, remaining);
        std::string name, sym;
        if (remaining == 1 && g > 0) {
            name = prev_name;
            sym = prev_sym;
        } else {
            std::string base = kFakeDefiNames[g % std::size(kFakeDefiNames)];
            name = g < std::size(kFakeDefiNames)
                       ? base
                       : base + " v" + std::to_string(g / std::size(kFakeDefiNames) + 1);
            sym = "FD" + std::to_string(g);
        }
        for (size_t j = 0; j < take; ++j, ++k) {
            plans[shared_indices[k]].name = name;
            plans[shared_indices[k]].symbol = sym;
        }
        prev_name = name;
        prev_sym = sym;
    }
    return plans;
}

struct CampaignOutcome {
    CampaignScript script;
    PoolLedger ledger;
};

CampaignOutcome run_scam_campaign(MarketBuilder& mb, CampaignKind kind, int campaign_index,
                                  const NamePlan& names, const AccountAddress& creator,
                                  bool creator_excluded) {
    const ScenarioConfig& cfg = mb.cfg;
    Rng rng = Rng(cfg.seed).fork(1000 + campaign_index);

    // Counter token: mostly WETH, sometimes a stable coin.
    double u = rng.uniform01();
    const OfficialSpec& counter = u < 0.83   ? kOfficials[0]
                                  : u < 0.91 ? kOfficials[1]
                                  : u < 0.96 ? kOfficials[2]
                                             : kOfficials[3];
    AccountAddress counter_addr = AccountAddress::parse(counter.address);

    bool second_round = kind == CampaignKind::SecondRoundRugPull;
    int64_t t0_max = mb.t_end - (second_round ? 16 : 8) * kDay;
    int64_t t0 = rng.range_i64(mb.t_begin + 2 * kDay, t0_max);
    int64_t interval = draw_rug_interval(rng);
    int64_t t1 = t0 + interval;

    TokenInfo token;
    token.address = mb.fresh_address(rng);
    token.name = names.name;
    token.symbol = names.symbol;
    token.decimals = 18;
    token.creator = creator;
    token.creation_time = t0 - rng.range_i64(600, 7200);
    mb.out.store.tokens.emplace(token.address, token);

    PoolSim sim(mb, counter_addr, token, rng);
    PoolLedger ledger;
    ledger.pool = sim.info.address;
    ledger.token = token.address;
    ledger.valuable = counter_addr;
    sim.lg = &ledger;

    std::set<AccountAddress> members{creator};
    AccountAddress c1, c2, c3, c4, c5, fee_addr;
    bool two_hop = false;
    if (kind == CampaignKind::CollusionRugPull) {
        c1 = mb.fresh_address(rng);
        c2 = mb.fresh_address(rng);
        c3 = mb.fresh_address(rng);
        c4 = mb.fresh_address(rng);
        members.insert({c1, c2, c3, c4});
        ledger.collusion["p1"].push_back(c1);
        ledger.collusion["p2"].push_back(c2);
        ledger.collusion["p3"].push_back(c3);
        ledger.collusion["p4"].push_back(c4);
        two_hop = campaign_index % 48 == 0;  // a couple of chains per default run
        if (two_hop) {
            c5 = mb.fresh_address(rng);
            members.insert(c5);
            ledger.collusion["twohop"].push_back(c5);
        }
    }
    const bool fee_active = kind == CampaignKind::AdvanceFee && cfg.advance_fee_fraction > 0;
    if (fee_active) {
        fee_addr = mb.fresh_address(rng);
        members.insert(fee_addr);
        ledger.advance_fee = {{fee_addr, cfg.advance_fee_fraction}};
    }
    sim.members = &members;

    double init_usd = std::clamp(rng.lognormal(std::log(18000.0), 0.7), 3000.0, 200000.0);
    Uint256 init_val = usd_to_units(init_usd, counter.usd, counter.decimals);
    Uint256 init_tok = whole_tokens(100000 + rng.below(1900000), 18);
    sim.emit_mint(rng, creator, init_val, init_tok, t0);

    // Victim buys spread inside the pool's life.
    int n_victims = static_cast<int>(rng.poisson(cfg.victims_mean));
    if (fee_active) n_victims = std::max(n_victims, 5);
    else if (cfg.victims_mean > 0) n_victims = std::max(n_victims, 1);
    n_victims = std::min<int>(n_victims, static_cast<int>((interval - 60) / 20));
    n_victims = std::max(n_victims, 0);

    std::set<int64_t> used_buy_ts;
    auto draw_distinct_ts = [&](int64_t lo, int64_t hi) {
        for (;;) {
            int64_t t = rng.range_i64(lo, hi);
            if (used_buy_ts.insert(t).second) return t;
        }
    };
    std::vector<std::pair<int64_t, size_t>> buys;
    for (int i = 0; i < n_victims; ++i)
        buys.push_back({draw_distinct_ts(t0 + 30, t1 - 30), rng.below(mb.users.size())});
    std::sort(buys.begin(), buys.end());

    const double counter_price = counter.usd;
    auto victim_buy = [&](int64_t ts, size_t user_idx) {
        double usd = std::clamp(rng.lognormal(std::log(250.0), 1.0), 20.0, 20000.0);
        Uint256 in = usd_to_units(usd, counter_price, counter.decimals);
        auto rec = sim.emit_swap(rng, mb.users[user_idx], true, in, ts);
        if (rec.ok && fee_active) {
            Uint256 fee = frac_units(rec.out_units, cfg.advance_fee_fraction);
            if (fee == 0) fee = 1;
            mb.add_transfer(rng, rec.ts, token.address, sim.info.address, mb.users[user_idx],
                            rec.out_units, 18, rec.tx, 1);
            mb.add_transfer(rng, rec.ts, token.address, mb.users[user_idx], fee_addr, fee, 18,
                            rec.tx, 2);
        }
    };

    size_t buy_cursor = 0;
    auto emit_buys_until = [&](int64_t ts) {
        while (buy_cursor < buys.size() && buys[buy_cursor].first <= ts) {
            victim_buy(buys[buy_cursor].first, buys[buy_cursor].second);
            ++buy_cursor;
        }
    };

    if (kind == CampaignKind::PumpAndDumpRugPull) {
        int pumps = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < pumps; ++i) {
            int64_t ts = t0 + (i + 1) * interval / (pumps + 2);
            emit_buys_until(ts);
            Uint256 in = usd_to_units(rng.uniform(1000.0, 8000.0), counter_price, counter.decimals);
            sim.emit_swap(rng, creator, true, in, ts);
        }
        emit_buys_until(t1 - 25);
        if (rng.uniform01() < 0.6)  // dump a retained stash before pulling
            sim.emit_swap(rng, creator, false,
                          frac_units(sim.tok_reserve().units(), rng.uniform(0.05, 0.15)), t1 - 20);
    } else if (kind == CampaignKind::CollusionRugPull) {
        int64_t tm1 = t0 + interval / 4;
        int64_t tm2 = t0 + interval * 35 / 100;
        int64_t ts3 = t0 + interval / 2;
        int64_t tt4 = t0 + interval * 55 / 100;
        int64_t ts4 = t0 + interval * 3 / 4;
        int64_t ts5 = t0 + interval * 4 / 5;

        emit_buys_until(tm1);
        // pattern 1: fund first, then add liquidity
        {
            auto minted = sim.emit_mint_ratio(rng, c1, rng.uniform(0.1, 0.3), tm1);
            if (minted.ok)
                mb.add_transfer(rng, minted.ts - rng.range_i64(120, 600), counter_addr, creator,
                                c1, frac_units(minted.val_units, 1.05), counter.decimals);
        }
        // pattern 2: add liquidity unfunded; the remit comes after its burn
        emit_buys_until(tm2);
        sim.emit_mint_ratio(rng, c2, rng.uniform(0.08, 0.2), tm2);
        // pattern 3: fund first, then pump-buy
        emit_buys_until(ts3);
        {
            Uint256 in = usd_to_units(rng.uniform(800.0, 4000.0), counter_price, counter.decimals);
            auto rec = sim.emit_swap(rng, c3, true, in, ts3);
            if (rec.ok)
                mb.add_transfer(rng, rec.ts - rng.range_i64(120, 600), counter_addr, creator, c3,
                                frac_units(in, 1.02), counter.decimals);
        }
        // pattern 4: receive tokens, dump them, remit the proceeds
        emit_buys_until(ts4);
        {
            Uint256 tok_in = frac_units(sim.tok_reserve().units(), rng.uniform(0.03, 0.1));
            auto rec = sim.emit_swap(rng, c4, false, tok_in, ts4);
            if (rec.ok) {
                mb.add_transfer(rng, std::min(tt4, rec.ts - 60), token.address, creator, c4, tok_in,
                                18);
                mb.add_transfer(rng, rec.ts + rng.range_i64(300, 3600), counter_addr, c4, creator,
                                frac_units(rec.out_units, 0.98), counter.decimals);
            }
        }
        // one extra hop: the pattern-1 address funds a second-generation buyer
        if (two_hop) {
            emit_buys_until(ts5);
            Uint256 in = usd_to_units(rng.uniform(500.0, 2000.0), counter_price, counter.decimals);
            auto rec = sim.emit_swap(rng, c5, true, in, ts5);
            if (rec.ok)
                mb.add_transfer(rng, rec.ts - rng.range_i64(120, 600), counter_addr, c1, c5,
                                frac_units(in, 1.02), counter.decimals);
        }
        emit_buys_until(t1 - 30);
        // collusion LPs leave just before the pull, then pattern 2 remits
        int64_t c1_burn = sim.emit_burn(rng, c1, sim.st.lp_balance_of(c1).units(), t1 - 10);
        (void)c1_burn;
        {
            Uint256 held = sim.st.lp_balance_of(c2).units();
            Uint512 supply(sim.st.lp_total_supply.units());
            Uint256 val_out = ((Uint512(sim.val_reserve().units()) * Uint512(held)) / supply)
                                  .convert_to<Uint256>();
            int64_t burn_ts = sim.emit_burn(rng, c2, held, t1 - 5);
            mb.add_transfer(rng, burn_ts + rng.range_i64(60, 240), counter_addr, c2, creator,
                            frac_units(val_out, 0.98), counter.decimals);
        }
    } else {
        emit_buys_until(t1 - 30);
    }
    emit_buys_until(t1 - 25);

    // The pull: creator drains their whole LP position.
    int64_t drain_ts = sim.emit_burn(rng, creator, sim.st.lp_balance_of(creator).units(), t1);

    if (second_round) {
        int64_t r0 = drain_ts + 240;
        Uint256 v2 = frac_units(init_val, 0.5);
        Uint256 t2 = frac_units(init_tok, 0.5);
        sim.emit_mint(rng, creator, v2, t2, r0);
        int64_t interval2 = draw_rug_interval(rng);
        int n2 = std::max(1, static_cast<int>(rng.poisson(cfg.victims_mean)));
        n2 = std::min<int>(n2, static_cast<int>((interval2 - 60) / 20));
        std::vector<std::pair<int64_t, size_t>> buys2;
        for (int i = 0; i < n2; ++i)
            buys2.push_back(
                {draw_distinct_ts(r0 + 30, r0 + interval2 - 30), rng.below(mb.users.size())});
        std::sort(buys2.begin(), buys2.end());
        for (auto& [ts, user] : buys2) {
            double usd = std::clamp(rng.lognormal(std::log(250.0), 1.0), 20.0, 20000.0);
            sim.emit_swap(rng, mb.users[user], true,
                          usd_to_units(usd, counter_price, counter.decimals), ts);
        }
        sim.emit_burn(rng, creator, sim.st.lp_balance_of(creator).units(), r0 + interval2);
    }

    sim.finalize();
    for (const auto& a : members) mb.scam_roles.insert(a);
    mb.scam_roles.insert(token.address);
    mb.scam_roles.insert(sim.info.address);

    // Truth rows.
    const char* rule = nullptr;
    switch (names.category) {
        case NameCategory::Clone: rule = "name_clone"; break;
        case NameCategory::SharedFake: rule = "shared_fake_name"; break;
        case NameCategory::Brand: rule = "brand_name"; break;
        case NameCategory::Unique: rule = "unique_name"; break;
    }
    mb.add_truth(token.address, "ScamToken", rule);
    mb.add_truth(sim.info.address, "ScamPool", "scripted");
    if (!creator_excluded) {
        mb.add_truth(creator, "ScamTokenCreator", "scripted");
        mb.add_truth(creator, "ScamPoolCreator", "scripted");
    }
    if (kind == CampaignKind::CollusionRugPull) {
        mb.add_truth(c1, "CollusionAddress", "collusion_p1");
        mb.add_truth(c2, "CollusionAddress", "collusion_p2");
        mb.add_truth(c3, "CollusionAddress", "collusion_p3");
        mb.add_truth(c4, "CollusionAddress", "collusion_p4");
        if (two_hop) mb.add_truth(c5, "CollusionAddress", "collusion_twohop");
    }
    if (fee_active) mb.add_truth(fee_addr, "AdvanceFeeCollector", "scripted");

    CampaignOutcome outcome;
    outcome.script.kind = kind;
    outcome.script.scammer_addresses.assign(members.begin(), members.end());
    outcome.script.initial_liquidity = {TokenAmount(init_val, counter.decimals),
                                        TokenAmount(init_tok, 18)};
    outcome.script.victim_count = static_cast<int>(sim.pool_victims.size());
    outcome.script.mint_ts = t0;
    outcome.script.burn_ts = drain_ts;
    outcome.script.rng_seed = cfg.seed ^ (1000 + campaign_index);
    outcome.script.token = token.address;
    outcome.script.pool = sim.info.address;
    outcome.ledger = std::move(ledger);
    return outcome;
}

void run_benign_token(MarketBuilder& mb, int index, const AccountAddress& creator,
                      const std::string& name, const std::string& symbol, double swaps_mean,
                      int swaps_cap) {
    Rng rng = Rng(mb.cfg.seed).fork(100000 + index);


    const OfficialSpec& counter = rng.uniform01() < 0.88 ? kOfficials[0]
                                  : rng.uniform01() < 0.5 ? kOfficials[1]
                                                          : kOfficials[3];
    AccountAddress counter_addr = AccountAddress::parse(counter.address);

    int64_t tb0 = rng.range_i64(mb.t_begin + kDay, mb.t_end - 25 * kDay);
    int64_t tb1 = tb0 + static_cast<int64_t>(rng.uniform(0.4, 1.0) * (mb.t_end - tb0));

    TokenInfo token;
    token.address = mb.fresh_address(rng);
    token.name = name;
    token.symbol = symbol;
    token.decimals = 18;
    token.creator = creator;
    token.creation_time = tb0 - rng.range_i64(3600, 5 * kDay);
    mb.out.store.tokens.emplace(token.address, token);

    PoolSim sim(mb, counter_addr, token, rng);
    double init_usd = std::clamp(rng.lognormal(std::log(30000.0), 0.9), 5000.0, 500000.0);
    Uint256 init_val = usd_to_units(init_usd, counter.usd, counter.decimals);
    Uint256 init_tok = whole_tokens(50000 + rng.below(5000000), 18);

    int swaps = 3 + static_cast<int>(std::min<uint64_t>(
                        rng.geometric(1.0 / std::max(1.0, swaps_mean)), static_cast<uint64_t>(swaps_cap)));
    int extra_lp = static_cast<int>(rng.poisson(0.8));
    run_organic_pool(mb, sim, rng, creator, init_val, init_tok, tb0, tb1, swaps, extra_lp);
    sim.finalize();

    emit_token_transfers(mb, rng, token, static_cast<int>(rng.poisson(4.0)), tb0, tb1);

}

}  // namespace

const char* to_string(CampaignKind k) {
    switch (k) {
        case CampaignKind::RugPull: return "rugpull";
        case CampaignKind::PumpAndDumpRugPull: return "pump";
        case CampaignKind::SecondRoundRugPull: return "secondround";
        case CampaignKind::CollusionRugPull: return "collusion";
        case CampaignKind::AdvanceFee: return "advancefee";
        case CampaignKind::Benign: return "benign";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    if (benign_tokens < 0 || campaigns.rug_pull < 0 || campaigns.pump_and_dump < 0 ||
        campaigns.second_round < 0 || campaigns.collusion < 0 || campaigns.advance_fee < 0)
        throw ConfigError("negative token or campaign count");
    if (horizon_days < 30) throw ConfigError("horizon_days must be at least 30");
    if (victims_mean < 0) throw ConfigError("victims_mean must be >= 0");
    if (victims_mean == 0 &&
        (campaigns.pump_and_dump > 0 || campaigns.collusion > 0 || campaigns.advance_fee > 0))
        throw ConfigError("victims=0 is infeasible for pump, collusion, or advance-fee campaigns");
    // A zero fraction degrades advance-fee campaigns to plain rug pulls.
    if (advance_fee_fraction < 0 || advance_fee_fraction >= 1)
        throw ConfigError("advance_fee_fraction must lie in [0,1)");
    double nf = name_clone_fraction + shared_fake_name_fraction + brand_name_fraction;
    if (name_clone_fraction < 0 || shared_fake_name_fraction < 0 || brand_name_fraction < 0 ||
        nf > 1.0 + 1e-9)
        throw ConfigError("name fractions must be non-negative and sum to at most 1");
    if (multi_token_creator_count < 0 || tokens_per_creator < 1)
        throw ConfigError("bad multi-token creator settings");
}

GeneratedMarket generate_market(const ScenarioConfig& config) {
    config.validate();
    MarketBuilder mb(config);
    Rng master(config.seed);

    // Officials: registry entries, prices, one organic pool vs WETH each.
    mb.out.store.prices.valuation_date = "2020-12-06";
    mb.out.store.prices.usd[AccountAddress::eth_sentinel()] = 600.0;
    Rng offrng = master.fork(1);
    for (const auto& spec : kOfficials) {
        TokenInfo t;
        t.address = AccountAddress::parse(spec.address);
        t.name = spec.name;
        t.symbol = spec.symbol;
        t.decimals = spec.decimals;
        t.creator = mb.fresh_address(offrng);
        t.creation_time = mb.t_begin - offrng.range_i64(30 * kDay, 400 * kDay);
        mb.used_addresses.insert(t.address);
        mb.out.store.tokens.emplace(t.address, t);
        mb.out.store.prices.usd[t.address] = spec.usd;
        mb.out.official.push_back(
            {t.address, normalize_name(spec.name), normalize_name(spec.symbol)});
        mb.valuable.insert(AccountAddress::eth_sentinel());
    }
    for (const char* sym : {"WETH", "USDT", "USDC", "DAI"})
        for (const auto& spec : kOfficials)
            if (std::string(spec.symbol) == sym)
                mb.valuable.insert(AccountAddress::parse(spec.address));

    // Shared trader/victim population.
    int total_scam = config.campaigns.total();
    int population = config.user_population > 0
                         ? config.user_population
                         : std::max(50, static_cast<int>(config.victims_mean * total_scam * 0.7) +
                                            config.benign_tokens / 4 + 40);
    Rng poprng = master.fork(2);
    mb.users.reserve(population);
    for (int i = 0; i < population; ++i) mb.users.push_back(mb.fresh_address(poprng));

    // Organic markets for the officials themselves (paired against WETH).
    for (size_t i = 1; i < std::size(kOfficials); ++i) {
        Rng rng = master.fork(10 + i);
        const auto& spec = kOfficials[i];
        const TokenInfo& token = mb.out.store.tokens.at(AccountAddress::parse(spec.address));
        PoolSim sim(mb, AccountAddress::parse(kOfficials[0].address), token, rng);
        AccountAddress whale = mb.fresh_address(rng);
        double weth_usd = rng.uniform(1.2e6, 4.8e6);
        Uint256 init_val = usd_to_units(weth_usd, 600.0, 18);
        Uint256 init_tok = usd_to_units(weth_usd, spec.usd, spec.decimals);
        int64_t start = mb.t_begin + rng.range_i64(0, 3 * kDay);
        int64_t end = mb.t_end - rng.range_i64(0, 2 * kDay);
        int swaps = static_cast<int>(std::min<uint64_t>(
            rng.poisson(config.official_activity_mean),
            static_cast<uint64_t>(config.official_activity_mean * 2 + 50)));
        int extra_lp = 2 + static_cast<int>(rng.poisson(2.0));
        run_organic_pool(mb, sim, rng, whale, init_val, init_tok, start, end, swaps, extra_lp);
        sim.finalize();
        emit_token_transfers(mb, rng, token,
                             static_cast<int>(rng.poisson(config.official_activity_mean / 2)),
                             start, end);
    }

    // Benign tokens.
    Rng namerng = master.fork(3);
    for (int i = 0; i < config.benign_tokens; ++i) {
        std::string name = std::string(kBenignFirst[namerng.below(std::size(kBenignFirst))]) + " " +
                           kBenignSecond[namerng.below(std::size(kBenignSecond))] + " " +
                           std::to_string(i);
        std::string symbol = "BN" + std::to_string(i);
        Rng crng = master.fork(500000 + i);
        run_benign_token(mb, i, mb.fresh_address(crng), name, symbol, config.benign_swaps_mean,
                         config.benign_swaps_cap);
    }

    // Optional contract-deployer demo: one seeded scam plus a benign batch by
    // the same address, which the user label file excludes from expansion.
    AccountAddress demo_deployer;
    if (config.excluded_deployer_demo) {
        Rng drng = master.fork(4);
        demo_deployer = mb.fresh_address(drng);
        for (int i = 0; i < config.excluded_deployer_benign_tokens; ++i) {
            run_benign_token(mb, 900000 + i, demo_deployer,
                             "deployer client " + std::to_string(i), "DC" + std::to_string(i), 6.0,
                             20);
        }
        Label l;
        l.subject = demo_deployer;
        l.kind = LabelKind::ContractDeployerExcluded;
        l.provenance = Provenance::UserSupplied;
        l.evidence = "tagged contract deployer";
        mb.out.user_labels.push_back(l);
    }

    // Scam campaigns.
    std::vector<CampaignKind> kinds;
    for (int i = 0; i < config.campaigns.rug_pull; ++i) kinds.push_back(CampaignKind::RugPull);
    for (int i = 0; i < config.campaigns.pump_and_dump; ++i)
        kinds.push_back(CampaignKind::PumpAndDumpRugPull);
    for (int i = 0; i < config.campaigns.second_round; ++i)
        kinds.push_back(CampaignKind::SecondRoundRugPull);
    for (int i = 0; i < config.campaigns.collusion; ++i)
        kinds.push_back(CampaignKind::CollusionRugPull);
    for (int i = 0; i < config.campaigns.advance_fee; ++i)
        kinds.push_back(CampaignKind::AdvanceFee);

    Rng plan_rng = master.fork(5);
    auto name_plans = plan_scam_names(config, static_cast<int>(kinds.size()), plan_rng);

    std::vector<AccountAddress> shared_creators;
    for (int i = 0; i < config.multi_token_creator_count; ++i)
        shared_creators.push_back(mb.fresh_address(plan_rng));

    for (size_t ci = 0; ci < kinds.size(); ++ci) {
        AccountAddress creator;
        bool grouped = static_cast<int>(ci) <
                       config.multi_token_creator_count * config.tokens_per_creator;
        if (grouped)
            creator = shared_creators[ci / config.tokens_per_creator];
        else {
            Rng crng = master.fork(700000 + ci);
            creator = mb.fresh_address(crng);
        }
        auto outcome =
            run_scam_campaign(mb, kinds[ci], static_cast<int>(ci), name_plans[ci], creator, false);
        mb.out.scripts.push_back(std::move(outcome.script));
        mb.out.ledger.push_back(std::move(outcome.ledger));
    }
    if (config.excluded_deployer_demo) {
        NamePlan demo_plan{NameCategory::Clone, kOfficials[1].name, kOfficials[1].symbol};
        auto outcome = run_scam_campaign(mb, CampaignKind::RugPull,
                                         static_cast<int>(kinds.size()), demo_plan, demo_deployer,
                                         /*creator_excluded=*/true);
        mb.out.scripts.push_back(std::move(outcome.script));
        mb.out.ledger.push_back(std::move(outcome.ledger));
    }

    // Victim truth rows.
    for (const auto& v : mb.victims) mb.add_truth(v, "Victim", "scripted");

    mb.out.brand_keywords.assign(std::begin(kBrandKeywords), std::end(kBrandKeywords));
    mb.out.store.sort_and_index();

    // Ledger USD valuations.
    for (auto& lg : mb.out.ledger) {
        const TokenInfo& vt = mb.out.store.tokens.at(lg.valuable);
        double price = mb.out.store.prices.usd.at(lg.valuable);
        lg.profit_usd =
            units_to_usd(lg.valuable_out_units - lg.valuable_in_units, price, vt.decimals);
        lg.gross_profit_usd =
            units_to_usd(lg.gross_out_units - lg.gross_in_units, price, vt.decimals);
    }
    std::sort(mb.out.ledger.begin(), mb.out.ledger.end(),
              [](const PoolLedger& a, const PoolLedger& b) { return a.pool < b.pool; });
    std::sort(mb.out.truth.begin(), mb.out.truth.end(), [](const TruthRow& a, const TruthRow& b) {
        return std::tie(a.address, a.kind, a.rule) < std::tie(b.address, b.kind, b.rule);
    });
    return mb.out;
}

void write_market(const GeneratedMarket& market, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_tokens(dir / "tokens.csv", market.store.tokens);
    write_pools(dir / "pools.csv", market.store.pools);
    write_events(dir / "events.jsonl", market.store.events);
    write_transfers(dir / "transfers.jsonl", market.store.transfers);
    write_official(dir / "official.csv", market.official);
    write_prices(dir / "prices.csv", market.store.prices);

    {
        std::ofstream out(dir / "labels.csv", std::ios::trunc);
        out << "address,kind\n";
        for (const auto& l : market.user_labels)
            out << csv_join({l.subject.render(), to_string(l.kind)}) << '\n';
    }
    {
        std::ofstream out(dir / "brand_keywords.txt", std::ios::trunc);
        for (const auto& k : market.brand_keywords) out << k << '\n';
    }
    {
        std::ofstream out(dir / "truth_labels.csv", std::ios::trunc);
        out << "address,kind,rule\n";
        for (const auto& r : market.truth)
            out << csv_join({r.address.render(), r.kind, r.rule}) << '\n';
    }
    {
        nlohmann::ordered_json j;
        j["pools"] = nlohmann::ordered_json::array();
        double total = 0;
        for (const auto& lg : market.ledger) {
            nlohmann::ordered_json p;
            p["pool"] = lg.pool.render();
            p["token"] = lg.token.render();
            p["valuable"] = lg.valuable.render();
            p["valuableInUnits"] = lg.valuable_in_units.str();
            p["valuableOutUnits"] = lg.valuable_out_units.str();
            p["profitUsd"] = lg.profit_usd;
            p["grossProfitUsd"] = lg.gross_profit_usd;
            p["victimCount"] = lg.victim_count;
            p["rugIntervalSeconds"] = lg.rug_interval_s;
            p["rounds"] = lg.rounds;
            p["scammerSwapInvolved"] = lg.scammer_swap_involved;
            if (lg.advance_fee) {
                p["advanceFee"] = {{"address", lg.advance_fee->first.render()},
                                   {"fraction", lg.advance_fee->second}};
            }
            if (!lg.collusion.empty()) {
                nlohmann::ordered_json c;
                for (const auto& [pattern, addrs] : lg.collusion) {
                    auto arr = nlohmann::ordered_json::array();
                    for (const auto& a : addrs) arr.push_back(a.render());
                    c[pattern] = arr;
                }
                p["collusion"] = c;
            }
            j["pools"].push_back(p);
            total += lg.profit_usd;
        }
        j["totalProfitUsd"] = total;
        std::ofstream out(dir / "truth_ledger.json", std::ios::trunc);
        out << j.dump(2) << '\n';
    }
}

std::vector<TruthRow> load_truth_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string(), 0, "file");
    std::vector<TruthRow> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "address,kind,rule")
                throw IngestError("bad truth header", 1, "header");
            continue;
        }
        auto f = csv_split(line);
        if (f.size() != 3) throw IngestError("expected 3 fields", line_no, "row");
        out.push_back({AccountAddress::parse(f[0]), f[1], f[2]});
    }
    return out;
}

void audit_market(const GeneratedMarket& market) {
    auto fail = [](const std::string& msg) { throw std::logic_error("market audit: " + msg); };

    std::set<AccountAddress> truth_by_kind[2];  // 0: any scam role, 1: victims
    std::set<AccountAddress> collusion_truth;
    for (const auto& r : market.truth) {
        if (r.kind == "Victim") truth_by_kind[1].insert(r.address);
        else truth_by_kind[0].insert(r.address);
        if (r.kind == "CollusionAddress") collusion_truth.insert(r.address);
    }

    std::set<AccountAddress> valuable;
    valuable.insert(AccountAddress::eth_sentinel());
    for (const auto& e : market.official)
        if (e.symbol == "weth" || e.symbol == "usdt" || e.symbol == "usdc" || e.symbol == "dai")
            valuable.insert(e.address);

    std::set<AccountAddress> script_roles;
    for (const auto& s : market.scripts) {
        for (const auto& a : s.scammer_addresses) script_roles.insert(a);
        script_roles.insert(s.token);
        script_roles.insert(s.pool);
        if (!market.store.tokens.count(s.token)) fail("script token missing from registry");
        if (!market.store.pools.count(s.pool)) fail("script pool missing from registry");
    }
    for (const auto& lg : market.ledger) {
        for (const auto& [pattern, addrs] : lg.collusion) {
            for (const auto& a : addrs) {
                if (!collusion_truth.count(a))
                    fail("collusion address lacks a truth row: " + a.render());
                auto it = market.store.events_by_pool.find(lg.pool);
                bool acted = false;
                if (it != market.store.events_by_pool.end())
                    for (size_t idx : it->second)
                        if (market.store.events[idx].initiator == a) {
                            acted = true;
                            break;
                        }
                if (!acted)
                    fail("planted collusion address never acted on its pool: " + a.render());
            }
        }
    }
    for (const auto& s : market.scripts) {
        if (!truth_by_kind[0].count(s.token)) fail("scam token lacks truth row");
        if (!truth_by_kind[0].count(s.pool)) fail("scam pool lacks truth row");
    }

    // Victims must stay clear of scam roles and of valuable-token money flow
    // with them.
    for (const auto& v : truth_by_kind[1])
        if (script_roles.count(v)) fail("address is both victim and scam role: " + v.render());
    for (const auto& t : market.store.transfers) {
        if (!valuable.count(t.token)) continue;
        bool from_scam = script_roles.count(t.from) > 0;
        bool to_scam = script_roles.count(t.to) > 0;
        bool from_victim = truth_by_kind[1].count(t.from) > 0;
        bool to_victim = truth_by_kind[1].count(t.to) > 0;
        if ((from_scam && to_victim) || (from_victim && to_scam))
            fail("valuable transfer links a victim with a scam role: " + t.tx_hash.render());
    }

    auto discrepancies = validate_replay(market.store);
    if (!discrepancies.empty())
        fail("replay found " + std::to_string(discrepancies.size()) + " discrepancies; first: " +
             discrepancies.front().detail);
}

}  // namespace scamradar
