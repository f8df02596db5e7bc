#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scamradar/impact.hpp"
#include "scamradar/scenario.hpp"

using namespace scamradar;

namespace {

AccountAddress addr(int n) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "0x%040x", n);
    return AccountAddress::parse(buf);
}

TxHash tx(int n) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "0x%064x", n);
    return TxHash::parse(buf);
}

TokenAmount units(uint64_t w) { return TokenAmount(Uint256(w) * 1000000000000000000ULL, 18); }
TokenAmount deci_units(uint64_t tenths) {
    return TokenAmount(Uint256(tenths) * 100000000000000000ULL, 18);
}

struct Fixture {
    DataStore store;
    std::vector<OfficialEntry> official;
    AccountAddress weth = addr(0xaaa);
    AccountAddress token = addr(0x600);
    AccountAddress pool = addr(0x601);
    AccountAddress scammer = addr(0x602);
    int next_tx = 1;

    Fixture() {
        TokenInfo w;
        w.address = weth;
        w.name = "Wrapped Ether";
        w.symbol = "WETH";
        w.decimals = 18;
        w.creator = addr(0xdead);
        store.tokens.emplace(weth, w);
        TokenInfo t = w;
        t.address = token;
        t.name = "Wrapped Ether";  // clone: seeds the scam label
        t.symbol = "FAKE";
        t.creator = scammer;
        store.tokens.emplace(token, t);
        PoolInfo p;
        p.address = pool;
        p.token0 = token;  // 0x600 < 0xaaa
        p.token1 = weth;
        p.creator = scammer;
        store.pools.emplace(pool, p);
        official.push_back({weth, "wrapped ether", "weth"});
        store.prices.usd[AccountAddress::eth_sentinel()] = 600;
        store.prices.usd[weth] = 600;
    }

    void add_event(EventKind kind, int64_t ts, const AccountAddress& who, TokenAmount a0in,
                   TokenAmount a1in, TokenAmount a0out, TokenAmount a1out, TokenAmount lp) {
        PoolEvent e;
        e.tx_hash = tx(next_tx++);
        e.log_index = 0;
        e.timestamp = ts;
        e.pool = pool;
        e.kind = kind;
        e.initiator = who;
        e.amount0_in = a0in;
        e.amount1_in = a1in;
        e.amount0_out = a0out;
        e.amount1_out = a1out;
        e.lp_delta = lp;
        store.events.push_back(e);
    }

    void add_transfer(const AccountAddress& tok, int64_t ts, const AccountAddress& from,
                      const AccountAddress& to, TokenAmount amount, std::optional<TxHash> same_tx,
                      int32_t log_index) {
        TransferRecord t;
        t.tx_hash = same_tx ? *same_tx : tx(next_tx++);
        t.log_index = log_index;
        t.timestamp = ts;
        t.token = tok;
        t.from = from;
        t.to = to;
        t.amount = amount;
        store.transfers.push_back(t);
    }

    LabelStore seeded() {
        store.sort_and_index();
        LabelStore labels = seed_ground_truth(store, official, {});
        expand_guilt(store, labels);
        return labels;
    }
};

}  // namespace

TEST_CASE("one mint, one full burn 20 minutes later: interval 1200, one round") {
    Fixture f;
    f.add_event(EventKind::Mint, 10000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    f.add_event(EventKind::Swap, 10500, addr(0x900), units(0), units(2), units(14000), units(0),
                units(0));
    f.add_event(EventKind::Burn, 11200, f.scammer, units(0), units(0), units(486000), units(72),
                units(5916));
    LabelStore labels = f.seeded();

    auto profile = profile_rug(f.store, labels, f.pool);
    CHECK(profile.complete);
    CHECK(profile.rug_interval_seconds == 1200);
    CHECK(profile.rounds == 1);
    CHECK_FALSE(profile.scammer_swap_involved);
    CHECK_FALSE(profile.advance_fee.has_value());
}

TEST_CASE("re-adding liquidity after a drain counts a second round") {
    Fixture f;
    // First cycle: 30 minutes. Second: re-mint 4 minutes later, drain 6h on.
    f.add_event(EventKind::Mint, 100000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    f.add_event(EventKind::Burn, 101800, f.scammer, units(0), units(0), units(500000), units(70),
                units(5916));
    f.add_event(EventKind::Mint, 102040, f.scammer, units(250000), units(35), units(0), units(0),
                units(2958));
    f.add_event(EventKind::Burn, 123640, f.scammer, units(0), units(0), units(250000), units(35),
                units(2958));
    LabelStore labels = f.seeded();

    auto profile = profile_rug(f.store, labels, f.pool);
    CHECK(profile.rounds == 2);
    CHECK(profile.rug_interval_seconds == 1800);  // first cycle sets the clock
}

TEST_CASE("partial burns below the drain fraction do not close a cycle") {
    Fixture f;
    f.add_event(EventKind::Mint, 1000, f.scammer, units(100000), units(50), units(0), units(0),
                units(2236));
    f.add_event(EventKind::Burn, 2000, f.scammer, units(0), units(0), units(10000), units(5),
                units(223));  // 10%: rebalancing, not a drain
    f.add_event(EventKind::Burn, 9000, f.scammer, units(0), units(0), units(90000), units(45),
                units(2013));  // drains the rest
    LabelStore labels = f.seeded();
    auto profile = profile_rug(f.store, labels, f.pool);
    CHECK(profile.rounds == 1);
    CHECK(profile.rug_interval_seconds == 8000);
}

TEST_CASE("a scam pool without a scam mint yields an incomplete profile, not an error") {
    Fixture f;
    // Only a victim ever touched the pool; the label came from elsewhere.
    f.add_event(EventKind::Mint, 1000, addr(0x900), units(1000), units(1), units(0), units(0),
                units(31));
    LabelStore labels = f.seeded();
    REQUIRE(labels.has(f.pool, LabelKind::ScamPool));
    auto profile = profile_rug(f.store, labels, f.pool);
    CHECK_FALSE(profile.complete);
    CHECK(profile.rug_interval_seconds == -1);
    CHECK(profile.rounds == 0);
}

TEST_CASE("profiling an unlabeled pool is a precondition error") {
    Fixture f;
    f.add_event(EventKind::Mint, 1000, f.scammer, units(1000), units(1), units(0), units(0),
                units(31));
    f.store.sort_and_index();
    LabelStore empty;
    CHECK_THROWS_AS(profile_rug(f.store, empty, f.pool), PreconditionError);
    CHECK_THROWS_AS(compute_profit(f.store, empty, f.pool, {}), PreconditionError);
}

TEST_CASE("advance fee: consistent companion fraction found, inconsistent rejected") {
    Fixture f;
    AccountAddress fee_addr = addr(0x777);
    f.add_event(EventKind::Mint, 1000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    for (int i = 0; i < 10; ++i) {
        AccountAddress victim = addr(0x900 + i);
        TxHash t = tx(5000 + i);
        int64_t ts = 2000 + i * 10;
        TokenAmount out = units(1000 + 13 * i);
        f.add_event(EventKind::Swap, ts, victim, units(0), units(1), out, units(0), units(0));
        // Main leg plus a 5% companion in the same transaction.
        f.store.events.back().tx_hash = t;
        f.add_transfer(f.token, ts, f.pool, victim, out, t, 1);
        TokenAmount fee(
            (Uint512(out.units()) * 5 / 100).convert_to<Uint256>(), 18);
        f.add_transfer(f.token, ts, victim, fee_addr, fee, t, 2);
    }
    f.store.sort_and_index();

    auto finding = detect_advance_fee(f.store, f.token);
    REQUIRE(finding.has_value());
    CHECK(finding->fee_address == fee_addr);
    CHECK(finding->fraction == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(finding->occurrences == 10);

    CHECK_FALSE(detect_advance_fee(f.store, f.weth).has_value());  // no companions at all

    // Alternating 5%/7% to one address fails the consistency rule.
    Fixture g;
    g.add_event(EventKind::Mint, 1000, g.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    for (int i = 0; i < 10; ++i) {
        AccountAddress victim = addr(0x900 + i);
        TxHash t = tx(6000 + i);
        int64_t ts = 2000 + i * 10;
        TokenAmount out = units(1000);
        g.add_event(EventKind::Swap, ts, victim, units(0), units(1), out, units(0), units(0));
        g.store.events.back().tx_hash = t;
        g.add_transfer(g.token, ts, g.pool, victim, out, t, 1);
        int pct = i % 2 ? 5 : 7;
        TokenAmount fee((Uint512(out.units()) * pct / 100).convert_to<Uint256>(), 18);
        g.add_transfer(g.token, ts, victim, fee_addr, fee, t, 2);
    }
    g.store.sort_and_index();
    CHECK_FALSE(detect_advance_fee(g.store, g.token).has_value());
}

TEST_CASE("profit: the 70-in, 161.7-out shape grosses 91.7 valuable units") {
    Fixture f;
    f.add_event(EventKind::Mint, 1000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    // Victims push 95 WETH in across a few buys.
    for (int i = 0; i < 5; ++i)
        f.add_event(EventKind::Swap, 1100 + i, addr(0x900 + i), units(0), units(19), units(60000),
                    units(0), units(0));
    f.add_event(EventKind::Burn, 2200, f.scammer, units(0), units(0), units(200000),
                deci_units(1617), units(5916));
    LabelStore labels = f.seeded();

    auto valuable = valuable_from_officials(f.official);
    auto profit = compute_profit(f.store, labels, f.pool, valuable);
    CHECK(profit.gross_profit_usd == doctest::Approx((161.7 - 70.0) * 600).epsilon(1e-9));
    CHECK(profit.profit_usd == doctest::Approx(profit.gross_profit_usd).epsilon(1e-12));
    CHECK(profit.victim_count == 5);

    // With a scammer pump swap the net drops below gross.
    Fixture g;
    g.add_event(EventKind::Mint, 1000, g.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    g.add_event(EventKind::Swap, 1500, g.scammer, units(0), units(10), units(50000), units(0),
                units(0));
    g.add_event(EventKind::Burn, 2200, g.scammer, units(0), units(0), units(450000),
                deci_units(1617), units(5916));
    LabelStore glabels = g.seeded();
    auto gp = compute_profit(g.store, glabels, g.pool, valuable);
    CHECK(gp.profit_usd == doctest::Approx(gp.gross_profit_usd - 10 * 600).epsilon(1e-9));
    CHECK(gp.victim_count == 0);
}

TEST_CASE("a failed scam (deposit only) has non-positive profit") {
    Fixture f;
    f.add_event(EventKind::Mint, 1000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    LabelStore labels = f.seeded();
    auto profit = compute_profit(f.store, labels, f.pool, valuable_from_officials(f.official));
    CHECK(profit.profit_usd <= 0);
}

TEST_CASE("missing price for the valuable side raises MissingPrice") {
    Fixture f;
    f.add_event(EventKind::Mint, 1000, f.scammer, units(500000), units(70), units(0), units(0),
                units(5916));
    f.store.prices.usd.erase(f.weth);
    LabelStore labels = f.seeded();
    CHECK_THROWS_AS(compute_profit(f.store, labels, f.pool, valuable_from_officials(f.official)),
                    MissingPrice);
}

TEST_CASE("victims plus scam addresses partition the pool's participants") {
    ScenarioConfig cfg;
    cfg.seed = 71;
    cfg.benign_tokens = 5;
    cfg.campaigns = {3, 1, 1, 2, 1};
    cfg.official_activity_mean = 5;
    cfg.user_population = 40;
    cfg.name_clone_fraction = 1.0;
    cfg.shared_fake_name_fraction = 0.0;
    cfg.brand_name_fraction = 0.0;
    auto market = generate_market(cfg);
    LabelStore labels = seed_ground_truth(market.store, market.official, market.user_labels);
    expand_guilt(market.store, labels);
    auto valuable = valuable_from_officials(market.official);
    detect_collusion(market.store, labels, valuable);

    std::set<AccountAddress> scam;
    for (auto kind : {LabelKind::ScamTokenCreator, LabelKind::ScamPoolCreator,
                      LabelKind::CollusionAddress})
        for (const auto& a : labels.subjects_with(kind)) scam.insert(a);

    for (const auto& pool : labels.subjects_with(LabelKind::ScamPool)) {
        auto profit = compute_profit(market.store, labels, pool, valuable);
        std::set<AccountAddress> participants, scam_on_pool;
        for (size_t idx : market.store.events_by_pool.at(pool)) {
            const auto& who = market.store.events[idx].initiator;
            participants.insert(who);
            if (scam.count(who)) scam_on_pool.insert(who);
        }
        CHECK(profit.victim_count + static_cast<int>(scam_on_pool.size()) ==
              static_cast<int>(participants.size()));
    }
}

TEST_CASE("detector profit agrees with the generator ledger") {
    ScenarioConfig cfg;
    cfg.seed = 72;
    cfg.benign_tokens = 5;
    cfg.campaigns = {4, 2, 1, 2, 1};
    cfg.official_activity_mean = 5;
    cfg.user_population = 50;
    cfg.name_clone_fraction = 1.0;
    cfg.shared_fake_name_fraction = 0.0;
    cfg.brand_name_fraction = 0.0;
    auto market = generate_market(cfg);
    LabelStore labels = seed_ground_truth(market.store, market.official, market.user_labels);
    expand_guilt(market.store, labels);
    auto valuable = valuable_from_officials(market.official);
    detect_collusion(market.store, labels, valuable);

    for (const auto& lg : market.ledger) {
        auto profit = compute_profit(market.store, labels, lg.pool, valuable);
        INFO("pool ", lg.pool.render());
        CHECK(profit.profit_usd ==
              doctest::Approx(lg.profit_usd).epsilon(1e-3));  // the 0.1% gate
        CHECK(profit.victim_count == lg.victim_count);
        auto profile = profile_rug(market.store, labels, lg.pool);
        CHECK(profile.rug_interval_seconds == lg.rug_interval_s);
        CHECK(profile.rounds == lg.rounds);
        CHECK(profile.scammer_swap_involved == lg.scammer_swap_involved);
    }
}

TEST_CASE("conservation holds exactly on generated pools") {
    ScenarioConfig cfg;
    cfg.seed = 73;
    cfg.benign_tokens = 6;
    cfg.campaigns = {3, 1, 1, 1, 1};
    cfg.official_activity_mean = 6;
    cfg.user_population = 40;
    auto market = generate_market(cfg);
    CHECK(check_conservation(market.store).empty());

    // Tamper with one burn and the pool must surface.
    DataStore bad = market.store;
    for (auto& e : bad.events)
        if (e.kind == EventKind::Burn) {
            e.amount1_out = e.amount1_out.add(TokenAmount(Uint256(5), e.amount1_out.decimals()));
            break;
        }
    bad.sort_and_index();
    CHECK(!check_conservation(bad).empty());
}

TEST_CASE("market stats on empty, single-pool, and generated stores") {
    DataStore empty;
    empty.sort_and_index();
    auto s0 = market_stats(empty);
    CHECK(s0.events == 0);
    CHECK(s0.top1pct_event_share == 0.0);

    Fixture single;
    single.add_event(EventKind::Mint, 1000, single.scammer, units(10), units(10), units(0),
                     units(0), units(10));
    single.add_event(EventKind::Swap, 1100, addr(0x901), units(0), units(1), units(1), units(0),
                     units(0));
    single.store.sort_and_index();
    auto s1 = market_stats(single.store);
    CHECK(s1.top1pct_event_share == doctest::Approx(1.0));  // only pool holds it all

    ScenarioConfig cfg;
    cfg.seed = 74;
    cfg.benign_tokens = 12;
    cfg.campaigns = {4, 1, 1, 1, 1};
    cfg.official_activity_mean = 20;
    cfg.user_population = 50;
    auto market = generate_market(cfg);
    auto stats = market_stats(market.store);
    CHECK(stats.events == static_cast<int64_t>(market.store.events.size()));

    // Independent sort-and-sum check of the top-share figure.
    std::vector<int64_t> counts;
    for (const auto& [pool, indices] : market.store.events_by_pool)
        counts.push_back(static_cast<int64_t>(indices.size()));
    std::sort(counts.begin(), counts.end(), std::greater<>());
    size_t k = std::max<size_t>(1, static_cast<size_t>(std::ceil(counts.size() * 0.01)));
    int64_t top = 0, total = 0;
    for (size_t i = 0; i < counts.size(); ++i) {
        total += counts[i];
        if (i < k) top += counts[i];
    }
    CHECK(stats.top1pct_event_share ==
          doctest::Approx(static_cast<double>(top) / static_cast<double>(total)));
    int64_t daily_total = 0;
    for (const auto& [day, n] : stats.daily_events) daily_total += n;
    CHECK(daily_total == stats.events);
}
