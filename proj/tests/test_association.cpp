#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scamradar/association.hpp"
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

TokenAmount units(uint64_t w, int dec = 18) {
    return TokenAmount(Uint256(w) * 1000000000000000000ULL, dec);
}

// Small hand-built market for targeted label tests.
struct Fixture {
    DataStore store;
    std::vector<OfficialEntry> official;
    AccountAddress weth = addr(0xaaa);
    int next_tx = 1;

    Fixture() {
        add_token(weth, "Wrapped Ether", "WETH", addr(0xdead));
        official.push_back({weth, "wrapped ether", "weth"});
        store.prices.usd[AccountAddress::eth_sentinel()] = 600;
        store.prices.usd[weth] = 600;
    }

    void add_token(const AccountAddress& a, const std::string& name, const std::string& symbol,
                   const AccountAddress& creator) {
        TokenInfo t;
        t.address = a;
        t.name = name;
        t.symbol = symbol;
        t.decimals = 18;
        t.creator = creator;
        store.tokens.emplace(a, t);
    }

    void add_pool(const AccountAddress& pool, AccountAddress x, AccountAddress y,
                  const AccountAddress& creator) {
        if (y < x) std::swap(x, y);
        PoolInfo p;
        p.address = pool;
        p.token0 = x;
        p.token1 = y;
        p.creator = creator;
        store.pools.emplace(pool, p);
    }

    void add_event(const AccountAddress& pool, EventKind kind, int64_t ts,
                   const AccountAddress& who, const TokenAmount& a0in, const TokenAmount& a1in,
                   const TokenAmount& a0out, const TokenAmount& a1out, const TokenAmount& lp) {
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

    void add_transfer(const AccountAddress& token, int64_t ts, const AccountAddress& from,
                      const AccountAddress& to, const TokenAmount& amount) {
        TransferRecord t;
        t.tx_hash = tx(next_tx++);
        t.log_index = 0;
        t.timestamp = ts;
        t.token = token;
        t.from = from;
        t.to = to;
        t.amount = amount;
        store.transfers.push_back(t);
    }

    void done() { store.sort_and_index(); }
};

}  // namespace

TEST_CASE("name matching seeds scams but never the official itself") {
    Fixture f;
    f.add_token(addr(0x100), "Tether USD", "USDT", addr(0x1));
    f.add_token(addr(0x101), "Tether USD", "USDx", addr(0x2));  // name clone
    f.add_token(addr(0x102), "Other", "USDT", addr(0x3));       // symbol clone
    f.add_token(addr(0x103), "Benign", "BNG", addr(0x4));
    f.official.push_back({addr(0x100), "tether usd", "usdt"});
    f.done();

    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    CHECK(labels.has(addr(0x100), LabelKind::OfficialToken));
    CHECK_FALSE(labels.has(addr(0x100), LabelKind::ScamToken));
    CHECK(labels.has(addr(0x101), LabelKind::ScamToken));
    CHECK(labels.has(addr(0x102), LabelKind::ScamToken));
    CHECK_FALSE(labels.has(addr(0x103), LabelKind::ScamToken));
    CHECK(labels.find(addr(0x101), LabelKind::ScamToken)->provenance == Provenance::NameMatch);
}

TEST_CASE("planted name clones yield exactly one NameMatch label each") {
    ScenarioConfig cfg;
    cfg.seed = 67;
    cfg.benign_tokens = 30;
    cfg.campaigns = {40, 0, 0, 0, 0};
    cfg.official_activity_mean = 5;
    cfg.user_population = 60;
    cfg.name_clone_fraction = 1.0;
    cfg.shared_fake_name_fraction = 0.0;
    cfg.brand_name_fraction = 0.0;
    auto market = generate_market(cfg);

    LabelStore labels = seed_ground_truth(market.store, market.official, market.user_labels);
    int name_matches = 0;
    for (const auto& l : labels.all())
        if (l.kind == LabelKind::ScamToken && l.provenance == Provenance::NameMatch)
            ++name_matches;
    CHECK(name_matches == 40);
}

TEST_CASE("expansion walks creator chains to a fixed point") {
    Fixture f;
    // Creator C1 made seeded token A and unlabeled token B.
    // B's pool is first-minted by C2, who also created token D.
    f.add_token(addr(0x200), "Wrapped Ether", "WEx", addr(0x21));  // seed via name
    f.add_token(addr(0x201), "unseen one", "U1", addr(0x21));
    f.add_token(addr(0x202), "unseen two", "U2", addr(0x22));
    f.add_pool(addr(0x300), addr(0x201), f.weth, addr(0x22));  // first mintor: 0x22
    f.done();

    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    int added = expand_guilt(f.store, labels);
    CHECK(added > 0);
    CHECK(labels.has(addr(0x21), LabelKind::ScamTokenCreator));
    CHECK(labels.has(addr(0x201), LabelKind::ScamToken));  // sibling of the seed
    CHECK(labels.has(addr(0x300), LabelKind::ScamPool));
    CHECK(labels.has(addr(0x22), LabelKind::ScamPoolCreator));
    CHECK(labels.has(addr(0x202), LabelKind::ScamToken));  // reached in generation 2

    // Re-running changes nothing.
    CHECK(expand_guilt(f.store, labels) == 0);
}

TEST_CASE("excluded deployers do not propagate guilt") {
    Fixture f;
    f.add_token(addr(0x210), "Wrapped Ether", "WEy", addr(0x25));  // seed, creator excluded
    for (int i = 0; i < 50; ++i)
        f.add_token(addr(0x400 + i), "client token " + std::to_string(i), "CT" + std::to_string(i),
                    addr(0x25));
    f.done();

    Label excluded;
    excluded.subject = addr(0x25);
    excluded.kind = LabelKind::ContractDeployerExcluded;
    excluded.provenance = Provenance::UserSupplied;
    LabelStore labels = seed_ground_truth(f.store, f.official, {excluded});
    expand_guilt(f.store, labels);

    CHECK(labels.has(addr(0x210), LabelKind::ScamToken));  // the seed stays
    CHECK_FALSE(labels.has(addr(0x25), LabelKind::ScamTokenCreator));
    for (int i = 0; i < 50; ++i) CHECK_FALSE(labels.has(addr(0x400 + i), LabelKind::ScamToken));
}

TEST_CASE("official tokens are never flagged through their creator") {
    Fixture f;
    // The same address "created" WETH and a seeded scam; WETH must stay clean.
    f.add_token(addr(0x220), "Wrapped Ether", "WEz", addr(0xdead));
    f.done();
    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    expand_guilt(f.store, labels);
    CHECK(labels.has(addr(0x220), LabelKind::ScamToken));
    CHECK(labels.has(addr(0xdead), LabelKind::ScamTokenCreator));
    CHECK_FALSE(labels.has(f.weth, LabelKind::ScamToken));
}

TEST_CASE("verification accepts identical-name groups and brand keywords") {
    Fixture f;
    for (int i = 0; i < 12; ++i)
        f.add_token(addr(0x500 + i), "bore.finance", "BORE", addr(0x30 + i));
    f.add_token(addr(0x520), "TikTok Coin", "TTC", addr(0x60));
    f.add_token(addr(0x521), "solitary name", "SOL1", addr(0x61));
    f.done();

    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    std::set<AccountAddress> flagged;
    for (int i = 0; i < 12; ++i) flagged.insert(addr(0x500 + i));
    flagged.insert(addr(0x520));
    flagged.insert(addr(0x521));

    auto result = verify_flagged(f.store, labels, flagged, {"tiktok", "google"});
    for (int i = 0; i < 12; ++i) CHECK(result.verified.count(addr(0x500 + i)));
    CHECK(result.verified.count(addr(0x520)));  // brand keyword
    CHECK(result.unverified.count(addr(0x521)));
    CHECK(result.verified.size() + result.unverified.size() == flagged.size());
    CHECK(labels.find(addr(0x500), LabelKind::ScamToken)->provenance == Provenance::Verified);
    CHECK_FALSE(labels.has(addr(0x521), LabelKind::ScamToken));
}

namespace {

// Scam pool with a creator, one victim, and two collusion addresses forming a
// two-hop chain. Token side order on the pool depends on addresses: token
// 0x600 < weth 0xaaa, so the scam token is side 0.
struct CollusionFixture : Fixture {
    AccountAddress token = addr(0x600);
    AccountAddress pool = addr(0x601);
    AccountAddress creator = addr(0x602);
    AccountAddress victim = addr(0x603);
    AccountAddress hop1 = addr(0x604);
    AccountAddress hop2 = addr(0x605);

    CollusionFixture() {
        add_token(token, "Wrapped Ether", "FAKE", creator);  // seeded by name
        add_pool(pool, token, weth, creator);
        // Creator mints; victim buys; hop1 buys (funded before); hop2 buys
        // (funded by hop1 before); creator drains.
        add_event(pool, EventKind::Mint, 1000, creator, units(500000), units(70), units(0),
                  units(0), units(5916));
        add_event(pool, EventKind::Swap, 1100, victim, units(0), units(2), units(1000), units(0),
                  units(0));
        add_transfer(weth, 1150, creator, hop1, units(5));
        add_event(pool, EventKind::Swap, 1200, hop1, units(0), units(5), units(2400), units(0),
                  units(0));
        add_transfer(weth, 1250, hop1, hop2, units(3));
        add_event(pool, EventKind::Swap, 1300, hop2, units(0), units(3), units(1400), units(0),
                  units(0));
        add_event(pool, EventKind::Burn, 2000, creator, units(0), units(0), units(495200),
                  units(78), units(5916));
        done();
    }

    LabelStore seeded() {
        LabelStore labels = seed_ground_truth(store, official, {});
        expand_guilt(store, labels);
        return labels;
    }
};

}  // namespace

TEST_CASE("two-hop collusion chains need a second iteration and converge") {
    CollusionFixture f;
    LabelStore labels = f.seeded();
    REQUIRE(labels.has(f.pool, LabelKind::ScamPool));

    auto valuable = valuable_from_officials(f.official);
    int added = detect_collusion_pool(f.store, labels, f.pool, valuable);
    CHECK(added == 2);
    CHECK(labels.has(f.hop1, LabelKind::CollusionAddress));
    CHECK(labels.has(f.hop2, LabelKind::CollusionAddress));
    CHECK(labels.find(f.hop1, LabelKind::CollusionAddress)->provenance ==
          Provenance::CollusionRule3);
    CHECK(labels.find(f.hop2, LabelKind::CollusionAddress)->provenance ==
          Provenance::CollusionRule3);
    CHECK_FALSE(labels.has(f.victim, LabelKind::CollusionAddress));

    // Idempotent once at the fixed point.
    CHECK(detect_collusion_pool(f.store, labels, f.pool, valuable) == 0);
}

TEST_CASE("collusion detection requires the ScamPool precondition") {
    CollusionFixture f;
    LabelStore empty;
    CHECK_THROWS_AS(
        detect_collusion_pool(f.store, empty, f.pool, valuable_from_officials(f.official)),
        PreconditionError);
}

TEST_CASE("sell-then-remit triggers rule 4 (the 750-token shape)") {
    Fixture f;
    AccountAddress token = addr(0x700), pool = addr(0x701), creator = addr(0x702),
                   shill = addr(0x703);
    f.add_token(token, "Wrapped Ether", "SCRTish", creator);
    f.add_pool(pool, token, f.weth, creator);
    f.add_event(pool, EventKind::Mint, 1000, creator, units(10000), units(50), units(0), units(0),
                units(707));
    // Creator hands the shill 750 scam tokens; the shill dumps them later and
    // remits the proceeds.
    f.add_transfer(token, 1100, creator, shill, units(750));
    f.add_event(pool, EventKind::Swap, 1200, shill, units(750), units(0), units(0), units(3),
                units(0));
    f.add_transfer(f.weth, 1300, shill, creator, units(3));
    f.done();

    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    expand_guilt(f.store, labels);
    auto valuable = valuable_from_officials(f.official);
    detect_collusion_pool(f.store, labels, pool, valuable);
    REQUIRE(labels.has(shill, LabelKind::CollusionAddress));
    CHECK(labels.find(shill, LabelKind::CollusionAddress)->provenance ==
          Provenance::CollusionRule4);
}

TEST_CASE("a victim with no money-flow edge is never flagged") {
    Fixture f;
    AccountAddress token = addr(0x710), pool = addr(0x711), creator = addr(0x712),
                   victim = addr(0x713);
    f.add_token(token, "Wrapped Ether", "VFK", creator);
    f.add_pool(pool, token, f.weth, creator);
    f.add_event(pool, EventKind::Mint, 1000, creator, units(10000), units(50), units(0), units(0),
                units(707));
    f.add_event(pool, EventKind::Swap, 1200, victim, units(0), units(4), units(700), units(0),
                units(0));
    // The victim even *sells* later (panic exit) without any transfer link.
    f.add_event(pool, EventKind::Swap, 1400, victim, units(300), units(0), units(0), units(1),
                units(0));
    f.done();

    LabelStore labels = seed_ground_truth(f.store, f.official, {});
    expand_guilt(f.store, labels);
    detect_collusion_pool(f.store, labels, pool, valuable_from_officials(f.official));
    CHECK_FALSE(labels.has(victim, LabelKind::CollusionAddress));
}

TEST_CASE("full pipeline recovers all planted collusion addresses, zero victims") {
    ScenarioConfig cfg;
    cfg.seed = 61;
    cfg.benign_tokens = 10;
    cfg.campaigns = {4, 2, 1, 6, 1};
    cfg.official_activity_mean = 8;
    cfg.user_population = 60;
    // Seed every scam via name clones so the collusion stage runs on every pool
    // without the ML stage.
    cfg.name_clone_fraction = 1.0;
    cfg.shared_fake_name_fraction = 0.0;
    cfg.brand_name_fraction = 0.0;
    auto market = generate_market(cfg);

    LabelStore labels = seed_ground_truth(market.store, market.official, market.user_labels);
    expand_guilt(market.store, labels);
    auto valuable = valuable_from_officials(market.official);
    detect_collusion(market.store, labels, valuable, /*jobs=*/3);

    std::set<AccountAddress> planted, victims;
    for (const auto& row : market.truth) {
        if (row.kind == "CollusionAddress") planted.insert(row.address);
        if (row.kind == "Victim") victims.insert(row.address);
    }
    REQUIRE(!planted.empty());
    for (const auto& a : planted) {
        INFO("planted collusion address ", a.render());
        CHECK(labels.has(a, LabelKind::CollusionAddress));
    }
    for (const auto& v : victims) {
        CHECK_FALSE(labels.has(v, LabelKind::CollusionAddress));
        CHECK_FALSE(labels.has(v, LabelKind::ScamTokenCreator));
        CHECK_FALSE(labels.has(v, LabelKind::ScamPoolCreator));
    }
}

TEST_CASE("derived labels chain back to ground truth") {
    CollusionFixture f;
    LabelStore labels = f.seeded();
    detect_collusion_pool(f.store, labels, f.pool, valuable_from_officials(f.official));

    for (const auto& l : labels.all()) {
        if (l.provenance == Provenance::GroundTruth || l.provenance == Provenance::UserSupplied ||
            l.provenance == Provenance::Verified)
            continue;
        // Follow via-links until a root label.
        AccountAddress at = l.subject;
        std::optional<AccountAddress> via = l.via;
        int steps = 0;
        bool rooted = false;
        while (via && steps++ < 32) {
            at = *via;
            via.reset();
            bool at_root = false;
            for (const auto& parent : labels.for_subject(at)) {
                if (parent.provenance == Provenance::GroundTruth ||
                    parent.provenance == Provenance::UserSupplied ||
                    parent.provenance == Provenance::Verified) {
                    at_root = true;
                    break;
                }
                if (parent.via && !via) via = parent.via;
            }
            if (at_root) {
                rooted = true;
                break;
            }
        }
        INFO("label on ", l.subject.render(), " provenance ", to_string(l.provenance));
        CHECK(rooted);
    }
}
