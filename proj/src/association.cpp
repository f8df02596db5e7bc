#include "scamradar/association.hpp"

#include <algorithm>
#include <fstream>

#include "scamradar/util.hpp"

namespace scamradar {

bool LabelStore::add(Label label) {
    auto key = std::make_pair(label.subject, label.kind);
    return rows_.emplace(key, std::move(label)).second;
}

bool LabelStore::has(const AccountAddress& subject, LabelKind kind) const {
    return rows_.count({subject, kind}) > 0;
}

const Label* LabelStore::find(const AccountAddress& subject, LabelKind kind) const {
    auto it = rows_.find({subject, kind});
    return it == rows_.end() ? nullptr : &it->second;
}

std::vector<Label> LabelStore::for_subject(const AccountAddress& subject) const {
    std::vector<Label> out;
    for (auto it = rows_.lower_bound({subject, LabelKind::OfficialToken});
         it != rows_.end() && it->first.first == subject; ++it)
        out.push_back(it->second);
    return out;
}

std::set<AccountAddress> LabelStore::subjects_with(LabelKind kind) const {
    std::set<AccountAddress> out;
    for (const auto& [key, label] : rows_)
        if (key.second == kind) out.insert(key.first);
    return out;
}

std::vector<Label> LabelStore::all() const {
    std::vector<Label> out;
    out.reserve(rows_.size());
    for (const auto& [key, label] : rows_) out.push_back(label);
    return out;
}

std::set<AccountAddress> valuable_from_officials(const std::vector<OfficialEntry>& official) {
    std::set<AccountAddress> out{AccountAddress::eth_sentinel()};
    for (const auto& e : official)
        if (e.symbol == "weth" || e.symbol == "usdt" || e.symbol == "usdc" || e.symbol == "dai")
            out.insert(e.address);
    return out;
}

LabelStore seed_ground_truth(const DataStore& store, const std::vector<OfficialEntry>& official,
                             const std::vector<Label>& user_labels) {
    LabelStore labels;
    for (const auto& l : user_labels) labels.add(l);

    std::map<std::string, AccountAddress> by_name, by_symbol;
    for (const auto& e : official) {
        Label l;
        l.subject = e.address;
        l.kind = LabelKind::OfficialToken;
        l.provenance = Provenance::GroundTruth;
        l.evidence = "official token list";
        labels.add(l);
        if (!e.name.empty()) by_name.emplace(e.name, e.address);
        if (!e.symbol.empty()) by_symbol.emplace(e.symbol, e.address);
    }

    for (const auto& [addr, token] : store.tokens) {
        if (labels.has(addr, LabelKind::OfficialToken)) continue;
        std::string name = normalize_name(token.name);
        std::string symbol = normalize_name(token.symbol);
        const AccountAddress* match = nullptr;
        std::string what;
        if (auto it = by_name.find(name); !name.empty() && it != by_name.end()) {
            match = &it->second;
            what = "name '" + name + "'";
        } else if (auto it2 = by_symbol.find(symbol); !symbol.empty() && it2 != by_symbol.end()) {
            match = &it2->second;
            what = "symbol '" + symbol + "'";
        }
        if (match && *match != addr) {
            Label l;
            l.subject = addr;
            l.kind = LabelKind::ScamToken;
            l.provenance = Provenance::NameMatch;
            l.via = *match;
            l.evidence = "identical " + what + " with official " + match->render();
            labels.add(l);
        }
    }
    return labels;
}

int expand_guilt(const DataStore& store, LabelStore& labels) {
    // creator -> created tokens
    std::map<AccountAddress, std::vector<AccountAddress>> created;
    for (const auto& [addr, token] : store.tokens) created[token.creator].push_back(addr);

    auto excluded = [&](const AccountAddress& a) {
        return labels.has(a, LabelKind::ContractDeployerExcluded);
    };

    int added_total = 0;
    for (;;) {
        int added = 0;
        labels.generation += 1;

        for (const auto& token : labels.subjects_with(LabelKind::ScamToken)) {
            auto tit = store.tokens.find(token);
            if (tit != store.tokens.end() && !excluded(tit->second.creator)) {
                Label l;
                l.subject = tit->second.creator;
                l.kind = LabelKind::ScamTokenCreator;
                l.provenance = Provenance::Expansion;
                l.via = token;
                l.evidence = "created scam token " + token.render();
                added += labels.add(l);
            }
            auto pit = store.pools_by_token.find(token);
            if (pit == store.pools_by_token.end()) continue;
            for (const auto& pool_addr : pit->second) {
                Label lp;
                lp.subject = pool_addr;
                lp.kind = LabelKind::ScamPool;
                lp.provenance = Provenance::Expansion;
                lp.via = token;
                lp.evidence = "pool trades scam token " + token.render();
                added += labels.add(lp);

                const PoolInfo& pool = store.pools.at(pool_addr);
                if (!excluded(pool.creator)) {
                    Label lc;
                    lc.subject = pool.creator;
                    lc.kind = LabelKind::ScamPoolCreator;
                    lc.provenance = Provenance::Expansion;
                    lc.via = pool_addr;
                    lc.evidence = "first mintor of scam pool " + pool_addr.render();
                    added += labels.add(lc);
                }
            }
        }

        for (auto kind : {LabelKind::ScamTokenCreator, LabelKind::ScamPoolCreator}) {
            for (const auto& creator : labels.subjects_with(kind)) {
                auto cit = created.find(creator);
                if (cit == created.end()) continue;
                for (const auto& token : cit->second) {
                    if (labels.has(token, LabelKind::OfficialToken)) continue;
                    Label l;
                    l.subject = token;
                    l.kind = LabelKind::ScamToken;
                    l.provenance = Provenance::Expansion;
                    l.via = creator;
                    l.evidence = "created by scam creator " + creator.render();
                    added += labels.add(l);
                }
            }
        }

        added_total += added;
        if (added == 0) break;
    }
    return added_total;
}

VerifyResult verify_flagged(const DataStore& store, LabelStore& labels,
                            const std::set<AccountAddress>& ml_flagged,
                            const std::vector<std::string>& brand_keywords, int min_group) {
    std::map<std::string, std::vector<AccountAddress>> by_name, by_symbol;
    for (const auto& t : ml_flagged) {
        auto it = store.tokens.find(t);
        if (it == store.tokens.end()) continue;
        std::string name = normalize_name(it->second.name);
        std::string symbol = normalize_name(it->second.symbol);
        if (!name.empty()) by_name[name].push_back(t);
        if (!symbol.empty()) by_symbol[symbol].push_back(t);
    }

    VerifyResult result;
    auto verify = [&](const AccountAddress& t, const std::string& evidence) {
        Label l;
        l.subject = t;
        l.kind = LabelKind::ScamToken;
        l.provenance = Provenance::Verified;
        l.evidence = evidence;
        labels.add(l);
        result.verified.insert(t);
    };

    for (const auto& [name, members] : by_name)
        if (static_cast<int>(members.size()) >= min_group)
            for (const auto& t : members)
                verify(t, "identical name group '" + name + "' of " +
                              std::to_string(members.size()) + " flagged tokens");
    for (const auto& [symbol, members] : by_symbol)
        if (static_cast<int>(members.size()) >= min_group)
            for (const auto& t : members)
                verify(t, "identical symbol group '" + symbol + "' of " +
                              std::to_string(members.size()) + " flagged tokens");

    for (const auto& t : ml_flagged) {
        if (result.verified.count(t)) continue;
        auto it = store.tokens.find(t);
        if (it == store.tokens.end()) continue;
        std::string name = normalize_name(it->second.name);
        for (const auto& kw : brand_keywords) {
            if (!kw.empty() && name.find(kw) != std::string::npos) {
                verify(t, "impersonates brand keyword '" + kw + "'");
                break;
            }
        }
    }

    for (const auto& t : ml_flagged)
        if (!result.verified.count(t)) result.unverified.insert(t);
    return result;
}

namespace {

struct CandidateActivity {
    std::vector<OrderKey> mints;
    std::vector<OrderKey> burns;
    std::vector<OrderKey> buys_scam;   // swapped valuable -> scam token
    std::vector<OrderKey> sells_scam;  // swapped scam token -> valuable
};

}  // namespace

namespace {

// Per-pool fixed point against a read-only label view; returns the labels to
// add. The caller merges them so parallel pools see one consistent snapshot.
std::vector<Label> collusion_pass_pool(const DataStore& store, const LabelStore& labels,
                                       const AccountAddress& pool,
                                       const std::set<AccountAddress>& valuable) {
    if (!labels.has(pool, LabelKind::ScamPool))
        throw PreconditionError("pool is not labeled ScamPool: " + pool.render());
    const PoolInfo& info = store.pools.at(pool);

    // Which side(s) hold the scam token decides swap direction semantics.
    bool scam0 = labels.has(info.token0, LabelKind::ScamToken);
    bool scam1 = labels.has(info.token1, LabelKind::ScamToken);

    std::set<AccountAddress> known;
    for (auto [token, is_scam] : {std::pair{info.token0, scam0}, {info.token1, scam1}}) {
        if (!is_scam) continue;
        auto tit = store.tokens.find(token);
        if (tit != store.tokens.end() && labels.has(tit->second.creator, LabelKind::ScamTokenCreator))
            known.insert(tit->second.creator);
    }
    if (labels.has(info.creator, LabelKind::ScamPoolCreator)) known.insert(info.creator);
    for (const auto& a : labels.subjects_with(LabelKind::CollusionAddress)) known.insert(a);

    auto eit = store.events_by_pool.find(pool);
    if (eit == store.events_by_pool.end()) return {};

    std::map<AccountAddress, CandidateActivity> activity;
    for (size_t idx : eit->second) {
        const PoolEvent& e = store.events[idx];
        auto& act = activity[e.initiator];
        switch (e.kind) {
            case EventKind::Mint: act.mints.push_back(e.key()); break;
            case EventKind::Burn: act.burns.push_back(e.key()); break;
            case EventKind::Swap: {
                bool scam_out = (scam0 && !e.amount0_out.is_zero()) ||
                                (scam1 && !e.amount1_out.is_zero());
                bool scam_in = (scam0 && !e.amount0_in.is_zero()) ||
                               (scam1 && !e.amount1_in.is_zero());
                if (scam_out) act.buys_scam.push_back(e.key());
                if (scam_in) act.sells_scam.push_back(e.key());
                break;
            }
        }
    }

    auto valuable_transfer = [&](const TransferRecord& t) { return valuable.count(t.token) > 0; };

    std::vector<Label> found;
    std::set<AccountAddress> found_set;
    for (;;) {
        int round_added = 0;
        for (auto& [addr, act] : activity) {
            if (known.count(addr) || addr == pool) continue;
            if (found_set.count(addr) || labels.has(addr, LabelKind::CollusionAddress)) continue;

            std::optional<Provenance> rule;
            AccountAddress via;
            TxHash evidence_tx;

            // R1: funded with valuable tokens before the first liquidity add.
            if (!act.mints.empty()) {
                OrderKey first_mint = *std::min_element(act.mints.begin(), act.mints.end());
                if (auto it = store.transfers_by_to.find(addr); it != store.transfers_by_to.end())
                    for (size_t ti : it->second) {
                        const TransferRecord& tr = store.transfers[ti];
                        if (valuable_transfer(tr) && known.count(tr.from) &&
                            tr.key() < first_mint) {
                            rule = Provenance::CollusionRule1;
                            via = tr.from;
                            evidence_tx = tr.tx_hash;
                            break;
                        }
                    }
            }
            // R2: remitted valuable tokens after the last liquidity removal.
            if (!rule && !act.burns.empty()) {
                OrderKey last_burn = *std::max_element(act.burns.begin(), act.burns.end());
                if (auto it = store.transfers_by_from.find(addr);
                    it != store.transfers_by_from.end())
                    for (size_t ti : it->second) {
                        const TransferRecord& tr = store.transfers[ti];
                        if (valuable_transfer(tr) && known.count(tr.to) && last_burn < tr.key()) {
                            rule = Provenance::CollusionRule2;
                            via = tr.to;
                            evidence_tx = tr.tx_hash;
                            break;
                        }
                    }
            }
            // R3: funded before a valuable-for-scam swap.
            if (!rule && !act.buys_scam.empty()) {
                if (auto it = store.transfers_by_to.find(addr); it != store.transfers_by_to.end())
                    for (size_t ti : it->second) {
                        const TransferRecord& tr = store.transfers[ti];
                        if (!valuable_transfer(tr) || !known.count(tr.from)) continue;
                        for (const auto& swap_key : act.buys_scam)
                            if (tr.key() < swap_key) {
                                rule = Provenance::CollusionRule3;
                                via = tr.from;
                                evidence_tx = tr.tx_hash;
                                break;
                            }
                        if (rule) break;
                    }
            }
            // R4: remitted after a scam-for-valuable swap.
            if (!rule && !act.sells_scam.empty()) {
                if (auto it = store.transfers_by_from.find(addr);
                    it != store.transfers_by_from.end())
                    for (size_t ti : it->second) {
                        const TransferRecord& tr = store.transfers[ti];
                        if (!valuable_transfer(tr) || !known.count(tr.to)) continue;
                        for (const auto& swap_key : act.sells_scam)
                            if (swap_key < tr.key()) {
                                rule = Provenance::CollusionRule4;
                                via = tr.to;
                                evidence_tx = tr.tx_hash;
                                break;
                            }
                        if (rule) break;
                    }
            }

            if (rule) {
                Label l;
                l.subject = addr;
                l.kind = LabelKind::CollusionAddress;
                l.provenance = *rule;
                l.via = via;
                l.evidence = "pool " + pool.render() + ", transfer " + evidence_tx.render();
                found.push_back(std::move(l));
                found_set.insert(addr);
                known.insert(addr);
                ++round_added;
            }
        }
        if (round_added == 0) break;
    }
    return found;
}

}  // namespace

int detect_collusion_pool(const DataStore& store, LabelStore& labels, const AccountAddress& pool,
                          const std::set<AccountAddress>& valuable) {
    int added = 0;
    for (const auto& l : collusion_pass_pool(store, labels, pool, valuable)) added += labels.add(l);
    return added;
}

int detect_collusion(const DataStore& store, LabelStore& labels,
                     const std::set<AccountAddress>& valuable, unsigned jobs) {
    int total = 0;
    for (;;) {
        auto pools = labels.subjects_with(LabelKind::ScamPool);
        std::vector<AccountAddress> order(pools.begin(), pools.end());

        // Every pool sees the same read-only snapshot within a pass; the merge
        // feeds the next pass, so cross-pool chains resolve in later passes.
        std::vector<std::vector<Label>> found(order.size());
        parallel_for(order.size(), jobs, [&](size_t i) {
            found[i] = collusion_pass_pool(store, labels, order[i], valuable);
        });
        int added = 0;
        for (const auto& batch : found)
            for (const auto& l : batch) added += labels.add(l);
        total += added;
        if (added == 0) break;
    }
    return total;
}

void write_labels_csv(const std::filesystem::path& path, const LabelStore& labels) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing", 0, "file");
    out << "address,kind,provenance,evidence\n";
    for (const auto& l : labels.all()) {
        std::string evidence = l.evidence;
        if (l.via) evidence = "via=" + l.via->render() + "; " + evidence;
        out << csv_join({l.subject.render(), to_string(l.kind), to_string(l.provenance), evidence})
            << '\n';
    }
}

}  // namespace scamradar
