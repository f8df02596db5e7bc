#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scamradar/ingest.hpp"

namespace scamradar {

// Append-only label multimap. One subject can hold several kinds; the first
// label wins per (subject, kind) so provenance names the earliest discovery.
class LabelStore {
public:
    bool add(Label label);  // false if (subject, kind) already present
    bool has(const AccountAddress& subject, LabelKind kind) const;
    const Label* find(const AccountAddress& subject, LabelKind kind) const;
    std::vector<Label> for_subject(const AccountAddress& subject) const;
    std::set<AccountAddress> subjects_with(LabelKind kind) const;
    std::vector<Label> all() const;  // sorted by (subject, kind)
    size_t size() const { return rows_.size(); }
    int generation = 0;  // bumped once per expansion pass

private:
    std::map<std::pair<AccountAddress, LabelKind>, Label> rows_;
};

// ETH plus the official addresses whose symbols are weth/usdt/usdc/dai.
std::set<AccountAddress> valuable_from_officials(const std::vector<OfficialEntry>& official);

// Official addresses become OfficialToken; any other registry token whose
// normalized name or symbol collides with an official entry becomes
// ScamToken(NameMatch). User labels merge in first.
LabelStore seed_ground_truth(const DataStore& store, const std::vector<OfficialEntry>& official,
                             const std::vector<Label>& user_labels);

// Creator/first-mintor closure to fixed point. ContractDeployerExcluded
// subjects never receive creator labels, so nothing propagates through them.
// Returns the number of labels added.
int expand_guilt(const DataStore& store, LabelStore& labels);

struct VerifyResult {
    std::set<AccountAddress> verified;
    std::set<AccountAddress> unverified;
};

// Strict verification of classifier-flagged tokens: identical-name (or
// -symbol) groups of at least min_group, and brand-keyword hits. Verified
// tokens gain ScamToken(Verified).
VerifyResult verify_flagged(const DataStore& store, LabelStore& labels,
                            const std::set<AccountAddress>& ml_flagged,
                            const std::vector<std::string>& brand_keywords, int min_group = 2);

// One pool's collusion fixed point. Requires the pool to carry ScamPool.
// Returns the number of addresses flagged.
int detect_collusion_pool(const DataStore& store, LabelStore& labels, const AccountAddress& pool,
                          const std::set<AccountAddress>& valuable);

// Runs every ScamPool, re-passing until no pool adds labels (an address
// flagged on one pool counts as known-scam for every other).
int detect_collusion(const DataStore& store, LabelStore& labels,
                     const std::set<AccountAddress>& valuable, unsigned jobs = 1);

void write_labels_csv(const std::filesystem::path& path, const LabelStore& labels);

}  // namespace scamradar
