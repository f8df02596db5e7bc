#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scamradar/errors.hpp"

namespace scamradar {

// Unsigned 256-bit integer with checked arithmetic: overflow and negative
// results throw instead of wrapping.
using Uint256 = boost::multiprecision::checked_uint256_t;
// Headroom type for products inside pool math.
using Uint512 = boost::multiprecision::uint512_t;
// Signed arbitrary-precision for net flows.
using BigInt = boost::multiprecision::cpp_int;

// --- identifiers ------------------------------------------------------------

class AccountAddress {
public:
    AccountAddress() : bytes_{} {}

    static AccountAddress parse(std::string_view text);  // throws ParseError
    static AccountAddress from_bytes(const std::array<uint8_t, 20>& b) {
        AccountAddress a;
        a.bytes_ = b;
        return a;
    }
    // Reserved identifier used for native ETH in transfer records and prices.
    static AccountAddress eth_sentinel();

    std::string render() const;  // canonical 0x + 40 lowercase hex chars
    bool is_eth() const { return *this == eth_sentinel(); }

    auto operator<=>(const AccountAddress&) const = default;
    const std::array<uint8_t, 20>& bytes() const { return bytes_; }

private:
    std::array<uint8_t, 20> bytes_;
};

class TxHash {
public:
    TxHash() : bytes_{} {}
    static TxHash parse(std::string_view text);  // throws ParseError
    static TxHash from_bytes(const std::array<uint8_t, 32>& b) {
        TxHash h;
        h.bytes_ = b;
        return h;
    }
    std::string render() const;
    auto operator<=>(const TxHash&) const = default;

private:
    std::array<uint8_t, 32> bytes_;
};

struct AddressHash {
    size_t operator()(const AccountAddress& a) const {
        uint64_t h;
        static_assert(sizeof(h) <= 20);
        __builtin_memcpy(&h, a.bytes().data(), sizeof(h));
        return static_cast<size_t>(h * 0x9e3779b97f4a7c15ULL);
    }
};

// --- amounts ----------------------------------------------------------------

// An ERC-20 quantity: integer base units plus the token's decimals exponent.
// Additive arithmetic requires equal decimals and is exact; any overflow or
// underflow raises AmountError.
class TokenAmount {
public:
    TokenAmount() : units_(0), decimals_(18) {}
    TokenAmount(Uint256 base_units, int decimals);

    static TokenAmount parse(std::string_view dec_string, int decimals);  // throws ParseError
    static TokenAmount zero(int decimals) { return TokenAmount(Uint256(0), decimals); }

    const Uint256& units() const { return units_; }
    int decimals() const { return decimals_; }
    bool is_zero() const { return units_ == 0; }

    TokenAmount add(const TokenAmount& other) const;
    TokenAmount sub(const TokenAmount& other) const;

    // Value in whole-token units; lossy, for reporting and features only.
    double to_double() const;

    std::string render_units() const;  // decimal string of base units

    auto operator<=>(const TokenAmount& other) const {
        if (auto c = decimals_ <=> other.decimals_; c != 0) return c;
        return units_ < other.units_   ? std::strong_ordering::less
               : units_ > other.units_ ? std::strong_ordering::greater
                                        : std::strong_ordering::equal;
    }
    bool operator==(const TokenAmount&) const = default;

private:
    void require_same_decimals(const TokenAmount& other) const;
    Uint256 units_;
    int decimals_;
};

// --- registry records ---------------------------------------------------------

struct TokenInfo {
    AccountAddress address;
    std::string name;    // not unique across tokens
    std::string symbol;  // not unique across tokens
    int decimals = 18;
    AccountAddress creator;
    int64_t creation_time = 0;
};

struct PoolInfo {
    AccountAddress address;
    AccountAddress token0;  // canonical: token0 < token1
    AccountAddress token1;
    AccountAddress creator;  // sender of the pool's first mint
    int64_t creation_time = 0;
};

// --- the event stream ---------------------------------------------------------

enum class EventKind { Mint, Burn, Swap };

const char* to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

// Total order of everything observed on chain.
struct OrderKey {
    int64_t ts = 0;
    TxHash tx;
    int32_t log_index = 0;
    auto operator<=>(const OrderKey&) const = default;
};

struct PoolEvent {
    TxHash tx_hash;
    int32_t log_index = 0;
    int64_t timestamp = 0;
    AccountAddress pool;
    EventKind kind = EventKind::Swap;
    AccountAddress initiator;  // resolved end-user, never a router
    TokenAmount amount0_in, amount1_in, amount0_out, amount1_out;
    TokenAmount lp_delta;  // minted for Mint, burned magnitude for Burn, zero for Swap

    OrderKey key() const { return {timestamp, tx_hash, log_index}; }
    // Throws IngestError(line 0) when the per-kind shape invariants fail.
    void check_invariants() const;
};

struct TransferRecord {
    TxHash tx_hash;
    int32_t log_index = 0;
    int64_t timestamp = 0;
    AccountAddress token;  // eth_sentinel() for native ETH
    AccountAddress from;
    AccountAddress to;
    TokenAmount amount;

    OrderKey key() const { return {timestamp, tx_hash, log_index}; }
};

// --- labels ---------------------------------------------------------------------

enum class LabelKind {
    OfficialToken,
    ScamToken,
    ScamPool,
    ScamTokenCreator,
    ScamPoolCreator,
    CollusionAddress,
    ContractDeployerExcluded,
};

enum class Provenance {
    GroundTruth,
    NameMatch,
    Expansion,
    MlFlagged,
    Verified,
    CollusionRule1,
    CollusionRule2,
    CollusionRule3,
    CollusionRule4,
    UserSupplied,
};

const char* to_string(LabelKind k);
const char* to_string(Provenance p);
std::optional<LabelKind> label_kind_from_string(std::string_view s);
std::optional<Provenance> provenance_from_string(std::string_view s);

struct Label {
    AccountAddress subject;
    LabelKind kind = LabelKind::ScamToken;
    Provenance provenance = Provenance::GroundTruth;
    // Address whose earlier label triggered this one; unset for roots.
    std::optional<AccountAddress> via;
    std::string evidence;
};

// --- core operations --------------------------------------------------------------

// Canonical lowercase form of a 0x-prefixed 40-hex-char address.
AccountAddress canonicalize_address(std::string_view text);  // throws ParseError

// Name equality used for impersonation grouping: trimmed, case-folded,
// internal whitespace runs collapsed to single spaces.
std::string normalize_name(std::string_view text);

}  // namespace scamradar
