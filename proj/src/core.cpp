#include "scamradar/core.hpp"

#include <algorithm>
#include <cctype>

#include "scamradar/util.hpp"

namespace scamradar {

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

char hex_char(int v) { return v < 10 ? static_cast<char>('0' + v) : static_cast<char>('a' + v - 10); }

template <size_t N>
std::array<uint8_t, N> parse_hex_id(std::string_view text, const char* what) {
    const size_t want = 2 + 2 * N;
    if (text.size() != want)
        throw ParseError(std::string(what) + ": expected " + std::to_string(want) +
                             " characters, got " + std::to_string(text.size()),
                         text.size());
    if (text[0] != '0' || (text[1] != 'x' && text[1] != 'X'))
        throw ParseError(std::string(what) + ": missing 0x prefix", 0);
    std::array<uint8_t, N> out{};
    for (size_t i = 0; i < 2 * N; ++i) {
        int v = hex_nibble(text[2 + i]);
        if (v < 0)
            throw ParseError(std::string(what) + ": non-hex character", 2 + i);
        out[i / 2] = static_cast<uint8_t>(out[i / 2] << 4 | v);
    }
    return out;
}

template <size_t N>
std::string render_hex_id(const std::array<uint8_t, N>& bytes) {
    std::string s;
    s.reserve(2 + 2 * N);
    s += "0x";
    for (uint8_t b : bytes) {
        s += hex_char(b >> 4);
        s += hex_char(b & 0xf);
    }
    return s;
}

}  // namespace

AccountAddress AccountAddress::parse(std::string_view text) {
    return from_bytes(parse_hex_id<20>(text, "address"));
}

std::string AccountAddress::render() const { return render_hex_id(bytes_); }

AccountAddress AccountAddress::eth_sentinel() {
    std::array<uint8_t, 20> b;
    b.fill(0xee);
    return from_bytes(b);
}

TxHash TxHash::parse(std::string_view text) { return from_bytes(parse_hex_id<32>(text, "tx hash")); }

std::string TxHash::render() const { return render_hex_id(bytes_); }

// --- TokenAmount -------------------------------------------------------------

TokenAmount::TokenAmount(Uint256 base_units, int decimals)
    : units_(std::move(base_units)), decimals_(decimals) {
    if (decimals < 0 || decimals > 36)
        throw AmountError("decimals out of range [0,36]: " + std::to_string(decimals));
}

TokenAmount TokenAmount::parse(std::string_view dec_string, int decimals) {
    if (dec_string.empty()) throw ParseError("amount: empty decimal string", 0);
    Uint256 v = 0;
    for (size_t i = 0; i < dec_string.size(); ++i) {
        char c = dec_string[i];
        if (c < '0' || c > '9') throw ParseError("amount: non-digit character", i);
        try {
            v = v * 10 + (c - '0');
        } catch (const std::exception&) {
            throw ParseError("amount: exceeds 256-bit range", i);
        }
    }
    return TokenAmount(v, decimals);
}

void TokenAmount::require_same_decimals(const TokenAmount& other) const {
    if (decimals_ != other.decimals_)
        throw AmountError("decimals mismatch: " + std::to_string(decimals_) + " vs " +
                          std::to_string(other.decimals_));
}

TokenAmount TokenAmount::add(const TokenAmount& other) const {
    require_same_decimals(other);
    try {
        return TokenAmount(units_ + other.units_, decimals_);
    } catch (const std::exception&) {
        throw AmountError("amount addition overflow");
    }
}

TokenAmount TokenAmount::sub(const TokenAmount& other) const {
    require_same_decimals(other);
    if (other.units_ > units_) throw AmountError("amount subtraction underflow");
    return TokenAmount(units_ - other.units_, decimals_);
}

double TokenAmount::to_double() const {
    double v = units_.convert_to<double>();
    return v / std::pow(10.0, decimals_);
}

std::string TokenAmount::render_units() const { return units_.str(); }

// --- enums ---------------------------------------------------------------------

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Mint: return "mint";
        case EventKind::Burn: return "burn";
        case EventKind::Swap: return "swap";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    if (s == "mint") return EventKind::Mint;
    if (s == "burn") return EventKind::Burn;
    if (s == "swap") return EventKind::Swap;
    return std::nullopt;
}

const char* to_string(LabelKind k) {
    switch (k) {
        case LabelKind::OfficialToken: return "OfficialToken";
        case LabelKind::ScamToken: return "ScamToken";
        case LabelKind::ScamPool: return "ScamPool";
        case LabelKind::ScamTokenCreator: return "ScamTokenCreator";
        case LabelKind::ScamPoolCreator: return "ScamPoolCreator";
        case LabelKind::CollusionAddress: return "CollusionAddress";
        case LabelKind::ContractDeployerExcluded: return "ContractDeployerExcluded";
    }
    return "?";
}

std::optional<LabelKind> label_kind_from_string(std::string_view s) {
    for (auto k : {LabelKind::OfficialToken, LabelKind::ScamToken, LabelKind::ScamPool,
                   LabelKind::ScamTokenCreator, LabelKind::ScamPoolCreator,
                   LabelKind::CollusionAddress, LabelKind::ContractDeployerExcluded})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::GroundTruth: return "GroundTruth";
        case Provenance::NameMatch: return "NameMatch";
        case Provenance::Expansion: return "Expansion";
        case Provenance::MlFlagged: return "MlFlagged";
        case Provenance::Verified: return "Verified";
        case Provenance::CollusionRule1: return "CollusionRule1";
        case Provenance::CollusionRule2: return "CollusionRule2";
        case Provenance::CollusionRule3: return "CollusionRule3";
        case Provenance::CollusionRule4: return "CollusionRule4";
        case Provenance::UserSupplied: return "UserSupplied";
    }
    return "?";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
    for (auto p : {Provenance::GroundTruth, Provenance::NameMatch, Provenance::Expansion,
                   Provenance::MlFlagged, Provenance::Verified, Provenance::CollusionRule1,
                   Provenance::CollusionRule2, Provenance::CollusionRule3,
                   Provenance::CollusionRule4, Provenance::UserSupplied})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

// --- event invariants -------------------------------------------------------------

void PoolEvent::check_invariants() const {
    auto fail = [](const char* field, const char* msg) { throw IngestError(msg, 0, field); };
    switch (kind) {
        case EventKind::Mint:
            if (amount0_in.is_zero() || amount1_in.is_zero())
                fail("a0in", "mint requires both input amounts > 0");
            if (!amount0_out.is_zero() || !amount1_out.is_zero())
                fail("a0out", "mint must have zero outputs");
            if (lp_delta.is_zero()) fail("lp", "mint requires lp_delta > 0");
            break;
        case EventKind::Burn:
            if (amount0_out.is_zero() || amount1_out.is_zero())
                fail("a0out", "burn requires both output amounts > 0");
            if (!amount0_in.is_zero() || !amount1_in.is_zero())
                fail("a0in", "burn must have zero inputs");
            if (lp_delta.is_zero()) fail("lp", "burn requires lp_delta > 0");
            break;
        case EventKind::Swap: {
            const bool zero_for_one = !amount0_in.is_zero();
            const bool one_for_zero = !amount1_in.is_zero();
            if (zero_for_one == one_for_zero)
                fail("a0in", "swap requires exactly one input side > 0");
            if (zero_for_one && (amount1_out.is_zero() || !amount0_out.is_zero()))
                fail("a1out", "swap 0->1 requires amount1_out > 0 and amount0_out == 0");
            if (one_for_zero && (amount0_out.is_zero() || !amount1_out.is_zero()))
                fail("a0out", "swap 1->0 requires amount0_out > 0 and amount1_out == 0");
            if (!lp_delta.is_zero()) fail("lp", "swap must not change lp supply");
            break;
        }
    }
}

// --- core ops -----------------------------------------------------------------------

AccountAddress canonicalize_address(std::string_view text) { return AccountAddress::parse(text); }

std::string normalize_name(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
    return out;
}

// --- csv helpers ----------------------------------------------------------------------

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(const std::string& value) {
    bool needs_quote = value.find_first_of(",\"") != std::string::npos ||
                       (!value.empty() && (value.front() == ' ' || value.back() == ' '));
    if (!needs_quote) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out;
}

}  // namespace scamradar
