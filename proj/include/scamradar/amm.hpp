#pragma once

#include <map>

#include "scamradar/core.hpp"

namespace scamradar {

enum class SwapSide { ZeroForOne, OneForZero };

// Constant-product pool state. All outputs floor to integer base units, so a
// replayed log can disagree with the engine by at most one unit per side.
// Transitions are pure: operations return the successor state.
struct PoolState {
    TokenAmount reserve0;
    TokenAmount reserve1;
    TokenAmount lp_total_supply;
    int64_t fee_numerator = 997;
    int64_t fee_denominator = 1000;
    std::map<AccountAddress, TokenAmount> lp_balances;

    static PoolState empty(int decimals0, int decimals1, int lp_decimals = 18);

    bool has_liquidity() const { return !reserve0.is_zero() && !reserve1.is_zero(); }
    Uint512 product() const {
        return Uint512(reserve0.units()) * Uint512(reserve1.units());
    }
    TokenAmount lp_balance_of(const AccountAddress& who) const;
};

struct MintResult {
    PoolState state;
    TokenAmount lp_minted;
};

struct BurnResult {
    PoolState state;
    TokenAmount out0;
    TokenAmount out1;
};

struct SwapResult {
    PoolState state;
    TokenAmount amount_out;
};

// First mint credits floor(sqrt(in0*in1)) LP units; later mints must match the
// reserve ratio within `ratio_tolerance` (relative) and credit floor(l*in0/x).
MintResult mint(const PoolState& state, const AccountAddress& provider, const TokenAmount& in0,
                const TokenAmount& in1, double ratio_tolerance = 1e-9);

// Redeems pro-rata: out_i = floor(reserve_i * lp_burned / lp_total_supply).
BurnResult burn(const PoolState& state, const AccountAddress& provider,
                const TokenAmount& lp_burned);

// out = floor(out_reserve * in * fee_num / (in_reserve * fee_den + in * fee_num)).
SwapResult swap(const PoolState& state, const AccountAddress& trader, SwapSide side,
                const TokenAmount& amount_in);

// Relative rise of the input-side token price caused by the hypothetical swap.
double price_impact(const PoolState& state, SwapSide side, const TokenAmount& amount_in);

}  // namespace scamradar
