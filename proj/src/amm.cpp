#include "scamradar/amm.hpp"

#include <boost/multiprecision/integer.hpp>

namespace scamradar {

namespace {

// Wide enough for reserve*reserve*fee products; nothing here can wrap.
using Wide = boost::multiprecision::uint1024_t;

Uint256 narrow(const Wide& v, const char* what) {
    if (v > Wide(std::numeric_limits<Uint256>::max()))
        throw AmountError(std::string(what) + ": result exceeds 256-bit range");
    return v.convert_to<Uint256>();
}

// floor(a * b / c).
Uint256 mul_div(const Uint256& a, const Uint256& b, const Uint256& c, const char* what) {
    if (c == 0) throw AmountError(std::string(what) + ": division by zero");
    Wide prod = Wide(a) * Wide(b);
    return narrow(prod / Wide(c), what);
}

}  // namespace

PoolState PoolState::empty(int decimals0, int decimals1, int lp_decimals) {
    PoolState s;
    s.reserve0 = TokenAmount::zero(decimals0);
    s.reserve1 = TokenAmount::zero(decimals1);
    s.lp_total_supply = TokenAmount::zero(lp_decimals);
    return s;
}

TokenAmount PoolState::lp_balance_of(const AccountAddress& who) const {
    auto it = lp_balances.find(who);
    return it == lp_balances.end() ? TokenAmount::zero(lp_total_supply.decimals()) : it->second;
}

MintResult mint(const PoolState& state, const AccountAddress& provider, const TokenAmount& in0,
                const TokenAmount& in1, double ratio_tolerance) {
    if (in0.is_zero() || in1.is_zero())
        throw AmmError(AmmError::Kind::InvalidLiquidity, "mint requires both inputs > 0");
    if (in0.decimals() != state.reserve0.decimals() || in1.decimals() != state.reserve1.decimals())
        throw AmountError("mint inputs use wrong decimals for this pool");

    Uint256 minted_units;
    if (state.lp_total_supply.is_zero()) {
        minted_units = boost::multiprecision::sqrt(
                           Wide(in0.units()) * Wide(in1.units()))
                           .convert_to<Uint256>();
    } else {
        // Cross-multiplied ratio check: in0/x == in1/y within relative tolerance.
        Wide lhs = Wide(in0.units()) * Wide(state.reserve1.units());
        Wide rhs = Wide(in1.units()) * Wide(state.reserve0.units());
        Wide diff = lhs > rhs ? lhs - rhs : rhs - lhs;
        Wide scale = lhs > rhs ? lhs : rhs;
        if (diff.convert_to<double>() > ratio_tolerance * scale.convert_to<double>())
            throw AmmError(AmmError::Kind::RatioMismatch,
                           "mint amounts deviate from the reserve ratio");
        minted_units =
            mul_div(state.lp_total_supply.units(), in0.units(), state.reserve0.units(), "mint");
    }
    if (minted_units == 0)
        throw AmmError(AmmError::Kind::InvalidLiquidity, "mint too small: zero LP units");

    MintResult r{state, TokenAmount(minted_units, state.lp_total_supply.decimals())};
    r.state.reserve0 = state.reserve0.add(in0);
    r.state.reserve1 = state.reserve1.add(in1);
    r.state.lp_total_supply = state.lp_total_supply.add(r.lp_minted);
    auto [it, inserted] = r.state.lp_balances.try_emplace(provider, r.lp_minted);
    if (!inserted) it->second = it->second.add(r.lp_minted);
    return r;
}

BurnResult burn(const PoolState& state, const AccountAddress& provider,
                const TokenAmount& lp_burned) {
    if (lp_burned.is_zero())
        throw AmmError(AmmError::Kind::InvalidInput, "burn requires lp_burned > 0");
    TokenAmount held = state.lp_balance_of(provider);
    if (lp_burned > held)
        throw AmmError(AmmError::Kind::InsufficientLp, "burning more LP than held");

    const Uint256& supply = state.lp_total_supply.units();
    TokenAmount out0(mul_div(state.reserve0.units(), lp_burned.units(), supply, "burn"),
                     state.reserve0.decimals());
    TokenAmount out1(mul_div(state.reserve1.units(), lp_burned.units(), supply, "burn"),
                     state.reserve1.decimals());

    BurnResult r{state, out0, out1};
    r.state.reserve0 = state.reserve0.sub(out0);
    r.state.reserve1 = state.reserve1.sub(out1);
    r.state.lp_total_supply = state.lp_total_supply.sub(lp_burned);
    TokenAmount rest = held.sub(lp_burned);
    if (rest.is_zero())
        r.state.lp_balances.erase(provider);
    else
        r.state.lp_balances[provider] = rest;
    return r;
}

SwapResult swap(const PoolState& state, const AccountAddress&, SwapSide side,
                const TokenAmount& amount_in) {
    if (amount_in.is_zero()) throw AmmError(AmmError::Kind::InvalidInput, "swap input is zero");
    if (!state.has_liquidity()) throw AmmError(AmmError::Kind::NoLiquidity, "pool has no liquidity");

    const TokenAmount& in_reserve = side == SwapSide::ZeroForOne ? state.reserve0 : state.reserve1;
    const TokenAmount& out_reserve = side == SwapSide::ZeroForOne ? state.reserve1 : state.reserve0;
    if (amount_in.decimals() != in_reserve.decimals())
        throw AmountError("swap input uses wrong decimals for this pool side");

    Wide in_after_fee = Wide(amount_in.units()) * state.fee_numerator;
    Wide numerator = Wide(out_reserve.units()) * in_after_fee;
    Wide denominator = Wide(in_reserve.units()) * state.fee_denominator + in_after_fee;
    Uint256 out_units = narrow(numerator / denominator, "swap");
    if (out_units == 0) throw AmmError(AmmError::Kind::DustSwap, "swap output floors to zero");

    TokenAmount out(out_units, out_reserve.decimals());
    SwapResult r{state, out};
    if (side == SwapSide::ZeroForOne) {
        r.state.reserve0 = state.reserve0.add(amount_in);
        r.state.reserve1 = state.reserve1.sub(out);
    } else {
        r.state.reserve1 = state.reserve1.add(amount_in);
        r.state.reserve0 = state.reserve0.sub(out);
    }
    return r;
}

double price_impact(const PoolState& state, SwapSide side, const TokenAmount& amount_in) {
    SwapResult r = swap(state, AccountAddress{}, side, amount_in);
    auto ratio = [](const TokenAmount& num, const TokenAmount& den) {
        return num.units().convert_to<double>() / den.units().convert_to<double>();
    };
    // Marginal price of the output-side token, quoted in the input token,
    // rises as the output reserve shrinks.
    double before, after;
    if (side == SwapSide::ZeroForOne) {
        before = ratio(state.reserve0, state.reserve1);
        after = ratio(r.state.reserve0, r.state.reserve1);
    } else {
        before = ratio(state.reserve1, state.reserve0);
        after = ratio(r.state.reserve1, r.state.reserve0);
    }
    return after / before - 1.0;
}

}  // namespace scamradar
