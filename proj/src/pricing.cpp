#include "ratpo/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ratpo {

double norm_pdf(double x)
{
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double norm_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double norm_inv(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw Error("norm_inv: probability must lie in (0, 1)");

    // Acklam's rational approximation (relative error ~1e-9), then one Halley
    // step against the erfc-based CDF.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01, -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    for (int i = 0; i < 2; ++i) {
        // Work in the tail that keeps the residual well conditioned.
        const double e = x < 0 ? norm_cdf(x) - p : (1.0 - p) - norm_cdf(-x);
        const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x = x - u / (1.0 + 0.5 * x * u);
    }
    return x;
}

namespace {

void check_inputs(const PricingInputs& in)
{
    const bool finite = std::isfinite(in.spot) && std::isfinite(in.strike) && std::isfinite(in.tenor) &&
                        std::isfinite(in.rate) && std::isfinite(in.div_yield) && std::isfinite(in.vol) &&
                        std::isfinite(in.futures_reference);
    if (!finite)
        throw Error("pricing: non-finite input");
    if (in.tenor < 0)
        throw Error("pricing: negative tenor");
    if (!(in.spot > 0))
        throw Error("pricing: spot must be positive");
    if (is_option(in.kind)) {
        if (!(in.vol > 0))
            throw Error("pricing: vol must be positive");
        if (!(in.strike > 0))
            throw Error("pricing: strike must be positive");
    }
}

double intrinsic(const PricingInputs& in)
{
    return in.kind == InstrumentKind::Call ? std::max(in.spot - in.strike, 0.0) : std::max(in.strike - in.spot, 0.0);
}

double d1_of(double s, double k, double t, double r, double q, double vol)
{
    return (std::log(s / k) + (r - q + 0.5 * vol * vol) * t) / (vol * std::sqrt(t));
}

double bs_value(double s, double k, double t, double r, double q, double vol, bool call)
{
    const double d1 = d1_of(s, k, t, r, q, vol);
    const double d2 = d1 - vol * std::sqrt(t);
    const double df_q = std::exp(-q * t);
    const double df_r = std::exp(-r * t);
    if (call)
        return s * df_q * norm_cdf(d1) - k * df_r * norm_cdf(d2);
    return k * df_r * norm_cdf(-d2) - s * df_q * norm_cdf(-d1);
}

// r / (1 - e^{-rT}), continuous at r = 0.
double rate_annuity_ratio(double r, double t)
{
    if (std::abs(r * t) < 1e-12)
        return 1.0 / t;
    return r / -std::expm1(-r * t);
}

double baw_call(double s, double k, double t, double r, double q, double vol)
{
    const double european = bs_value(s, k, t, r, q, vol, true);
    if (q <= 0.0)
        return std::max(european, std::max(s - k, 0.0));

    const double b = r - q;
    const double v2 = vol * vol;
    const double n = 2.0 * b / v2;
    const double m_over_k = 2.0 / v2 * rate_annuity_ratio(r, t);
    const double m = 2.0 * r / v2;
    const double disc = (n - 1.0) * (n - 1.0) + 4.0 * m_over_k;
    const double disc_inf = (n - 1.0) * (n - 1.0) + 4.0 * m;
    if (disc < 0 || disc_inf < 0)
        return std::max(european, intrinsic({s, k, t, r, q, vol, InstrumentKind::Call}));

    const double q2 = (-(n - 1.0) + std::sqrt(disc)) / 2.0;
    const double q2_inf = (-(n - 1.0) + std::sqrt(disc_inf)) / 2.0;
    const double s_inf = k / (1.0 - 1.0 / q2_inf);
    const double sqrt_t = std::sqrt(t);
    const double h2 = -(b * t + 2.0 * vol * sqrt_t) * k / (s_inf - k);
    double si = k + (s_inf - k) * (1.0 - std::exp(h2));
    const double carry = std::exp((b - r) * t);

    for (int iter = 0; iter < 200; ++iter) {
        const double d1 = d1_of(si, k, t, r, q, vol);
        const double lhs = si - k;
        const double rhs = bs_value(si, k, t, r, q, vol, true) + (1.0 - carry * norm_cdf(d1)) * si / q2;
        if (std::abs(lhs - rhs) / k < 1e-12)
            break;
        const double slope =
            carry * norm_cdf(d1) * (1.0 - 1.0 / q2) + (1.0 - carry * norm_pdf(d1) / (vol * sqrt_t)) / q2;
        si = (k + rhs - slope * si) / (1.0 - slope);
    }

    if (s >= si)
        return std::max(s - k, european);
    const double a2 = (si / q2) * (1.0 - carry * norm_cdf(d1_of(si, k, t, r, q, vol)));
    return std::max(european + a2 * std::pow(s / si, q2), european);
}

double baw_put(double s, double k, double t, double r, double q, double vol)
{
    const double european = bs_value(s, k, t, r, q, vol, false);
    if (r <= 0.0)
        return std::max(european, std::max(k - s, 0.0));

    const double b = r - q;
    const double v2 = vol * vol;
    const double n = 2.0 * b / v2;
    const double m_over_k = 2.0 / v2 * rate_annuity_ratio(r, t);
    const double m = 2.0 * r / v2;
    const double q1 = (-(n - 1.0) - std::sqrt((n - 1.0) * (n - 1.0) + 4.0 * m_over_k)) / 2.0;
    const double q1_inf = (-(n - 1.0) - std::sqrt((n - 1.0) * (n - 1.0) + 4.0 * m)) / 2.0;
    const double s_inf = k / (1.0 - 1.0 / q1_inf);
    const double sqrt_t = std::sqrt(t);
    const double h1 = (b * t - 2.0 * vol * sqrt_t) * k / (k - s_inf);
    double si = s_inf + (k - s_inf) * std::exp(h1);
    const double carry = std::exp((b - r) * t);

    for (int iter = 0; iter < 200; ++iter) {
        const double d1 = d1_of(si, k, t, r, q, vol);
        const double lhs = k - si;
        const double rhs = bs_value(si, k, t, r, q, vol, false) - (1.0 - carry * norm_cdf(-d1)) * si / q1;
        if (std::abs(lhs - rhs) / k < 1e-12)
            break;
        const double slope =
            -carry * norm_cdf(-d1) * (1.0 - 1.0 / q1) - (1.0 + carry * norm_pdf(-d1) / (vol * sqrt_t)) / q1;
        si = (k - rhs + slope * si) / (1.0 + slope);
    }

    if (s <= si)
        return std::max(k - s, european);
    const double a1 = -(si / q1) * (1.0 - carry * norm_cdf(-d1_of(si, k, t, r, q, vol)));
    return std::max(european + a1 * std::pow(s / si, q1), european);
}

}  // namespace

double forward_price(const PricingInputs& in)
{
    return in.spot * std::exp((in.rate - in.div_yield) * in.tenor);
}

double black_scholes(const PricingInputs& in)
{
    check_inputs(in);
    if (!is_option(in.kind))
        throw Error("black_scholes: not an option");
    if (in.tenor == 0.0)
        return intrinsic(in);
    return bs_value(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol, in.kind == InstrumentKind::Call);
}

double barone_adesi_whaley(const PricingInputs& in)
{
    check_inputs(in);
    if (!is_option(in.kind))
        throw Error("barone_adesi_whaley: not an option");
    if (in.tenor == 0.0)
        return intrinsic(in);
    if (in.kind == InstrumentKind::Call)
        return baw_call(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol);
    return baw_put(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol);
}

double price(const PricingInputs& in)
{
    check_inputs(in);
    switch (in.kind) {
    case InstrumentKind::Stock:
        return in.spot;
    case InstrumentKind::Futures:
        return forward_price(in) - in.futures_reference;
    case InstrumentKind::Call:
    case InstrumentKind::Put:
        return in.exercise == Exercise::American ? barone_adesi_whaley(in) : black_scholes(in);
    }
    return 0.0;
}

double bs_delta(const PricingInputs& in)
{
    const double d1 = d1_of(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol);
    const double df_q = std::exp(-in.div_yield * in.tenor);
    return in.kind == InstrumentKind::Call ? df_q * norm_cdf(d1) : -df_q * norm_cdf(-d1);
}

double bs_gamma(const PricingInputs& in)
{
    const double d1 = d1_of(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol);
    return std::exp(-in.div_yield * in.tenor) * norm_pdf(d1) / (in.spot * in.vol * std::sqrt(in.tenor));
}

double bs_vega(const PricingInputs& in)
{
    const double d1 = d1_of(in.spot, in.strike, in.tenor, in.rate, in.div_yield, in.vol);
    return in.spot * std::exp(-in.div_yield * in.tenor) * norm_pdf(d1) * std::sqrt(in.tenor);
}

double strike_from_delta(double spot, double tenor, double rate, double div_yield, double vol, double delta_pct,
                         InstrumentKind kind)
{
    if (!is_option(kind))
        throw Error("strike_from_delta: option kinds only");
    const double target = delta_pct * std::exp(div_yield * tenor);
    if (!(target > 0.0 && target < 1.0))
        throw Error("strike_from_delta: delta percentage outside attainable range");
    const double z = norm_inv(target);
    const double d1 = kind == InstrumentKind::Call ? z : -z;
    return spot * std::exp(-d1 * vol * std::sqrt(tenor) + (rate - div_yield + 0.5 * vol * vol) * tenor);
}

Greeks bump_greeks(const PricingInputs& in)
{
    check_inputs(in);
    Greeks g;
    if (in.kind == InstrumentKind::Stock) {
        g.delta = kSpotBump * in.spot;
        return g;
    }
    if (in.kind == InstrumentKind::Futures) {
        g.delta = kSpotBump * forward_price(in);
        return g;
    }

    const double base = price(in);
    PricingInputs up = in;
    up.spot = in.spot * (1.0 + kSpotBump);
    PricingInputs down = in;
    down.spot = in.spot * (1.0 - kSpotBump);
    PricingInputs vol_up = in;
    vol_up.vol = in.vol + kVolBump;

    const double v_up = price(up);
    g.delta = v_up - base;
    g.gamma = v_up - 2.0 * base + price(down);
    g.vega = price(vol_up) - base;
    return g;
}

}  // namespace ratpo
