#pragma once

#include "ratpo/instrument.hpp"

namespace ratpo {

double norm_pdf(double x);
double norm_cdf(double x);
/// Inverse standard normal CDF, |error| below 1e-14 on (0, 1).
double norm_inv(double p);

struct PricingInputs {
    double spot = 0.0;
    double strike = 0.0;  // absolute; ignored for stock and futures
    double tenor = 0.0;   // years
    double rate = 0.0;
    double div_yield = 0.0;
    double vol = 0.0;
    InstrumentKind kind = InstrumentKind::Stock;
    Exercise exercise = Exercise::European;
    // Futures are valued against a fixed reference price: the forward at trade
    // date, so a freshly traded contract is worth zero.
    double futures_reference = 0.0;
};

/// Value per unit notional in the instrument's currency.
///   stock: S; futures: S e^{(r-q)τ} - F0; options: Black-Scholes (European)
///   or Barone-Adesi-Whaley (American). τ = 0 gives intrinsic value.
double price(const PricingInputs& in);

double black_scholes(const PricingInputs& in);
double barone_adesi_whaley(const PricingInputs& in);
double forward_price(const PricingInputs& in);

/// Analytic Black-Scholes spot delta, gamma and vega (per unit of vol).
double bs_delta(const PricingInputs& in);
double bs_gamma(const PricingInputs& in);
double bs_vega(const PricingInputs& in);

/// Absolute strike whose Black-Scholes spot delta has magnitude delta_pct.
double strike_from_delta(double spot, double tenor, double rate, double div_yield, double vol,
                         double delta_pct, InstrumentKind kind);

/// Monetary bump sensitivities per unit notional:
///   delta = v(1.01 S) - v(S)
///   gamma = v(1.01 S) - 2 v(S) + v(0.99 S)
///   vega  = v(σ + 0.01) - v(σ)
struct Greeks {
    double delta = 0.0;
    double vega = 0.0;
    double gamma = 0.0;
};

inline constexpr double kSpotBump = 0.01;
inline constexpr double kVolBump = 0.01;

Greeks bump_greeks(const PricingInputs& in);

}  // namespace ratpo
