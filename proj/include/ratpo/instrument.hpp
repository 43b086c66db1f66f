#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ratpo {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or field; the message names the offending field/line.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value.
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class InstrumentKind { Call, Put, Futures, Stock };
enum class Exercise { European, American };
enum class UnderlyingCategory { Stock, StockIndex };

/// Single-letter code used in identifiers: c, p, q, s.
char kind_code(InstrumentKind kind);
InstrumentKind kind_from_code(char code);
bool is_option(InstrumentKind kind);

/// The delta-quoted strikes every option/futures UEI is enumerated over.
inline constexpr double kDeltaStrikes[] = {0.10, 0.25, 0.50};

/// Parameter tuple identifying one eligible instrument (underlying position,
/// payoff type, delta-quoted strike and tenor). Stocks carry neither strike nor tenor.
struct UeiDescriptor {
    int underlying_pos = 1;  // 1-based
    InstrumentKind kind = InstrumentKind::Stock;
    std::optional<double> strike_delta;
    std::optional<int> tenor_days;

    friend bool operator==(const UeiDescriptor&, const UeiDescriptor&) = default;
};

/// Canonical "ν|ω|K|T" identifier, e.g. "13|q|0.25|021" or "01|s|-|-".
std::string descriptor_id(const UeiDescriptor& d);
UeiDescriptor parse_descriptor_id(std::string_view id);
bool looks_like_descriptor_id(std::string_view id);

struct UnderlyingSpec {
    std::string ticker;
    UnderlyingCategory category = UnderlyingCategory::Stock;
    std::vector<int> tenor_domain;  // days, strictly increasing
    // Half-widths of the symmetric notional ranges. Absent means derived from
    // the initial portfolio sensitivities when the slot structure is built.
    std::optional<std::int64_t> option_notional_bound;
    std::optional<std::int64_t> linear_notional_bound;

    friend bool operator==(const UnderlyingSpec&, const UnderlyingSpec&) = default;
};

/// Validates and puts specs into universe order: stocks first, then indexes,
/// each group sorted by ticker. This is the numbering of the reference universe
/// (stocks ν=1..8, indexes ν=9..13).
std::vector<UnderlyingSpec> order_underlyings(std::vector<UnderlyingSpec> specs);

/// Enumerates the UEI universe. Specs are taken in the order given; call
/// order_underlyings() first when the input order is arbitrary.
std::vector<UeiDescriptor> build_universe(const std::vector<UnderlyingSpec>& specs);

/// Closed-form universe size: Σ_stocks (6|T|+1) + Σ_indexes 9|T|.
std::size_t universe_size(const std::vector<UnderlyingSpec>& specs);

/// An instrument held in the initial portfolio. Unlike UEIs these carry an
/// absolute strike and may be American.
struct StaticInstrument {
    std::string ticker;
    InstrumentKind kind = InstrumentKind::Stock;
    std::optional<double> strike;
    std::optional<int> tenor_days;
    Exercise exercise = Exercise::European;

    friend bool operator==(const StaticInstrument&, const StaticInstrument&) = default;
};

/// "TICKER|ω|strike|days|E/A" with '-' for absent fields.
std::string static_id(const StaticInstrument& inst);
StaticInstrument parse_static_id(std::string_view id);

struct PortfolioLeg {
    std::string instrument_id;
    std::int64_t notional = 0;

    friend bool operator==(const PortfolioLeg&, const PortfolioLeg&) = default;
};

/// Multiset of (instrument id, signed notional). Duplicate ids add up.
struct Portfolio {
    std::vector<PortfolioLeg> legs;
};

struct UnderlyingMarket {
    double spot = 0.0;
    double vol = 0.0;  // flat fallback
    // Optional per-(delta strike, tenor) vols keyed "0.25|021".
    std::map<std::string, double> vol_surface;
    double div_yield = 0.0;
    std::string currency = "EUR";
    double spot_spread = 0.0;     // relative
    double futures_spread = 0.0;  // monetary per unit, local currency
    std::map<std::string, double> vol_spread;  // keyed "0.10"; decimal vol

    friend bool operator==(const UnderlyingMarket&, const UnderlyingMarket&) = default;
};

struct CurrencyMarket {
    double rate = 0.0;
    double fx_eur = 1.0;  // EUR per unit of currency

    friend bool operator==(const CurrencyMarket&, const CurrencyMarket&) = default;
};

struct MarketData {
    std::map<std::string, UnderlyingMarket> underlyings;
    std::map<std::string, CurrencyMarket> currencies;

    const UnderlyingMarket& underlying(const std::string& ticker) const;
    const CurrencyMarket& currency(const std::string& ccy) const;
    /// Vol for a delta-quoted strike and tenor, falling back to the flat vol.
    double vol_for(const std::string& ticker, std::optional<double> strike_delta,
                   std::optional<int> tenor_days) const;
    void validate() const;

    friend bool operator==(const MarketData&, const MarketData&) = default;
};

std::string strike_key(double strike_delta);
std::string surface_key(double strike_delta, int tenor_days);

/// Historical risk-factor moves. Row index is temporal order, last = most recent.
struct ScenarioSet {
    std::vector<std::string> tickers;
    std::vector<std::string> currencies;
    // row-major [scenario][ticker]
    std::vector<double> spot_returns;
    std::vector<double> vol_shifts;
    // row-major [scenario][currency]
    std::vector<double> rate_shifts;
    std::size_t count = 0;

    double spot_return(std::size_t scenario, std::size_t ticker) const {
        return spot_returns[scenario * tickers.size() + ticker];
    }
    double vol_shift(std::size_t scenario, std::size_t ticker) const {
        return vol_shifts[scenario * tickers.size() + ticker];
    }
    double rate_shift(std::size_t scenario, std::size_t ccy) const {
        return rate_shifts[scenario * currencies.size() + ccy];
    }
    std::size_t ticker_index(const std::string& ticker) const;
    std::size_t currency_index(const std::string& ccy) const;

    friend bool operator==(const ScenarioSet&, const ScenarioSet&) = default;
};

/// Built-in universe specs: the 13-underlying reference universe and the
/// single-index (.STOXX50E) case.
std::vector<UnderlyingSpec> reference_universe_specs();
std::vector<UnderlyingSpec> single_index_specs();

}  // namespace ratpo
