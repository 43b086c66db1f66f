#include "ratpo/instrument.hpp"

#include "ratpo/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

namespace ratpo {

char kind_code(InstrumentKind kind)
{
    switch (kind) {
    case InstrumentKind::Call: return 'c';
    case InstrumentKind::Put: return 'p';
    case InstrumentKind::Futures: return 'q';
    case InstrumentKind::Stock: return 's';
    }
    return '?';
}

InstrumentKind kind_from_code(char code)
{
    switch (code) {
    case 'c': return InstrumentKind::Call;
    case 'p': return InstrumentKind::Put;
    case 'q': return InstrumentKind::Futures;
    case 's': return InstrumentKind::Stock;
    default: throw SchemaError(std::string("unknown instrument kind '") + code + "'");
    }
}

bool is_option(InstrumentKind kind)
{
    return kind == InstrumentKind::Call || kind == InstrumentKind::Put;
}

namespace {

std::string zero_pad(long value, int width)
{
    std::string s = std::to_string(value);
    if (static_cast<int>(s.size()) < width)
        s.insert(0, width - s.size(), '0');
    return s;
}

bool is_valid_delta_strike(double k)
{
    return std::any_of(std::begin(kDeltaStrikes), std::end(kDeltaStrikes),
                       [k](double d) { return std::abs(d - k) < 1e-12; });
}

}  // namespace

std::string strike_key(double strike_delta)
{
    return text::format_fixed(strike_delta, 2);
}

std::string surface_key(double strike_delta, int tenor_days)
{
    return strike_key(strike_delta) + "|" + zero_pad(tenor_days, 3);
}

std::string descriptor_id(const UeiDescriptor& d)
{
    std::string id = zero_pad(d.underlying_pos, 2);
    id += '|';
    id += kind_code(d.kind);
    id += '|';
    id += d.strike_delta ? strike_key(*d.strike_delta) : "-";
    id += '|';
    id += d.tenor_days ? zero_pad(*d.tenor_days, 3) : "-";
    return id;
}

bool looks_like_descriptor_id(std::string_view id)
{
    auto parts = text::split(id, '|');
    return parts.size() == 4 && !parts[0].empty() &&
           std::all_of(parts[0].begin(), parts[0].end(), [](char c) { return c >= '0' && c <= '9'; });
}

UeiDescriptor parse_descriptor_id(std::string_view id)
{
    auto parts = text::split(id, '|');
    if (parts.size() != 4 || parts[1].size() != 1)
        throw SchemaError("malformed UEI id '" + std::string(id) + "'");
    UeiDescriptor d;
    d.underlying_pos = static_cast<int>(text::parse_int(parts[0], "UEI underlying position"));
    d.kind = kind_from_code(parts[1][0]);
    if (d.kind == InstrumentKind::Stock) {
        if (parts[2] != "-" || parts[3] != "-")
            throw SchemaError("stock UEI '" + std::string(id) + "' must not carry strike or tenor");
    } else {
        d.strike_delta = text::parse_double(parts[2], "UEI strike");
        d.tenor_days = static_cast<int>(text::parse_int(parts[3], "UEI tenor"));
        if (!is_valid_delta_strike(*d.strike_delta))
            throw SchemaError("UEI strike out of domain in '" + std::string(id) + "'");
    }
    if (d.underlying_pos < 1)
        throw SchemaError("UEI underlying position must be >= 1 in '" + std::string(id) + "'");
    return d;
}

std::vector<UnderlyingSpec> order_underlyings(std::vector<UnderlyingSpec> specs)
{
    std::stable_sort(specs.begin(), specs.end(), [](const UnderlyingSpec& a, const UnderlyingSpec& b) {
        return std::tie(a.category, a.ticker) < std::tie(b.category, b.ticker);
    });
    return specs;
}

namespace {

void validate_specs(const std::vector<UnderlyingSpec>& specs)
{
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (s.ticker.empty())
            throw ConfigError("underlying with empty ticker");
        if (!seen.insert(s.ticker).second)
            throw ConfigError("duplicate ticker '" + s.ticker + "'");
        if (s.tenor_domain.empty())
            throw ConfigError("empty tenor domain for '" + s.ticker + "'");
        for (std::size_t i = 0; i < s.tenor_domain.size(); ++i) {
            if (s.tenor_domain[i] <= 0)
                throw ConfigError("non-positive tenor for '" + s.ticker + "'");
            if (i > 0 && s.tenor_domain[i] <= s.tenor_domain[i - 1])
                throw ConfigError("tenor domain not strictly increasing for '" + s.ticker + "'");
        }
        if ((s.option_notional_bound && *s.option_notional_bound <= 0) ||
            (s.linear_notional_bound && *s.linear_notional_bound <= 0))
            throw ConfigError("notional bounds must be positive for '" + s.ticker + "'");
    }
}

}  // namespace

std::vector<UeiDescriptor> build_universe(const std::vector<UnderlyingSpec>& specs)
{
    validate_specs(specs);
    std::vector<UeiDescriptor> out;
    out.reserve(universe_size(specs));
    for (std::size_t l = 0; l < specs.size(); ++l) {
        const auto& spec = specs[l];
        const int pos = static_cast<int>(l) + 1;
        std::vector<InstrumentKind> kinds = {InstrumentKind::Call, InstrumentKind::Put};
        if (spec.category == UnderlyingCategory::StockIndex)
            kinds.push_back(InstrumentKind::Futures);
        for (auto kind : kinds)
            for (double k : kDeltaStrikes)
                for (int t : spec.tenor_domain)
                    out.push_back({pos, kind, k, t});
        if (spec.category == UnderlyingCategory::Stock)
            out.push_back({pos, InstrumentKind::Stock, std::nullopt, std::nullopt});
    }
    // Structural key equals the lexicographic order of the ids.
    std::sort(out.begin(), out.end(), [](const UeiDescriptor& a, const UeiDescriptor& b) {
        return std::make_tuple(a.underlying_pos, a.kind, a.strike_delta.value_or(-1), a.tenor_days.value_or(-1)) <
               std::make_tuple(b.underlying_pos, b.kind, b.strike_delta.value_or(-1), b.tenor_days.value_or(-1));
    });
    return out;
}

std::size_t universe_size(const std::vector<UnderlyingSpec>& specs)
{
    std::size_t n = 0;
    for (const auto& s : specs)
        n += s.category == UnderlyingCategory::Stock ? 6 * s.tenor_domain.size() + 1 : 9 * s.tenor_domain.size();
    return n;
}

std::string static_id(const StaticInstrument& inst)
{
    std::string id = inst.ticker;
    id += '|';
    id += kind_code(inst.kind);
    id += '|';
    id += inst.strike ? text::format_double(*inst.strike) : "-";
    id += '|';
    id += inst.tenor_days ? zero_pad(*inst.tenor_days, 3) : "-";
    id += '|';
    id += is_option(inst.kind) ? (inst.exercise == Exercise::American ? "A" : "E") : "-";
    return id;
}

StaticInstrument parse_static_id(std::string_view id)
{
    auto parts = text::split(id, '|');
    if (parts.size() != 5 || parts[0].empty() || parts[1].size() != 1)
        throw SchemaError("malformed instrument id '" + std::string(id) + "'");
    StaticInstrument inst;
    inst.ticker = std::string(parts[0]);
    inst.kind = kind_from_code(parts[1][0]);
    switch (inst.kind) {
    case InstrumentKind::Stock:
        break;
    case InstrumentKind::Futures:
        inst.tenor_days = static_cast<int>(text::parse_int(parts[3], "futures tenor"));
        break;
    case InstrumentKind::Call:
    case InstrumentKind::Put:
        inst.strike = text::parse_double(parts[2], "option strike");
        inst.tenor_days = static_cast<int>(text::parse_int(parts[3], "option tenor"));
        if (parts[4] == "A")
            inst.exercise = Exercise::American;
        else if (parts[4] != "E")
            throw SchemaError("option exercise must be E or A in '" + std::string(id) + "'");
        if (*inst.strike <= 0)
            throw SchemaError("non-positive strike in '" + std::string(id) + "'");
        break;
    }
    if (inst.tenor_days && *inst.tenor_days < 0)
        throw SchemaError("negative tenor in '" + std::string(id) + "'");
    return inst;
}

const UnderlyingMarket& MarketData::underlying(const std::string& ticker) const
{
    auto it = underlyings.find(ticker);
    if (it == underlyings.end())
        throw SchemaError("no market data for underlying '" + ticker + "'");
    return it->second;
}

const CurrencyMarket& MarketData::currency(const std::string& ccy) const
{
    auto it = currencies.find(ccy);
    if (it == currencies.end())
        throw SchemaError("no market data for currency '" + ccy + "'");
    return it->second;
}

double MarketData::vol_for(const std::string& ticker, std::optional<double> strike_delta,
                           std::optional<int> tenor_days) const
{
    const auto& u = underlying(ticker);
    if (strike_delta && tenor_days) {
        auto it = u.vol_surface.find(surface_key(*strike_delta, *tenor_days));
        if (it != u.vol_surface.end())
            return it->second;
    }
    return u.vol;
}

void MarketData::validate() const
{
    for (const auto& [ticker, u] : underlyings) {
        if (!(u.spot > 0))
            throw SchemaError("spot must be positive for '" + ticker + "'");
        if (!(u.vol > 0))
            throw SchemaError("vol must be positive for '" + ticker + "'");
        for (const auto& [key, v] : u.vol_surface)
            if (!(v > 0))
                throw SchemaError("vol must be positive for '" + ticker + "' at " + key);
        if (u.spot_spread < 0 || u.futures_spread < 0)
            throw SchemaError("spreads must be non-negative for '" + ticker + "'");
        for (const auto& [key, v] : u.vol_spread)
            if (v < 0)
                throw SchemaError("vol spread must be non-negative for '" + ticker + "' at " + key);
        if (!currencies.count(u.currency))
            throw SchemaError("unknown currency '" + u.currency + "' for '" + ticker + "'");
    }
    for (const auto& [ccy, c] : currencies)
        if (!(c.fx_eur > 0))
            throw SchemaError("fx_eur must be positive for '" + ccy + "'");
}

std::size_t ScenarioSet::ticker_index(const std::string& ticker) const
{
    auto it = std::find(tickers.begin(), tickers.end(), ticker);
    if (it == tickers.end())
        throw SchemaError("scenario set has no columns for underlying '" + ticker + "'");
    return static_cast<std::size_t>(it - tickers.begin());
}

std::size_t ScenarioSet::currency_index(const std::string& ccy) const
{
    auto it = std::find(currencies.begin(), currencies.end(), ccy);
    if (it == currencies.end())
        throw SchemaError("scenario set has no rate column for currency '" + ccy + "'");
    return static_cast<std::size_t>(it - currencies.begin());
}

namespace {

UnderlyingSpec make_spec(std::string ticker, UnderlyingCategory cat, std::vector<int> tenors,
                         std::int64_t option_bound, std::int64_t linear_bound)
{
    return {std::move(ticker), cat, std::move(tenors), option_bound, linear_bound};
}

}  // namespace

std::vector<UnderlyingSpec> reference_universe_specs()
{
    const std::vector<int> t6 = {21, 49, 84, 168, 266, 630};
    const std::vector<int> t7 = {21, 49, 112, 168, 266, 476, 630};
    const std::vector<int> t7b = {21, 49, 84, 168, 266, 476, 630};
    using C = UnderlyingCategory;
    return {
        make_spec("AXAF.PA", C::Stock, t6, 760'000, 340'000),
        make_spec("FB.O", C::Stock, t7, 120'000, 50'000),
        make_spec("GTO.AS", C::Stock, t6, 310'000, 160'000),
        make_spec("IBM.N", C::Stock, t7, 130'000, 60'000),
        make_spec("KO.N", C::Stock, t7, 410'000, 190'000),
        make_spec("ORCL.N", C::Stock, t7b, 370'000, 140'000),
        make_spec("PG.N", C::Stock, t7, 230'000, 110'000),
        make_spec("T.N", C::Stock, t7, 570'000, 280'000),
        make_spec(".FTMIB", C::StockIndex, t6, 800, 500),
        make_spec(".FTSE", C::StockIndex, t6, 2'000, 2'000),
        make_spec(".GSPC", C::StockIndex, t7b, 7'000, 3'000),
        make_spec(".NDX", C::StockIndex, t7b, 3'000, 1'000),
        make_spec(".STOXX50E", C::StockIndex, t6, 5'000, 3'000),
    };
}

std::vector<UnderlyingSpec> single_index_specs()
{
    return {make_spec(".STOXX50E", UnderlyingCategory::StockIndex, {21, 49, 84, 168, 266, 630}, 5'000, 3'000)};
}

}  // namespace ratpo
