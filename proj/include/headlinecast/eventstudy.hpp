#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "headlinecast/date.hpp"

namespace hcast::eventstudy {

/// Date-ordered adjusted close prices for one security. Dates are strictly
/// increasing and prices strictly positive.
struct PriceSeries {
    std::string isin;
    std::vector<std::pair<Date, double>> observations;

    /// Close on the given day, or nullopt when it is not a trading day of
    /// this series.
    std::optional<double> close_on(Date day) const;

    /// Close on the last trading day strictly before `day`.
    std::optional<double> close_before(Date day) const;

    /// Validates ordering and positivity; throws DataError otherwise.
    void validate() const;
};

using PriceStore = std::unordered_map<std::string, PriceSeries>;

/// OLS fit of stock returns on market returns over an estimation window.
struct MarketModel {
    double alpha = 0.0; // intercept, daily return units
    double beta = 0.0;  // slope, dimensionless
    int window_len = 0; // number of estimation days
};

enum class ArMode {
    market_model,    // AR = r - (alpha + beta * r_market), OLS over a window
    market_adjusted, // AR = r - r_market
};

enum class Direction { down, steady, up };

std::string to_string(Direction d);
Direction direction_from_string(std::string_view s);

/// Headline joined with its event-day abnormal return and direction class.
struct LabeledSample {
    std::string headline_id;
    Date event_date;
    std::string isin;
    double abnormal_return = 0.0;
    Direction direction = Direction::steady;
};

/// r_t = p_t / p_{t-1} - 1 over consecutive observations.
/// Throws DataError with fewer than two observations.
std::vector<std::pair<Date, double>> simple_returns(const PriceSeries& series);

/// Ordinary least squares of stock returns on market returns. Throws
/// DataError on length mismatch, fewer than two points, or zero market
/// variance (degenerate regressor; callers fall back to market-adjusted).
MarketModel fit_market_model(const std::vector<double>& stock_returns,
                             const std::vector<double>& market_returns);

struct AbnormalReturn {
    double value = 0.0;
    /// True when market-model mode hit a zero-variance estimation window
    /// and the market-adjusted fallback was used instead.
    bool fell_back = false;
};

/// Abnormal return of `stock` on event_date against `market`. Returns are
/// computed on the shared trading-day grid of the two series. In
/// market-model mode alpha and beta are fit on the `window` shared trading
/// days ending the day before the event.
AbnormalReturn abnormal_return_detail(const PriceSeries& stock, const PriceSeries& market,
                                      Date event_date, int window,
                                      ArMode mode = ArMode::market_model);

double abnormal_return(const PriceSeries& stock, const PriceSeries& market, Date event_date,
                       int window, ArMode mode = ArMode::market_model);

/// up when ar > tau, down when ar < -tau, steady otherwise.
Direction label_direction(double ar, double tau);

struct PennyFilterResult {
    std::vector<LabeledSample> kept;
    int excluded_below_floor = 0;
    int excluded_missing_price = 0;
};

/// Removes samples whose close on the last trading day strictly before the
/// event is strictly below `floor`. A missing prior-day price also removes
/// the sample; both removals are tallied, never raised.
PennyFilterResult filter_penny_stocks(const std::vector<LabeledSample>& samples,
                                      const PriceStore& prices, double floor);

/// Chronological train/test partition.
struct SplitIndex {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
    Date boundary_date;
};

/// Sorts by (event_date, id) and sends the first round(n * fraction)
/// samples to train, the rest to test. Both sides stay non-empty.
SplitIndex chronological_split(const std::vector<LabeledSample>& samples, double train_fraction);

} // namespace hcast::eventstudy
