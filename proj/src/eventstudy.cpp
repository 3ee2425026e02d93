#include "headlinecast/eventstudy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"

namespace hcast::eventstudy {

std::optional<double> PriceSeries::close_on(Date day) const {
    const auto it = std::lower_bound(observations.begin(), observations.end(), day,
                                     [](const auto& obs, Date d) { return obs.first < d; });
    if (it == observations.end() || it->first != day) return std::nullopt;
    return it->second;
}

std::optional<double> PriceSeries::close_before(Date day) const {
    const auto it = std::lower_bound(observations.begin(), observations.end(), day,
                                     [](const auto& obs, Date d) { return obs.first < d; });
    if (it == observations.begin()) return std::nullopt;
    return std::prev(it)->second;
}

void PriceSeries::validate() const {
    for (std::size_t i = 0; i < observations.size(); ++i) {
        if (observations[i].second <= 0.0) {
            throw DataError(fmt::format("price series {}: non-positive close {} on {}", isin,
                                        observations[i].second, observations[i].first.to_string()));
        }
        if (i > 0 && !(observations[i - 1].first < observations[i].first)) {
            throw DataError(fmt::format("price series {}: dates not strictly increasing at {}",
                                        isin, observations[i].first.to_string()));
        }
    }
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::down: return "down";
        case Direction::steady: return "steady";
        case Direction::up: return "up";
    }
    return "steady";
}

Direction direction_from_string(std::string_view s) {
    if (s == "down") return Direction::down;
    if (s == "steady") return Direction::steady;
    if (s == "up") return Direction::up;
    throw DataError(fmt::format("unknown direction label '{}'", s));
}

std::vector<std::pair<Date, double>> simple_returns(const PriceSeries& series) {
    if (series.observations.size() < 2) {
        throw DataError(fmt::format("need at least 2 observations to compute returns, got {}",
                                    series.observations.size()));
    }
    std::vector<std::pair<Date, double>> returns;
    returns.reserve(series.observations.size() - 1);
    for (std::size_t i = 1; i < series.observations.size(); ++i) {
        const double r = series.observations[i].second / series.observations[i - 1].second - 1.0;
        returns.emplace_back(series.observations[i].first, r);
    }
    return returns;
}

MarketModel fit_market_model(const std::vector<double>& stock_returns,
                             const std::vector<double>& market_returns) {
    const std::size_t n = stock_returns.size();
    if (n != market_returns.size()) {
        throw DataError(fmt::format("return series length mismatch: stock {} vs market {}", n,
                                    market_returns.size()));
    }
    if (n < 2) throw DataError(fmt::format("need at least 2 paired returns for OLS, got {}", n));

    const auto [mn, mx] = std::minmax_element(market_returns.begin(), market_returns.end());
    if (*mn == *mx) {
        throw DataError("degenerate regressor: market returns have zero variance");
    }

    // Normal equations of y = a + b*x, solved by Cramer's rule.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += market_returns[i];
        sy += stock_returns[i];
        sxx += market_returns[i] * market_returns[i];
        sxy += market_returns[i] * stock_returns[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx; // n^2 * variance of x
    if (det <= 0.0) {
        throw DataError("degenerate regressor: market return variance vanishes numerically");
    }
    MarketModel model;
    model.beta = (nn * sxy - sx * sy) / det;
    model.alpha = (sy * sxx - sx * sxy) / det;
    model.window_len = static_cast<int>(n);
    return model;
}

namespace {

struct AlignedReturns {
    std::vector<Date> dates;   // shared grid, from the second shared day on
    std::vector<double> stock; // parallel returns
    std::vector<double> market;
};

// Returns over the intersection of the two series' trading days.
AlignedReturns align_returns(const PriceSeries& stock, const PriceSeries& market) {
    AlignedReturns out;
    std::size_t i = 0, j = 0;
    bool have_prev = false;
    double prev_stock = 0.0, prev_market = 0.0;
    while (i < stock.observations.size() && j < market.observations.size()) {
        const Date ds = stock.observations[i].first;
        const Date dm = market.observations[j].first;
        if (ds < dm) {
            ++i;
        } else if (dm < ds) {
            ++j;
        } else {
            const double ps = stock.observations[i].second;
            const double pm = market.observations[j].second;
            if (have_prev) {
                out.dates.push_back(ds);
                out.stock.push_back(ps / prev_stock - 1.0);
                out.market.push_back(pm / prev_market - 1.0);
            }
            prev_stock = ps;
            prev_market = pm;
            have_prev = true;
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

AbnormalReturn abnormal_return_detail(const PriceSeries& stock, const PriceSeries& market,
                                      Date event_date, int window, ArMode mode) {
    if (!stock.close_on(event_date)) {
        throw DataError(fmt::format("event date {} not a trading day of stock series {}",
                                    event_date.to_string(), stock.isin));
    }
    if (!market.close_on(event_date)) {
        throw DataError(fmt::format("event date {} not a trading day of the market series",
                                    event_date.to_string()));
    }

    const AlignedReturns aligned = align_returns(stock, market);
    const auto it = std::find(aligned.dates.begin(), aligned.dates.end(), event_date);
    if (it == aligned.dates.end()) {
        throw DataError(fmt::format(
            "insufficient history: no shared trading day before event {} for {}",
            event_date.to_string(), stock.isin));
    }
    const std::size_t e = static_cast<std::size_t>(it - aligned.dates.begin());

    AbnormalReturn result;
    if (mode == ArMode::market_adjusted) {
        result.value = aligned.stock[e] - aligned.market[e];
        return result;
    }

    if (window < 2) throw ConfigError(fmt::format("market-model window must be >= 2, got {}", window));
    if (e < static_cast<std::size_t>(window)) {
        throw DataError(fmt::format(
            "insufficient history for {}: market-model mode needs {} shared trading days plus the "
            "prior close before event {}, found {} returns",
            stock.isin, window, event_date.to_string(), e));
    }
    const std::vector<double> win_stock(aligned.stock.begin() + (e - window),
                                        aligned.stock.begin() + e);
    const std::vector<double> win_market(aligned.market.begin() + (e - window),
                                         aligned.market.begin() + e);
    try {
        const MarketModel model = fit_market_model(win_stock, win_market);
        result.value = aligned.stock[e] - (model.alpha + model.beta * aligned.market[e]);
    } catch (const DataError&) {
        // Zero market variance over the window: fall back to market-adjusted.
        result.value = aligned.stock[e] - aligned.market[e];
        result.fell_back = true;
    }
    return result;
}

double abnormal_return(const PriceSeries& stock, const PriceSeries& market, Date event_date,
                       int window, ArMode mode) {
    return abnormal_return_detail(stock, market, event_date, window, mode).value;
}

Direction label_direction(double ar, double tau) {
    if (!std::isfinite(ar)) throw DataError(fmt::format("invalid abnormal return {}", ar));
    if (tau < 0.0) throw ConfigError(fmt::format("steady threshold tau must be >= 0, got {}", tau));
    if (ar > tau) return Direction::up;
    if (ar < -tau) return Direction::down;
    return Direction::steady;
}

PennyFilterResult filter_penny_stocks(const std::vector<LabeledSample>& samples,
                                      const PriceStore& prices, double floor) {
    PennyFilterResult result;
    result.kept.reserve(samples.size());
    for (const auto& sample : samples) {
        const auto series = prices.find(sample.isin);
        const std::optional<double> prior =
            series == prices.end() ? std::nullopt : series->second.close_before(sample.event_date);
        if (!prior) {
            ++result.excluded_missing_price;
            continue;
        }
        if (*prior < floor) { // strict: a close of exactly `floor` is retained
            ++result.excluded_below_floor;
            continue;
        }
        result.kept.push_back(sample);
    }
    return result;
}

SplitIndex chronological_split(const std::vector<LabeledSample>& samples, double train_fraction) {
    if (samples.size() < 2) {
        throw DataError(fmt::format("need at least 2 samples to split, got {}", samples.size()));
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError(fmt::format("train fraction must be in (0, 1), got {}", train_fraction));
    }

    std::vector<const LabeledSample*> order;
    order.reserve(samples.size());
    for (const auto& s : samples) order.push_back(&s);
    std::sort(order.begin(), order.end(), [](const LabeledSample* a, const LabeledSample* b) {
        if (a->event_date != b->event_date) return a->event_date < b->event_date;
        return a->headline_id < b->headline_id;
    });

    const auto n = order.size();
    // Round half up, then clamp so both sides stay non-empty.
    auto n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * train_fraction + 0.5));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    SplitIndex split;
    split.train_ids.reserve(n_train);
    split.test_ids.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? split.train_ids : split.test_ids).push_back(order[i]->headline_id);
    }
    split.boundary_date = order[n_train - 1]->event_date;
    return split;
}

} // namespace hcast::eventstudy
