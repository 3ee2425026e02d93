#include "headlinecast/synth.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"
#include "headlinecast/eval.hpp"
#include "headlinecast/io.hpp"
#include "headlinecast/rng.hpp"

namespace hcast::synth {
namespace {

// Three lowercase letters per index: aaa, aab, ... Keeps generated terms
// free of digits so the tokenizer never drops them.
std::string alpha_suffix(int k) {
    std::string s(3, 'a');
    s[2] = static_cast<char>('a' + k % 26);
    s[1] = static_cast<char>('a' + (k / 26) % 26);
    s[0] = static_cast<char>('a' + (k / 676) % 26);
    return s;
}

// Filler words sprinkled between content terms, common function words a
// stopword pass removes again.
const std::vector<std::string>& glue_words() {
    static const std::vector<std::string> words = {"the", "of", "on", "in",
                                                   "for", "and", "to", "at"};
    return words;
}

std::vector<Date> weekdays_between(Date first, Date last) {
    std::vector<Date> days;
    for (Date d = first; d <= last; d = d.plus_days(1))
        if (d.is_weekday()) days.push_back(d);
    return days;
}

std::vector<Date> weekdays_before(Date day, int count) {
    std::vector<Date> days;
    for (Date d = day.plus_days(-1); static_cast<int>(days.size()) < count; d = d.plus_days(-1))
        if (d.is_weekday()) days.push_back(d);
    std::reverse(days.begin(), days.end());
    return days;
}

double stored_price(double value) {
    // Prices are persisted with six decimals; keeping the in-memory series
    // identical to its file form makes the two usage paths agree exactly.
    const double rounded = eval::round_half_up(value, 6);
    return rounded > 0.0 ? rounded : 1e-6;
}

std::string capitalized(std::string word) {
    if (!word.empty() && word.front() >= 'a' && word.front() <= 'z')
        word.front() = static_cast<char>(word.front() - 'a' + 'A');
    return word;
}

} // namespace

TermPools term_pools(const SyntheticSpec& spec) {
    TermPools pools;
    pools.up.reserve(spec.signal_terms_per_class);
    pools.down.reserve(spec.signal_terms_per_class);
    pools.neutral.reserve(spec.neutral_terms);
    for (int k = 0; k < spec.signal_terms_per_class; ++k) {
        pools.up.push_back("gain" + alpha_suffix(k));
        pools.down.push_back("drop" + alpha_suffix(k));
    }
    for (int k = 0; k < spec.neutral_terms; ++k) pools.neutral.push_back("word" + alpha_suffix(k));
    return pools;
}

void validate(const SyntheticSpec& spec) {
    if (spec.n_headlines < 1)
        throw ConfigError(fmt::format("n_headlines must be >= 1, got {}", spec.n_headlines));
    if (spec.signal_terms_per_class < 1)
        throw ConfigError(fmt::format("signal_terms_per_class must be >= 1, got {}",
                                      spec.signal_terms_per_class));
    if (spec.signal_terms_per_class > 26 * 26 * 26 || spec.neutral_terms > 26 * 26 * 26)
        throw ConfigError("term pools are limited to 17576 generated words");
    if (spec.neutral_terms < 1)
        throw ConfigError(fmt::format("neutral_terms must be >= 1, got {}", spec.neutral_terms));
    if (!(spec.signal_strength > 0.5 && spec.signal_strength <= 1.0))
        throw ConfigError(
            fmt::format("signal_strength must lie in (0.5, 1], got {}", spec.signal_strength));
    if (spec.end < spec.start)
        throw ConfigError(fmt::format("end {} precedes start {}", spec.end.to_string(),
                                      spec.start.to_string()));
    if (!(spec.volatility > 0.0))
        throw ConfigError(fmt::format("volatility must be positive, got {}", spec.volatility));
    if (!(spec.jump > 0.0))
        throw ConfigError(fmt::format("jump must be positive, got {}", spec.jump));
    if (spec.tau < 0.0) throw ConfigError(fmt::format("tau must be >= 0, got {}", spec.tau));
    if (!(spec.jump > spec.tau))
        throw ConfigError(fmt::format(
            "jump {} must exceed tau {}: planted moves could otherwise label steady or opposite",
            spec.jump, spec.tau));
    if (spec.n_isins < 1)
        throw ConfigError(fmt::format("n_isins must be >= 1, got {}", spec.n_isins));
    if (spec.history_days < 1)
        throw ConfigError(fmt::format("history_days must be >= 1, got {}", spec.history_days));
}

SyntheticCorpus generate(const SyntheticSpec& spec) {
    validate(spec);

    const std::vector<Date> in_range = weekdays_between(spec.start, spec.end);
    if (in_range.empty())
        throw ConfigError(fmt::format("no weekdays between {} and {}", spec.start.to_string(),
                                      spec.end.to_string()));
    std::vector<Date> calendar = weekdays_before(spec.start, spec.history_days);
    const int history = static_cast<int>(calendar.size());
    calendar.insert(calendar.end(), in_range.begin(), in_range.end());
    const int n_days = static_cast<int>(calendar.size());
    const int n_eligible = static_cast<int>(in_range.size());

    const long long capacity =
        static_cast<long long>(spec.n_isins) * static_cast<long long>(n_eligible);
    if (spec.n_headlines > capacity)
        throw ConfigError(fmt::format(
            "{} headlines do not fit into {} isins x {} trading days with one event per pair",
            spec.n_headlines, spec.n_isins, n_eligible));

    const TermPools pools = term_pools(spec);
    Rng rng(spec.seed);

    // 1. Market index: multiplicative walk from 100.
    std::vector<double> market_returns(n_days, 0.0);
    for (int t = 1; t < n_days; ++t)
        market_returns[t] = std::clamp(rng.normal(0.0, spec.volatility), -0.5, 0.5);

    SyntheticCorpus out;
    out.market.isin = "MARKET";
    out.market.observations.reserve(n_days);
    double market_close = 100.0;
    for (int t = 0; t < n_days; ++t) {
        if (t > 0) market_close *= 1.0 + market_returns[t];
        out.market.observations.emplace_back(calendar[t], stored_price(market_close));
    }

    // 2. Event schedule: distinct (isin, trading day) pairs, one headline
    // each, laid out chronologically; then a planted direction per event.
    struct Event {
        int day = 0; // index into `calendar`
        int isin = 0;
        bool up = false;
    };
    std::vector<Event> events;
    events.reserve(spec.n_headlines);
    for (int pick : rng.sample_indices(spec.n_isins * n_eligible, spec.n_headlines))
        events.push_back({history + pick % n_eligible, pick / n_eligible, false});
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.day != b.day ? a.day < b.day : a.isin < b.isin;
    });
    for (Event& ev : events) ev.up = rng.uniform01() < 0.5;

    std::vector<std::map<int, double>> jumps(spec.n_isins); // isin -> day -> signed move
    for (const Event& ev : events) jumps[ev.isin][ev.day] = ev.up ? spec.jump : -spec.jump;

    // 3. Per-security price paths riding the market with idiosyncratic
    // noise; scheduled days add the signed jump.
    for (int s = 0; s < spec.n_isins; ++s) {
        eventstudy::PriceSeries series;
        series.isin = fmt::format("SYN{:09d}", s);
        series.observations.reserve(n_days);
        const double beta = 0.8 + 0.4 * rng.uniform01();
        double close = 20.0 + 100.0 * rng.uniform01();
        for (int t = 0; t < n_days; ++t) {
            if (t > 0) {
                double r = beta * market_returns[t] + rng.normal(0.0, spec.volatility);
                if (auto it = jumps[s].find(t); it != jumps[s].end()) r += it->second;
                close *= 1.0 + std::clamp(r, -0.5, 0.5);
            }
            series.observations.emplace_back(calendar[t], stored_price(close));
        }
        out.prices.emplace(series.isin, std::move(series));
    }

    // 4. Titles: three signal tokens (own pool with probability
    // signal_strength, otherwise the opposite pool), neutral filler, glue
    // words, occasionally a digit token, shuffled and lightly styled.
    for (std::size_t h = 0; h < events.size(); ++h) {
        const Event& ev = events[h];
        const std::vector<std::string>& own = ev.up ? pools.up : pools.down;
        const std::vector<std::string>& other = ev.up ? pools.down : pools.up;

        std::vector<std::string> words;
        for (int k = 0; k < 3; ++k) {
            const auto& pool = rng.uniform01() < spec.signal_strength ? own : other;
            words.push_back(pool[rng.below(pool.size())]);
        }
        const int n_neutral = 2 + static_cast<int>(rng.below(3));
        for (int k = 0; k < n_neutral; ++k)
            words.push_back(pools.neutral[rng.below(pools.neutral.size())]);
        const int n_glue = 1 + static_cast<int>(rng.below(2));
        for (int k = 0; k < n_glue; ++k) words.push_back(glue_words()[rng.below(glue_words().size())]);
        if (rng.uniform01() < 0.3) {
            switch (rng.below(3)) {
            case 0: words.push_back(fmt::format("q{}", 1 + rng.below(4))); break;
            case 1: words.push_back(fmt::format("{}", 1998 + rng.below(14))); break;
            default: words.push_back(fmt::format("{},{:03d}", 1 + rng.below(9), rng.below(1000)));
            }
        }
        rng.shuffle(words);
        for (std::string& w : words)
            if (rng.uniform01() < 0.15) w = capitalized(std::move(w));
        words.front() = capitalized(std::move(words.front()));

        std::string title = words.front();
        for (std::size_t k = 1; k < words.size(); ++k) {
            title += ' ';
            title += words[k];
        }
        if (rng.uniform01() < 0.2) title += '.';

        corpus::Headline headline;
        headline.id = fmt::format("H{:06d}", h + 1);
        headline.timestamp = calendar[ev.day];
        headline.isin = fmt::format("SYN{:09d}", ev.isin);
        headline.title = std::move(title);
        out.headlines.push_back(std::move(headline));

        eventstudy::LabeledSample planted;
        planted.headline_id = out.headlines.back().id;
        planted.event_date = out.headlines.back().timestamp;
        planted.isin = out.headlines.back().isin;
        planted.abnormal_return = ev.up ? spec.jump : -spec.jump;
        planted.direction = ev.up ? eventstudy::Direction::up : eventstudy::Direction::down;
        out.planted.push_back(std::move(planted));
    }

    return out;
}

void write_corpus(const std::filesystem::path& dir, const SyntheticCorpus& corpus) {
    std::filesystem::create_directories(dir);
    io::save_headlines(dir / "headlines.jsonl", corpus.headlines);
    io::save_prices(dir / "prices.csv", corpus.prices);
    io::save_market(dir / "market.csv", corpus.market);
    io::save_labeled(dir / "planted_labels.jsonl", corpus.planted);
}

} // namespace hcast::synth
