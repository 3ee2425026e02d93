#include "headlinecast/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "headlinecast/errors.hpp"
#include "headlinecast/jsonio.hpp"

namespace hcast::io {
namespace {

using nlohmann::json;

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(fmt::format("cannot write {}", path.string()));
    return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw DataError(fmt::format("short write to {}", path.string()));
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Applies `fn` to every non-blank line; line numbers are 1-based.
template <typename Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in = open_in(path);
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (trimmed(line).empty()) continue;
        fn(line, line_no);
    }
}

json parse_jsonl_line(const std::string& line, const std::filesystem::path& path, int line_no) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object())
        throw DataError(fmt::format("{}:{}: not a JSON object", path.string(), line_no));
    return j;
}

const json& field(const json& j, const char* key, const std::filesystem::path& path, int line_no) {
    auto it = j.find(key);
    if (it == j.end())
        throw DataError(fmt::format("{}:{}: missing key \"{}\"", path.string(), line_no, key));
    return *it;
}

Date parse_date_field(const json& j, const char* key, const std::filesystem::path& path,
                      int line_no) {
    const auto text = field(j, key, path, line_no).get<std::string>();
    const auto date = Date::try_parse(text);
    if (!date)
        throw DataError(fmt::format("{}:{}: bad date \"{}\"", path.string(), line_no, text));
    return *date;
}

double parse_double_text(std::string_view text, const std::filesystem::path& path, int line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw DataError(fmt::format("{}:{}: bad number \"{}\"", path.string(), line_no, text));
    return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trimmed(line.substr(start)));
            return fields;
        }
        fields.push_back(trimmed(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

/// CSV loader shared by the two price formats: validates the header, then
/// hands the parsed fields of every data row to `fn`.
template <typename Fn>
void for_each_csv_row(const std::filesystem::path& path, std::string_view expected_header,
                      std::size_t n_fields, Fn&& fn) {
    bool saw_header = false;
    for_each_line(path, [&](const std::string& line, int line_no) {
        if (!saw_header) {
            if (trimmed(line) != expected_header)
                throw DataError(fmt::format("{}:1: expected header \"{}\", found \"{}\"",
                                            path.string(), expected_header, trimmed(line)));
            saw_header = true;
            return;
        }
        const auto fields = split_csv(trimmed(line));
        if (fields.size() != n_fields)
            throw DataError(fmt::format("{}:{}: expected {} fields, found {}", path.string(),
                                        line_no, n_fields, fields.size()));
        fn(fields, line_no);
    });
    if (!saw_header) throw DataError(fmt::format("{} is empty", path.string()));
}

Date parse_date_text(std::string_view text, const std::filesystem::path& path, int line_no) {
    const auto date = Date::try_parse(text);
    if (!date) throw DataError(fmt::format("{}:{}: bad date \"{}\"", path.string(), line_no, text));
    return *date;
}

void sort_and_check_series(eventstudy::PriceSeries& series, const std::filesystem::path& path) {
    std::sort(series.observations.begin(), series.observations.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < series.observations.size(); ++i)
        if (series.observations[i - 1].first == series.observations[i].first)
            throw DataError(fmt::format("{}: duplicate price for {} on {}", path.string(),
                                        series.isin.empty() ? "market" : series.isin,
                                        series.observations[i].first.to_string()));
    series.validate();
}

} // namespace

std::vector<corpus::Headline> load_headlines(const std::filesystem::path& path) {
    std::vector<corpus::Headline> headlines;
    std::unordered_set<std::string> seen_ids;
    for_each_line(path, [&](const std::string& line, int line_no) {
        const json j = parse_jsonl_line(line, path, line_no);
        corpus::Headline h;
        h.id = field(j, "id", path, line_no).get<std::string>();
        h.timestamp = parse_date_field(j, "date", path, line_no);
        h.isin = field(j, "isin", path, line_no).get<std::string>();
        h.title = field(j, "title", path, line_no).get<std::string>();
        if (h.id.empty()) throw DataError(fmt::format("{}:{}: empty id", path.string(), line_no));
        if (!seen_ids.insert(h.id).second)
            throw DataError(fmt::format("{}:{}: duplicate id \"{}\"", path.string(), line_no, h.id));
        if (h.isin.size() != 12)
            throw DataError(fmt::format("{}:{}: isin \"{}\" is not 12 characters", path.string(),
                                        line_no, h.isin));
        if (trimmed(h.title).empty())
            throw DataError(fmt::format("{}:{}: blank title for id \"{}\"", path.string(), line_no, h.id));
        headlines.push_back(std::move(h));
    });
    if (headlines.empty()) throw DataError(fmt::format("{} holds no headlines", path.string()));
    return headlines;
}

void save_headlines(const std::filesystem::path& path,
                    const std::vector<corpus::Headline>& headlines) {
    std::ofstream out = open_out(path);
    for (const corpus::Headline& h : headlines)
        out << json{{"id", h.id},
                    {"date", h.timestamp.to_string()},
                    {"isin", h.isin},
                    {"title", h.title}}
                   .dump()
            << '\n';
    finish_out(out, path);
}

eventstudy::PriceStore load_prices(const std::filesystem::path& path) {
    eventstudy::PriceStore store;
    for_each_csv_row(path, "date,isin,close", 3, [&](const auto& fields, int line_no) {
        const Date date = parse_date_text(fields[0], path, line_no);
        const std::string isin(fields[1]);
        const double close = parse_double_text(fields[2], path, line_no);
        auto& series = store[isin];
        series.isin = isin;
        series.observations.emplace_back(date, close);
    });
    if (store.empty()) throw DataError(fmt::format("{} holds no prices", path.string()));
    for (auto& [isin, series] : store) sort_and_check_series(series, path);
    return store;
}

void save_prices(const std::filesystem::path& path, const eventstudy::PriceStore& prices) {
    std::ofstream out = open_out(path);
    out << "date,isin,close\n";
    std::vector<std::string> isins;
    isins.reserve(prices.size());
    for (const auto& [isin, series] : prices) isins.push_back(isin);
    std::sort(isins.begin(), isins.end());
    for (const std::string& isin : isins)
        for (const auto& [date, close] : prices.at(isin).observations)
            out << fmt::format("{},{},{:.6f}\n", date.to_string(), isin, close);
    finish_out(out, path);
}

eventstudy::PriceSeries load_market(const std::filesystem::path& path) {
    eventstudy::PriceSeries series;
    series.isin = "MARKET";
    for_each_csv_row(path, "date,close", 2, [&](const auto& fields, int line_no) {
        const Date date = parse_date_text(fields[0], path, line_no);
        const double close = parse_double_text(fields[1], path, line_no);
        series.observations.emplace_back(date, close);
    });
    if (series.observations.empty()) throw DataError(fmt::format("{} holds no prices", path.string()));
    sort_and_check_series(series, path);
    return series;
}

void save_market(const std::filesystem::path& path, const eventstudy::PriceSeries& market) {
    std::ofstream out = open_out(path);
    out << "date,close\n";
    for (const auto& [date, close] : market.observations)
        out << fmt::format("{},{:.6f}\n", date.to_string(), close);
    finish_out(out, path);
}

std::vector<eventstudy::LabeledSample> load_labeled(const std::filesystem::path& path) {
    std::vector<eventstudy::LabeledSample> samples;
    for_each_line(path, [&](const std::string& line, int line_no) {
        const json j = parse_jsonl_line(line, path, line_no);
        eventstudy::LabeledSample s;
        s.headline_id = field(j, "id", path, line_no).get<std::string>();
        s.event_date = parse_date_field(j, "date", path, line_no);
        s.isin = field(j, "isin", path, line_no).get<std::string>();
        s.abnormal_return = field(j, "abnormal_return", path, line_no).get<double>();
        const auto label = field(j, "label", path, line_no).get<std::string>();
        try {
            s.direction = eventstudy::direction_from_string(label);
        } catch (const DataError&) {
            throw DataError(fmt::format("{}:{}: unknown label \"{}\"", path.string(), line_no, label));
        }
        samples.push_back(std::move(s));
    });
    return samples;
}

void save_labeled(const std::filesystem::path& path,
                  const std::vector<eventstudy::LabeledSample>& samples) {
    std::ofstream out = open_out(path);
    for (const eventstudy::LabeledSample& s : samples)
        out << json{{"id", s.headline_id},
                    {"date", s.event_date.to_string()},
                    {"isin", s.isin},
                    {"abnormal_return", s.abnormal_return},
                    {"label", eventstudy::to_string(s.direction)}}
                   .dump()
            << '\n';
    finish_out(out, path);
}

std::vector<corpus::TokenSequence> load_tokens(const std::filesystem::path& path) {
    std::vector<corpus::TokenSequence> sequences;
    for_each_line(path, [&](const std::string& line, int line_no) {
        const json j = parse_jsonl_line(line, path, line_no);
        corpus::TokenSequence seq;
        seq.headline_id = field(j, "id", path, line_no).get<std::string>();
        seq.tokens = field(j, "tokens", path, line_no).get<std::vector<std::string>>();
        sequences.push_back(std::move(seq));
    });
    return sequences;
}

void save_tokens(const std::filesystem::path& path,
                 const std::vector<corpus::TokenSequence>& sequences) {
    std::ofstream out = open_out(path);
    for (const corpus::TokenSequence& seq : sequences)
        out << json{{"id", seq.headline_id}, {"tokens", seq.tokens}}.dump() << '\n';
    finish_out(out, path);
}

eventstudy::SplitIndex load_split(const std::filesystem::path& path) {
    const json j = jsonio::load_file(path);
    eventstudy::SplitIndex split;
    split.train_ids = field(j, "train_ids", path, 1).get<std::vector<std::string>>();
    split.test_ids = field(j, "test_ids", path, 1).get<std::vector<std::string>>();
    split.boundary_date = parse_date_field(j, "boundary_date", path, 1);
    return split;
}

void save_split(const std::filesystem::path& path, const eventstudy::SplitIndex& split) {
    jsonio::write_file(path, json{{"boundary_date", split.boundary_date.to_string()},
                                  {"train_ids", split.train_ids},
                                  {"test_ids", split.test_ids}});
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
    std::vector<Prediction> predictions;
    for_each_line(path, [&](const std::string& line, int line_no) {
        const json j = parse_jsonl_line(line, path, line_no);
        Prediction p;
        p.id = field(j, "id", path, line_no).get<std::string>();
        p.predicted = field(j, "predicted", path, line_no).get<std::string>();
        p.probabilities = field(j, "probabilities", path, line_no).get<std::vector<double>>();
        predictions.push_back(std::move(p));
    });
    return predictions;
}

void save_predictions(const std::filesystem::path& path,
                      const std::vector<Prediction>& predictions) {
    std::ofstream out = open_out(path);
    for (const Prediction& p : predictions)
        out << json{{"id", p.id}, {"predicted", p.predicted}, {"probabilities", p.probabilities}}
                   .dump()
            << '\n';
    finish_out(out, path);
}

void save_dtm(const std::filesystem::path& path, const corpus::DocumentTermMatrix& dtm,
              const std::vector<std::string>& doc_ids) {
    if (doc_ids.size() != dtm.rows.size())
        throw DataError(fmt::format("{} document ids for {} matrix rows", doc_ids.size(),
                                    dtm.rows.size()));
    std::ofstream out = open_out(path);
    out << "doc_id,term,weight\n";
    for (std::size_t r = 0; r < dtm.rows.size(); ++r)
        for (const auto& [col, weight] : dtm.rows[r])
            out << fmt::format("{},{},{}\n", doc_ids[r], dtm.vocab->terms[col], weight);
    finish_out(out, path);
}

corpus::StopwordSet load_stopword_file(const std::filesystem::path& path) {
    corpus::StopwordSet words;
    for_each_line(path, [&](const std::string& line, int) {
        std::string_view word = trimmed(line);
        if (word.empty() || word.front() == '#') return;
        std::string lowered(word);
        for (char& c : lowered)
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        words.insert(std::move(lowered));
    });
    if (words.empty()) throw DataError(fmt::format("{} holds no stopwords", path.string()));
    return words;
}

} // namespace hcast::io
