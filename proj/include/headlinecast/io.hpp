#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "headlinecast/corpus.hpp"
#include "headlinecast/eventstudy.hpp"

namespace hcast::io {

/// Headlines: JSON Lines, one object per line with keys id, date
/// (YYYY-MM-DD), isin (12 characters), title. Loading validates id
/// uniqueness, date syntax, isin length, and non-blank titles.
std::vector<corpus::Headline> load_headlines(const std::filesystem::path& path);
void save_headlines(const std::filesystem::path& path, const std::vector<corpus::Headline>& headlines);

/// Per-security prices: CSV with header date,isin,close; rows may arrive in
/// any order and are grouped per isin, date-sorted, then validated.
eventstudy::PriceStore load_prices(const std::filesystem::path& path);
void save_prices(const std::filesystem::path& path, const eventstudy::PriceStore& prices);

/// Market index: CSV with header date,close.
eventstudy::PriceSeries load_market(const std::filesystem::path& path);
void save_market(const std::filesystem::path& path, const eventstudy::PriceSeries& market);

/// Labeled events: JSON Lines with keys id, date, isin, abnormal_return,
/// label (down/steady/up).
std::vector<eventstudy::LabeledSample> load_labeled(const std::filesystem::path& path);
void save_labeled(const std::filesystem::path& path,
                  const std::vector<eventstudy::LabeledSample>& samples);

/// Token lists: JSON Lines with keys id, tokens.
std::vector<corpus::TokenSequence> load_tokens(const std::filesystem::path& path);
void save_tokens(const std::filesystem::path& path,
                 const std::vector<corpus::TokenSequence>& sequences);

/// Train/test partition: one JSON object with boundary_date, train_ids,
/// test_ids.
eventstudy::SplitIndex load_split(const std::filesystem::path& path);
void save_split(const std::filesystem::path& path, const eventstudy::SplitIndex& split);

/// One scored sample: predicted class name plus the full probability (or
/// vote-fraction) vector in class-index order.
struct Prediction {
    std::string id;
    std::string predicted;
    std::vector<double> probabilities;
};

/// Predictions: JSON Lines with keys id, predicted, probabilities.
std::vector<Prediction> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);

/// Sparse document-term matrix as text triplets "doc_id,term,weight", rows
/// in document order, entries in column order, weights full precision.
void save_dtm(const std::filesystem::path& path, const corpus::DocumentTermMatrix& dtm,
              const std::vector<std::string>& doc_ids);

/// One lowercase word per line; blank lines and lines starting with '#'
/// are skipped.
corpus::StopwordSet load_stopword_file(const std::filesystem::path& path);

} // namespace hcast::io
