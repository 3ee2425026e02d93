#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "headlinecast/date.hpp"

namespace hcast::corpus {

/// One timestamped disclosure title tied to a security identifier.
struct Headline {
    std::string id;    // unique within a corpus
    Date timestamp;    // UTC trading day
    std::string isin;  // 12-character security identifier
    std::string title; // raw text, non-empty after trimming
};

/// Ordered lowercase tokens of one headline. Tokens never contain digits,
/// punctuation, or whitespace, and never match the active stopword list.
struct TokenSequence {
    std::string headline_id;
    std::vector<std::string> tokens;
};

using StopwordSet = std::unordered_set<std::string>;

/// The stopword list compiled into the library; data/stopwords.txt ships the
/// same terms and a config file path can override both.
const std::vector<std::string>& default_stopword_list();
StopwordSet default_stopwords();

/// Lowercases, splits on anything that is not an ASCII letter or digit,
/// drops tokens containing digits, then drops stopwords. Order preserved.
/// An empty result is valid; the caller decides whether to skip the document.
std::vector<std::string> tokenize(std::string_view title, const StopwordSet& stopwords);

/// Distinct retained terms of a corpus, in lexicographic order, plus the
/// per-term document frequencies the idf weights are computed from.
struct Vocabulary {
    std::vector<std::string> terms;  // lexicographically ordered
    std::vector<int> doc_freq;       // parallel to terms
    int n_docs = 0;

    std::size_t size() const { return terms.size(); }

    /// Column index of a term, or nullopt when the term was filtered out.
    std::optional<int> index_of(std::string_view term) const;
};

/// Keeps exactly the terms appearing in at least min_df documents.
/// Throws DataError when no term survives, naming min_df.
Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, int min_df);

/// One sparse document row: (column index, weight) pairs in ascending
/// column order. Absent columns read as zero.
using SparseRow = std::vector<std::pair<int, double>>;

enum class Weighting { raw_counts, tfidf };

/// Sparse document-term matrix over a fixed vocabulary.
struct DocumentTermMatrix {
    std::vector<SparseRow> rows;
    std::shared_ptr<const Vocabulary> vocab;
    Weighting weighting = Weighting::raw_counts;
};

/// Raw occurrence counts; out-of-vocabulary tokens are ignored.
DocumentTermMatrix count_matrix(const std::vector<TokenSequence>& sequences,
                                std::shared_ptr<const Vocabulary> vocab);

/// Counts for a single document against an existing vocabulary.
SparseRow count_row(const std::vector<std::string>& tokens, const Vocabulary& vocab);

/// w(t,d) = tf(t,d) * ln(N / df(t)); natural log, no smoothing, no row
/// normalization. Pure: the input matrix is left untouched. A term present
/// in every document weighs exactly zero in every row.
DocumentTermMatrix tfidf_transform(const DocumentTermMatrix& counts);

/// tf-idf weights for one externally counted row (used at prediction time,
/// where idf comes from the training vocabulary).
SparseRow tfidf_row(const SparseRow& count_row, const Vocabulary& vocab);

} // namespace hcast::corpus
