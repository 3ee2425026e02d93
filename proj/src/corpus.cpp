#include "headlinecast/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "headlinecast/errors.hpp"

namespace hcast::corpus {

namespace {

inline bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

} // namespace

std::vector<std::string> tokenize(std::string_view title, const StopwordSet& stopwords) {
    std::vector<std::string> out;
    std::string current;
    bool has_digit = false;
    auto flush = [&] {
        if (!current.empty() && !has_digit && stopwords.find(current) == stopwords.end()) {
            out.push_back(current);
        }
        current.clear();
        has_digit = false;
    };
    // Candidate tokens are maximal runs of ASCII letters and digits; every
    // other byte separates. A candidate containing any digit is dropped
    // whole ("4,000" splits at the comma and both halves are dropped).
    for (char c : title) {
        if (is_ascii_letter(c)) {
            current.push_back(to_lower_ascii(c));
        } else if (is_ascii_digit(c)) {
            current.push_back(c);
            has_digit = true;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::optional<int> Vocabulary::index_of(std::string_view term) const {
    const auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return std::nullopt;
    return static_cast<int>(it - terms.begin());
}

Vocabulary build_vocabulary(const std::vector<TokenSequence>& sequences, int min_df) {
    if (min_df < 1) throw ConfigError(fmt::format("min_df must be >= 1, got {}", min_df));
    if (sequences.empty()) throw DataError("cannot build a vocabulary from zero documents");

    // std::map keeps terms lexicographically ordered, which fixes the
    // column order of every matrix built from this vocabulary.
    std::map<std::string, int> df;
    for (const auto& seq : sequences) {
        std::unordered_map<std::string_view, bool> seen;
        for (const auto& tok : seq.tokens) {
            if (seen.emplace(tok, true).second) df[tok] += 1;
        }
    }

    Vocabulary vocab;
    vocab.n_docs = static_cast<int>(sequences.size());
    for (const auto& [term, count] : df) {
        if (count >= min_df) {
            vocab.terms.push_back(term);
            vocab.doc_freq.push_back(count);
        }
    }
    if (vocab.terms.empty()) {
        throw DataError(fmt::format(
            "empty vocabulary: no term reaches document frequency min_df={} over {} documents",
            min_df, vocab.n_docs));
    }
    return vocab;
}

SparseRow count_row(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    std::map<int, int> counts;
    for (const auto& tok : tokens) {
        if (auto col = vocab.index_of(tok)) counts[*col] += 1;
    }
    SparseRow row;
    row.reserve(counts.size());
    for (const auto& [col, n] : counts) row.emplace_back(col, static_cast<double>(n));
    return row;
}

DocumentTermMatrix count_matrix(const std::vector<TokenSequence>& sequences,
                                std::shared_ptr<const Vocabulary> vocab) {
    if (!vocab) throw DataError("count_matrix: missing vocabulary");
    DocumentTermMatrix dtm;
    dtm.vocab = std::move(vocab);
    dtm.weighting = Weighting::raw_counts;
    dtm.rows.reserve(sequences.size());
    for (const auto& seq : sequences) {
        dtm.rows.push_back(count_row(seq.tokens, *dtm.vocab));
    }
    return dtm;
}

SparseRow tfidf_row(const SparseRow& counts, const Vocabulary& vocab) {
    SparseRow out;
    out.reserve(counts.size());
    for (const auto& [col, tf] : counts) {
        if (col < 0 || col >= static_cast<int>(vocab.size())) {
            throw DataError(fmt::format("tf-idf: column {} outside vocabulary of size {}", col,
                                        vocab.size()));
        }
        const int df = vocab.doc_freq[static_cast<std::size_t>(col)];
        if (df <= 0 || df > vocab.n_docs) {
            throw DataError(fmt::format(
                "tf-idf: inconsistent vocabulary, term '{}' has document frequency {} of {} docs",
                vocab.terms[static_cast<std::size_t>(col)], df, vocab.n_docs));
        }
        // df == n_docs gives ln(1) = 0 exactly; the entry is kept at weight 0.
        const double idf = std::log(static_cast<double>(vocab.n_docs) / static_cast<double>(df));
        out.emplace_back(col, tf * idf);
    }
    return out;
}

DocumentTermMatrix tfidf_transform(const DocumentTermMatrix& counts) {
    if (counts.weighting != Weighting::raw_counts) {
        throw DataError("tfidf_transform expects a raw-count matrix");
    }
    if (!counts.vocab) throw DataError("tfidf_transform: missing vocabulary");
    DocumentTermMatrix out;
    out.vocab = counts.vocab;
    out.weighting = Weighting::tfidf;
    out.rows.reserve(counts.rows.size());
    for (const auto& row : counts.rows) {
        out.rows.push_back(tfidf_row(row, *counts.vocab));
    }
    return out;
}

} // namespace hcast::corpus
