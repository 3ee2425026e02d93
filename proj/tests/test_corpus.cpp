#include <doctest.h>

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "headlinecast/corpus.hpp"
#include "headlinecast/errors.hpp"
#include "oracles.hpp"

using namespace hcast;
using corpus::StopwordSet;
using corpus::TokenSequence;

namespace {

std::vector<TokenSequence> as_sequences(const std::vector<std::vector<std::string>>& docs) {
    std::vector<TokenSequence> seqs;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        seqs.push_back({"D" + std::to_string(i), docs[i]});
    }
    return seqs;
}

} // namespace

TEST_CASE("tokenizer lowercases, splits on punctuation, drops digit-bearing tokens") {
    const StopwordSet none;
    CHECK(corpus::tokenize("Profit rises; CEO-pay up 5%", none) ==
          std::vector<std::string>{"profit", "rises", "ceo", "pay", "up"});
    CHECK(corpus::tokenize("Q3 2011 loss of 4,000 EUR", none) ==
          std::vector<std::string>{"loss", "of", "eur"});
    CHECK(corpus::tokenize("", none).empty());
    CHECK(corpus::tokenize("2011 4,000 99", none).empty());
    CHECK(corpus::tokenize("  spaced\t\tout words  ", none) ==
          std::vector<std::string>{"spaced", "out", "words"});
    // A digit anywhere poisons the whole run it sits in, not its neighbours.
    CHECK(corpus::tokenize("ABC123 plain", none) == std::vector<std::string>{"plain"});
}

TEST_CASE("stopword filtering removes function words after lowercasing") {
    const StopwordSet stops = corpus::default_stopwords();
    CHECK(corpus::tokenize("Q3 2011 loss of 4,000 EUR", stops) ==
          std::vector<std::string>{"loss", "eur"});
    CHECK(corpus::tokenize("The firm AND its unit", stops) ==
          std::vector<std::string>{"firm", "unit"});
}

TEST_CASE("compiled-in stopword list matches the shipped file") {
    const auto& words = corpus::default_stopword_list();
    REQUIRE_FALSE(words.empty());
    CHECK(std::is_sorted(words.begin(), words.end()));
    CHECK(std::adjacent_find(words.begin(), words.end()) == words.end());

    std::ifstream file(std::string(HEADLINECAST_DATA_DIR) + "/stopwords.txt");
    REQUIRE(file.good());
    std::vector<std::string> from_file;
    for (std::string line; std::getline(file, line);) {
        if (!line.empty() && line.front() != '#') from_file.push_back(line);
    }
    CHECK(from_file == words);
}

TEST_CASE("vocabulary keeps terms at or above the document-frequency floor, sorted") {
    const auto seqs = as_sequences({{"beta", "alpha", "beta"},
                                    {"alpha", "gamma"},
                                    {"alpha", "delta", "gamma"}});
    const auto vocab = corpus::build_vocabulary(seqs, 2);
    CHECK(vocab.terms == std::vector<std::string>{"alpha", "gamma"});
    CHECK(vocab.doc_freq == std::vector<int>{3, 2});
    CHECK(vocab.n_docs == 3);
    CHECK(vocab.index_of("alpha") == 0);
    CHECK(vocab.index_of("gamma") == 1);
    CHECK_FALSE(vocab.index_of("beta").has_value());

    // Repetition inside one document counts once toward document frequency.
    const auto loose = corpus::build_vocabulary(seqs, 1);
    CHECK(loose.doc_freq[static_cast<std::size_t>(*loose.index_of("beta"))] == 1);
    CHECK(loose.terms == std::vector<std::string>{"alpha", "beta", "delta", "gamma"});
}

TEST_CASE("vocabulary construction rejects unusable inputs") {
    const auto seqs = as_sequences({{"alpha"}, {"beta"}});
    CHECK_THROWS_AS(corpus::build_vocabulary(seqs, 0), ConfigError);
    CHECK_THROWS_AS(corpus::build_vocabulary({}, 1), DataError);
    CHECK_THROWS_WITH_AS(corpus::build_vocabulary(seqs, 3),
                         doctest::Contains("empty vocabulary"), DataError);
}

TEST_CASE("count rows are sorted sparse columns; unknown tokens vanish") {
    const auto seqs = as_sequences({{"b", "a", "b", "z"}, {"a"}});
    const auto vocab = std::make_shared<corpus::Vocabulary>(corpus::build_vocabulary(seqs, 1));
    const auto row = corpus::count_row({"b", "zzz-unknown", "a", "b", "b"}, *vocab);
    REQUIRE(row.size() == 2);
    CHECK(row[0] == std::pair<int, double>{*vocab->index_of("a"), 1.0});
    CHECK(row[1] == std::pair<int, double>{*vocab->index_of("b"), 3.0});

    const auto dtm = corpus::count_matrix(seqs, vocab);
    CHECK(dtm.weighting == corpus::Weighting::raw_counts);
    REQUIRE(dtm.rows.size() == 2);
    CHECK(dtm.rows[1] == corpus::SparseRow{{*vocab->index_of("a"), 1.0}});
}

TEST_CASE("tf-idf weights match the hand computation on a small corpus") {
    const std::vector<std::vector<std::string>> docs{
        {"profit", "rises", "profit"},
        {"profit", "falls"},
        {"merger", "falls", "falls", "announced"},
        {"profit", "merger"},
        {"announced"},
    };
    const auto seqs = as_sequences(docs);
    const auto vocab = std::make_shared<corpus::Vocabulary>(corpus::build_vocabulary(seqs, 1));
    const auto weighted = corpus::tfidf_transform(corpus::count_matrix(seqs, vocab));
    const auto expected = oracles::tfidf_by_hand(docs, 1);

    CHECK(weighted.weighting == corpus::Weighting::tfidf);
    REQUIRE(weighted.rows.size() == docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        REQUIRE(weighted.rows[d].size() == expected[d].size());
        for (const auto& [col, w] : weighted.rows[d]) {
            const auto& term = vocab->terms[static_cast<std::size_t>(col)];
            REQUIRE(expected[d].count(term) == 1);
            CHECK(w == doctest::Approx(expected[d].at(term)).epsilon(1e-12));
        }
    }
}

TEST_CASE("a term present in every document weighs exactly zero") {
    const auto seqs = as_sequences({{"ubiquitous", "rare"}, {"ubiquitous"}, {"ubiquitous"}});
    const auto vocab = std::make_shared<corpus::Vocabulary>(corpus::build_vocabulary(seqs, 1));
    const auto weighted = corpus::tfidf_transform(corpus::count_matrix(seqs, vocab));
    const int col = *vocab->index_of("ubiquitous");
    for (const auto& row : weighted.rows) {
        for (const auto& [c, w] : row) {
            if (c == col) CHECK(w == 0.0);
        }
    }
}

TEST_CASE("re-weighting an already weighted matrix is refused") {
    const auto seqs = as_sequences({{"a"}, {"a", "b"}});
    const auto vocab = std::make_shared<corpus::Vocabulary>(corpus::build_vocabulary(seqs, 1));
    const auto weighted = corpus::tfidf_transform(corpus::count_matrix(seqs, vocab));
    CHECK_THROWS_AS(corpus::tfidf_transform(weighted), DataError);
}
