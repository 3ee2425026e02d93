#include "headlinecast/corpus.hpp"

namespace hcast::corpus {

// Fixed English function-word list. data/stopwords.txt carries the same
// terms; test_corpus asserts the two stay in sync.
const std::vector<std::string>& default_stopword_list() {
    static const std::vector<std::string> words = {
        "a", "about", "above", "after", "again", "against", "all", "almost", "also",
        "although", "always", "am", "among", "an", "and", "another", "any", "anyone",
        "anything", "are", "as", "at", "be", "became", "because", "become", "becomes",
        "been", "before", "being", "below", "besides", "between", "beyond", "both",
        "but", "by", "can", "cannot", "could", "did", "do", "does", "doing", "down",
        "during", "each", "either", "else", "ever", "every", "few", "for", "from",
        "further", "had", "has", "have", "having", "he", "hence", "her", "here",
        "hers", "herself", "him", "himself", "his", "how", "however", "i", "if",
        "in", "indeed", "instead", "into", "is", "it", "its", "itself", "just",
        "least", "less", "many", "may", "me", "meanwhile", "might", "more",
        "moreover", "most", "much", "must", "my", "myself", "neither", "never",
        "nevertheless", "next", "no", "nobody", "none", "nor", "not", "nothing",
        "now", "nowhere", "of", "off", "often", "on", "once", "only", "onto", "or",
        "other", "otherwise", "our", "ours", "ourselves", "out", "over", "own",
        "per", "perhaps", "rather", "same", "seem", "seemed", "seems", "several",
        "she", "should", "since", "so", "some", "something", "sometimes", "somewhat",
        "still", "such", "than", "that", "the", "their", "theirs", "them",
        "themselves", "then", "there", "therefore", "these", "they", "this",
        "those", "through", "thus", "to", "too", "toward", "towards", "under",
        "unless", "until", "up", "upon", "very", "via", "was", "we", "well", "were",
        "what", "when", "where", "whether", "which", "while", "who", "whom", "why",
        "will", "with", "within", "without", "would", "yet", "you", "your", "yours",
        "yourself", "yourselves",
    };
    return words;
}

StopwordSet default_stopwords() {
    const auto& words = default_stopword_list();
    return StopwordSet(words.begin(), words.end());
}

} // namespace hcast::corpus
