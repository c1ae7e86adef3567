#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace influcite::text {

// Porter (1980) stemmer, matching the published reference word list
// (including the reference implementation's handling of short words).
// Expects a lowercase token; non-letter characters pass through untouched.
std::string stem(std::string_view token);

// Lowercases and splits on non-alphanumeric characters. Single-letter
// tokens are kept; empty pieces are dropped. ASCII-oriented: multibyte
// UTF-8 sequences act as separators.
std::vector<std::string> tokenize(std::string_view text);

// Lexicon lookup key: lowercase, strip non-alphanumerics from both ends,
// keep internal punctuation (so "up-to-date" survives).
std::string normalize_word(std::string_view raw);

// Rule-based sentence splitter: terminal punctuation with an abbreviation
// blocklist ("et al.", "e.g.", initials, decimal points).
std::vector<std::string> split_sentences(std::string_view text);

// Sparse stemmed term-frequency vector.
class TermVector {
public:
    TermVector() = default;

    // Stems every token and accumulates frequencies.
    static TermVector from_tokens(std::span<const std::string> tokens);

    void add(const std::string& stemmed, int count = 1);

    bool empty() const { return counts_.empty(); }
    std::size_t size() const { return counts_.size(); }
    int at(const std::string& stemmed) const;
    const std::unordered_map<std::string, int>& counts() const { return counts_; }

private:
    std::unordered_map<std::string, int> counts_;
};

// dot(a,b) / (|a||b|); 0 when either vector is empty.
double cosine(const TermVector& a, const TermVector& b);

// Labels a lexicon entry may carry. "adj"/"adv" mark part-of-speech senses
// used by the pos_filter; the rest are the semantic categories.
const std::set<std::string>& known_lexicon_labels();

struct Lexicon {
    std::string name;
    // When set, a word only counts if its entry also carries "adj" or "adv".
    bool pos_filter = false;
    // lowercase word -> labels
    std::unordered_map<std::string, std::set<std::string>> entries;

    bool contains(std::string_view word) const;
    bool has_label(std::string_view word, const std::string& label) const;

    // Builds a one-label lexicon from a plain word list.
    static Lexicon from_words(std::string name, std::span<const char* const> words,
                              const std::string& label);

    // File format: `word<TAB>label[,label...]` per line, UTF-8, '#' comments.
    // A `#!posfilter` directive line turns on pos_filter for the lexicon.
    static Lexicon load_file(const std::string& path, std::string name);

    void merge_file(const std::string& path);
};

// Number of context tokens carrying `label` in `lexicon`. Context tokens are
// normalized via normalize_word before lookup. Throws std::invalid_argument
// on a label outside known_lexicon_labels().
int lexicon_count(std::span<const std::string> context, const Lexicon& lexicon,
                  const std::string& label);

}  // namespace influcite::text
