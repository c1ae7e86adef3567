#include "influcite/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace influcite::text {

namespace {

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

char to_lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alnum(c)) {
            current.push_back(to_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string normalize_word(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && !is_alnum(raw[begin])) ++begin;
    while (end > begin && !is_alnum(raw[end - 1])) --end;
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) out.push_back(to_lower(raw[i]));
    return out;
}

namespace {

// Abbreviations that end with '.' but do not terminate a sentence.
const std::set<std::string>& abbreviations() {
    static const std::set<std::string> abbr = {
        "al",  "e.g", "i.e", "etc", "cf",  "vs",  "fig", "figs", "eq",
        "eqs", "sec", "no",  "vol", "pp",  "p",   "dr",  "mr",   "mrs",
        "ms",  "prof", "st", "jr",  "sr",  "ca",  "resp", "approx",
    };
    return abbr;
}

std::string last_word_before(std::string_view text, std::size_t pos) {
    std::size_t end = pos;
    std::size_t begin = end;
    while (begin > 0 && !std::isspace(static_cast<unsigned char>(text[begin - 1])))
        --begin;
    std::string w(text.substr(begin, end - begin));
    std::transform(w.begin(), w.end(), w.begin(), to_lower);
    return w;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        current.push_back(c);
        bool terminal = (c == '!' || c == '?');
        if (c == '.') {
            std::string prev = last_word_before(text, i);
            bool abbrev = abbreviations().count(prev) > 0;
            // single capital initial, as in "J. Smith"
            if (prev.size() == 1 && i >= 1 &&
                std::isupper(static_cast<unsigned char>(text[i - 1])))
                abbrev = true;
            // decimal number, as in "3.14"
            bool decimal = i + 1 < text.size() && i >= 1 &&
                           std::isdigit(static_cast<unsigned char>(text[i - 1])) &&
                           std::isdigit(static_cast<unsigned char>(text[i + 1]));
            terminal = !abbrev && !decimal;
        }
        if (terminal) {
            // swallow closing quotes/brackets following the terminator
            while (i + 1 < text.size() &&
                   (text[i + 1] == ')' || text[i + 1] == ']' ||
                    text[i + 1] == '"' || text[i + 1] == '\'')) {
                current.push_back(text[++i]);
            }
            // sentence boundary requires following whitespace or end of text
            if (i + 1 >= text.size() ||
                std::isspace(static_cast<unsigned char>(text[i + 1]))) {
                std::string trimmed = current;
                std::size_t a = trimmed.find_first_not_of(" \t\r\n");
                std::size_t b = trimmed.find_last_not_of(" \t\r\n");
                if (a != std::string::npos)
                    sentences.push_back(trimmed.substr(a, b - a + 1));
                current.clear();
            }
        }
    }
    std::size_t a = current.find_first_not_of(" \t\r\n");
    if (a != std::string::npos) {
        std::size_t b = current.find_last_not_of(" \t\r\n");
        sentences.push_back(current.substr(a, b - a + 1));
    }
    return sentences;
}

TermVector TermVector::from_tokens(std::span<const std::string> tokens) {
    TermVector v;
    for (const std::string& t : tokens) v.add(stem(t));
    return v;
}

void TermVector::add(const std::string& stemmed, int count) {
    if (stemmed.empty() || count == 0) return;
    auto it = counts_.find(stemmed);
    if (it == counts_.end()) {
        counts_.emplace(stemmed, count);
    } else {
        it->second += count;
        if (it->second == 0) counts_.erase(it);
    }
}

int TermVector::at(const std::string& stemmed) const {
    auto it = counts_.find(stemmed);
    return it == counts_.end() ? 0 : it->second;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    double dot = 0.0;
    for (const auto& [term, freq] : small.counts()) {
        dot += static_cast<double>(freq) * large.at(term);
    }
    if (dot == 0.0) return 0.0;
    double na = 0.0;
    for (const auto& [term, freq] : a.counts()) na += static_cast<double>(freq) * freq;
    double nb = 0.0;
    for (const auto& [term, freq] : b.counts()) nb += static_cast<double>(freq) * freq;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

const std::set<std::string>& known_lexicon_labels() {
    static const std::set<std::string> labels = {
        "Positiv", "Negativ", "Strong",   "Weak",     "Active",       "Passive",
        "positive", "negative", "joy",    "sadness",  "anger",        "fear",
        "surprise", "anticipation", "trust", "disgust", "relevant",  "recent",
        "extreme",  "comparative",  "adj", "adv",
    };
    return labels;
}

bool Lexicon::contains(std::string_view word) const {
    return entries.count(std::string(word)) > 0;
}

bool Lexicon::has_label(std::string_view word, const std::string& label) const {
    auto it = entries.find(std::string(word));
    return it != entries.end() && it->second.count(label) > 0;
}

Lexicon Lexicon::from_words(std::string name, std::span<const char* const> words,
                            const std::string& label) {
    Lexicon lex;
    lex.name = std::move(name);
    for (const char* w : words) lex.entries[normalize_word(w)].insert(label);
    return lex;
}

namespace {

void parse_lexicon_line(Lexicon& lex, const std::string& line,
                        const std::string& path, int line_no) {
    if (line.empty()) return;
    if (line[0] == '#') {
        if (line.rfind("#!posfilter", 0) == 0) lex.pos_filter = true;
        return;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected `word<TAB>label[,label...]`");
    }
    std::string word = normalize_word(line.substr(0, tab));
    if (word.empty()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": empty word");
    }
    std::stringstream labels(line.substr(tab + 1));
    std::string label;
    auto& slot = lex.entries[word];
    while (std::getline(labels, label, ',')) {
        while (!label.empty() && (label.back() == '\r' || label.back() == ' '))
            label.pop_back();
        while (!label.empty() && label.front() == ' ') label.erase(label.begin());
        if (label.empty()) continue;
        if (!known_lexicon_labels().count(label)) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown label '" + label + "'");
        }
        slot.insert(label);
    }
    if (slot.empty()) lex.entries.erase(word);
}

}  // namespace

Lexicon Lexicon::load_file(const std::string& path, std::string name) {
    Lexicon lex;
    lex.name = std::move(name);
    lex.merge_file(path);
    return lex;
}

void Lexicon::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        parse_lexicon_line(*this, line, path, line_no);
    }
}

int lexicon_count(std::span<const std::string> context, const Lexicon& lexicon,
                  const std::string& label) {
    if (!known_lexicon_labels().count(label)) {
        throw std::invalid_argument("unknown lexicon label: " + label);
    }
    int count = 0;
    for (const std::string& raw : context) {
        std::string word = normalize_word(raw);
        if (word.empty()) continue;
        auto it = lexicon.entries.find(word);
        if (it == lexicon.entries.end()) continue;
        if (!it->second.count(label)) continue;
        if (lexicon.pos_filter && !it->second.count("adj") && !it->second.count("adv"))
            continue;
        ++count;
    }
    return count;
}

}  // namespace influcite::text
