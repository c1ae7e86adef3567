#include "influcite/textproc.hpp"

#include <array>
#include <cctype>
#include <cstddef>

// Porter (1980) suffix stripping, following the reference implementation:
// words of length <= 2 are left alone, step 2 uses the bli->ble and
// logi->log forms, and the published word list is the conformance oracle.
namespace influcite::text {

namespace {

bool is_consonant(const std::string& w, std::size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return false;
        case 'y':
            return i == 0 ? true : !is_consonant(w, i - 1);
        default:
            return true;
    }
}

// m in [C](VC)^m[V], computed over w[0..len).
int measure(const std::string& w, std::size_t len) {
    int m = 0;
    std::size_t i = 0;
    while (i < len && is_consonant(w, i)) ++i;
    while (i < len) {
        while (i < len && !is_consonant(w, i)) ++i;
        if (i >= len) break;
        ++m;
        while (i < len && is_consonant(w, i)) ++i;
    }
    return m;
}

bool vowel_in_stem(const std::string& w, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool double_consonant(const std::string& w, std::size_t len) {
    if (len < 2) return false;
    return w[len - 1] == w[len - 2] && is_consonant(w, len - 1);
}

// *o: stem ends cvc where the final c is not w, x, or y.
bool cvc_end(const std::string& w, std::size_t len) {
    if (len < 3) return false;
    if (!is_consonant(w, len - 3) || is_consonant(w, len - 2) ||
        !is_consonant(w, len - 1))
        return false;
    char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
    return w.size() >= suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Rule {
    std::string_view suffix;
    std::string_view replacement;
};

// Applies the longest matching rule if m(stem) > min_measure. Once a suffix
// matches, the step ends whether or not the condition held.
void apply_rules(std::string& w, std::span<const Rule> rules, int min_measure) {
    const Rule* best = nullptr;
    for (const Rule& r : rules) {
        if (ends_with(w, r.suffix) &&
            (!best || r.suffix.size() > best->suffix.size()))
            best = &r;
    }
    if (!best) return;
    std::size_t stem_len = w.size() - best->suffix.size();
    if (measure(w, stem_len) > min_measure) {
        w.resize(stem_len);
        w.append(best->replacement);
    }
}

void step1a(std::string& w) {
    if (ends_with(w, "sses")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ies")) {
        w.resize(w.size() - 2);
    } else if (ends_with(w, "ss")) {
        // keep
    } else if (ends_with(w, "s")) {
        w.pop_back();
    }
}

void step1b(std::string& w) {
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.pop_back();
        return;
    }
    bool stripped = false;
    if (ends_with(w, "ed") && vowel_in_stem(w, w.size() - 2)) {
        w.resize(w.size() - 2);
        stripped = true;
    } else if (ends_with(w, "ing") && vowel_in_stem(w, w.size() - 3)) {
        w.resize(w.size() - 3);
        stripped = true;
    }
    if (!stripped) return;
    if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
        w.push_back('e');
    } else if (double_consonant(w, w.size())) {
        char c = w.back();
        if (c != 'l' && c != 's' && c != 'z') w.pop_back();
    } else if (measure(w, w.size()) == 1 && cvc_end(w, w.size())) {
        w.push_back('e');
    }
}

void step1c(std::string& w) {
    if (ends_with(w, "y") && vowel_in_stem(w, w.size() - 1)) w.back() = 'i';
}

constexpr std::array<Rule, 21> kStep2Rules{{
    {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
    {"izer", "ize"},    {"bli", "ble"},     {"alli", "al"},   {"entli", "ent"},
    {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"},
    {"ation", "ate"},   {"ator", "ate"},    {"alism", "al"},  {"iveness", "ive"},
    {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},  {"iviti", "ive"},
    {"biliti", "ble"},  {"logi", "log"},
}};

constexpr std::array<Rule, 7> kStep3Rules{{
    {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
    {"ical", "ic"},  {"ful", ""},   {"ness", ""},
}};

constexpr std::array<Rule, 18> kStep4Rules{{
    {"al", ""},  {"ance", ""}, {"ence", ""}, {"er", ""},  {"ic", ""},
    {"able", ""}, {"ible", ""}, {"ant", ""},  {"ement", ""}, {"ment", ""},
    {"ent", ""}, {"ou", ""},   {"ism", ""},  {"ate", ""}, {"iti", ""},
    {"ous", ""}, {"ive", ""},  {"ize", ""},
}};

void step4(std::string& w) {
    // "ion" needs the stem to end in s or t; handle it next to the table.
    const Rule* best = nullptr;
    for (const Rule& r : kStep4Rules) {
        if (ends_with(w, r.suffix) &&
            (!best || r.suffix.size() > best->suffix.size()))
            best = &r;
    }
    bool ion = ends_with(w, "ion") && (!best || best->suffix.size() < 3);
    if (ion) {
        std::size_t stem_len = w.size() - 3;
        if (stem_len > 0 && (w[stem_len - 1] == 's' || w[stem_len - 1] == 't') &&
            measure(w, stem_len) > 1)
            w.resize(stem_len);
        return;
    }
    if (!best) return;
    std::size_t stem_len = w.size() - best->suffix.size();
    if (measure(w, stem_len) > 1) w.resize(stem_len);
}

void step5a(std::string& w) {
    if (!ends_with(w, "e")) return;
    int m = measure(w, w.size() - 1);
    if (m > 1 || (m == 1 && !cvc_end(w, w.size() - 1))) w.pop_back();
}

void step5b(std::string& w) {
    if (w.back() == 'l' && double_consonant(w, w.size()) &&
        measure(w, w.size()) > 1)
        w.pop_back();
}

}  // namespace

std::string stem(std::string_view token) {
    std::string w;
    w.reserve(token.size());
    for (char c : token)
        w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (w.size() <= 2) return w;
    for (char c : w)
        if (c < 'a' || c > 'z') return w;

    step1a(w);
    step1b(w);
    step1c(w);
    apply_rules(w, kStep2Rules, 0);
    apply_rules(w, kStep3Rules, 0);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

}  // namespace influcite::text
