#include "influcite/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "influcite/textproc.hpp"
#include <json.hpp>

namespace influcite::corpus {

namespace {

constexpr std::array<std::string_view, kSectionLabelCount> kLabelNames{
    "title",      "author",     "abstract", "introduction",
    "related",    "main",       "conclusion", "future",
    "acknowledgment", "reference", "appendix", "date",
};

}  // namespace

std::string_view to_string(SectionLabel label) {
    return kLabelNames[static_cast<int>(label)];
}

std::optional<SectionLabel> parse_label(std::string_view name) {
    for (int i = 0; i < kSectionLabelCount; ++i) {
        if (kLabelNames[i] == name) return static_cast<SectionLabel>(i);
    }
    return std::nullopt;
}

std::string allowed_labels_string() {
    std::string out;
    for (int i = 0; i < kSectionLabelCount; ++i) {
        if (i) out += ", ";
        out += kLabelNames[i];
    }
    return out;
}

std::string_view to_string(CitationStyle style) {
    return style == CitationStyle::numeric ? "numeric" : "textual";
}

std::optional<CitationStyle> parse_style(std::string_view name) {
    if (name == "numeric") return CitationStyle::numeric;
    if (name == "textual") return CitationStyle::textual;
    return std::nullopt;
}

SectionLabel standardize_section(std::string_view raw_heading) {
    std::vector<std::string> words = text::tokenize(raw_heading);
    std::set<std::string> w(words.begin(), words.end());
    auto any = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (w.count(k)) return true;
        return false;
    };
    // Specific labels take priority over broader ones; compound headings
    // like "Conclusion and Future Work" resolve to the first hit.
    if (any({"reference", "references", "bibliography"})) return SectionLabel::reference;
    if (any({"appendix", "appendices"})) return SectionLabel::appendix;
    if (any({"acknowledgment", "acknowledgments", "acknowledgement",
             "acknowledgements"}))
        return SectionLabel::acknowledgment;
    if (any({"future"})) return SectionLabel::future;
    if (any({"conclusion", "conclusions", "concluding"})) return SectionLabel::conclusion;
    if (any({"related"}) || (w.count("work") && any({"previous", "prior"})))
        return SectionLabel::related;
    if (any({"introduction", "intro"})) return SectionLabel::introduction;
    if (any({"abstract"})) return SectionLabel::abstract;
    if (any({"title"})) return SectionLabel::title;
    if (any({"author", "authors"})) return SectionLabel::author;
    if (any({"date"})) return SectionLabel::date;
    return SectionLabel::main;
}

bool operator==(const MentionSite& a, const MentionSite& b) {
    return a.ref_index == b.ref_index && a.sentence_index == b.sentence_index &&
           a.token_span == b.token_span && a.section == b.section &&
           a.appears_alone == b.appears_alone &&
           a.appears_first_in_group == b.appears_first_in_group &&
           a.author_name_in_context == b.author_name_in_context;
}

const Reference* AnnotatedPaper::find_reference(int ref_index) const {
    for (const Reference& r : references) {
        if (r.ref_index == ref_index) return &r;
    }
    return nullptr;
}

void AnnotatedPaper::rebuild_body() {
    body.clear();
    for (const auto& [label, sentences] : sections) {
        if (label == SectionLabel::reference) continue;
        for (const auto& sentence : sentences) {
            body.push_back(BodySentence{label, sentence});
        }
    }
}

void AnnotatedPaper::validate() const {
    auto fail = [&](const std::string& field, const std::string& detail) {
        throw CorpusError("paper '" + paper_id + "': " + field + ": " + detail);
    };
    if (paper_id.empty()) throw CorpusError("paper record: paper_id: empty");
    std::set<int> seen;
    for (const Reference& r : references) {
        if (!seen.insert(r.ref_index).second)
            fail("references", "duplicate ref_index " + std::to_string(r.ref_index));
        if (r.global_cite_count < 0)
            fail("references", "negative global_cite_count for ref_index " +
                                   std::to_string(r.ref_index));
    }
    for (const MentionSite& m : mentions) {
        std::string where = "mention of ref_index " + std::to_string(m.ref_index);
        if (!seen.count(m.ref_index)) fail("mentions", where + ": no such reference");
        if (m.sentence_index < 0 ||
            m.sentence_index >= static_cast<int>(body.size()))
            fail("mentions", where + ": sentence_index out of range");
        const BodySentence& sentence = body[m.sentence_index];
        if (m.token_span.first < 0 || m.token_span.first >= m.token_span.second ||
            m.token_span.second > static_cast<int>(sentence.tokens.size()))
            fail("mentions", where + ": invalid token_span");
        if (m.section != sentence.section)
            fail("mentions", where + ": section does not match sentence " +
                                 std::to_string(m.sentence_index));
        if (m.appears_first_in_group && m.appears_alone)
            fail("mentions", where + ": appears_first_in_group implies not alone");
    }
}

std::vector<std::string> tokenize_body_text(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
            continue;
        }
        if (c == '[') {
            std::size_t close = text.find(']', i + 1);
            if (close != std::string_view::npos) {
                flush();
                tokens.emplace_back(text.substr(i, close - i + 1));
                i = close;
                continue;
            }
        }
        if (c == '(') {
            // parenthesized year, e.g. "(1998)" or "(1998a)"
            std::size_t j = i + 1;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            std::size_t digits = j - (i + 1);
            if (digits == 4) {
                if (j < text.size() && std::islower(static_cast<unsigned char>(text[j])))
                    ++j;
                if (j < text.size() && text[j] == ')') {
                    flush();
                    tokens.emplace_back(text.substr(i, j - i + 1));
                    i = j;
                    continue;
                }
            }
        }
        current.push_back(c);
    }
    flush();
    return tokens;
}

namespace {

bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
}

// Parses the inside of a bracket group into citation ids, expanding ranges.
// Returns false if the content does not look like a numeric citation group.
bool parse_numeric_group(std::string_view inside, std::vector<int>* ids) {
    std::string content(inside);
    content.erase(std::remove(content.begin(), content.end(), ' '), content.end());
    if (content.empty()) return false;
    std::stringstream ss(content);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) return false;
        std::size_t dash = item.find('-');
        if (dash == std::string::npos) {
            if (!is_digits(item)) return false;
            ids->push_back(std::stoi(item));
        } else {
            std::string lo = item.substr(0, dash);
            std::string hi = item.substr(dash + 1);
            if (!is_digits(lo) || !is_digits(hi)) return false;
            int a = std::stoi(lo);
            int b = std::stoi(hi);
            if (b < a) return false;
            for (int v = a; v <= b; ++v) ids->push_back(v);
        }
    }
    return !ids->empty();
}

// Last word of the surname portion of an author name ("Smith, J." -> smith,
// "Jane van Dam" -> dam).
std::string surname_key(const std::string& author) {
    std::string part = author;
    std::size_t comma = part.find(',');
    if (comma != std::string::npos) part = part.substr(0, comma);
    std::vector<std::string> words = text::tokenize(part);
    return words.empty() ? std::string() : words.back();
}

bool ref_has_surname_in(const Reference& ref,
                        std::span<const std::string> tokens, int lo, int hi) {
    std::vector<std::string> surnames;
    for (const std::string& a : ref.authors) {
        std::string s = surname_key(a);
        if (!s.empty()) surnames.push_back(s);
    }
    if (surnames.empty()) return false;
    for (int i = lo; i < hi; ++i) {
        std::string w = text::normalize_word(tokens[i]);
        for (const std::string& s : surnames) {
            if (w == s) return true;
        }
    }
    return false;
}

// +-5 token window around the span, clipped to the sentence, span excluded.
void window_bounds(int span_start, int span_end, int n_tokens, int* lo, int* hi_left,
                   int* lo_right, int* hi) {
    *lo = std::max(0, span_start - 5);
    *hi_left = span_start;
    *lo_right = span_end;
    *hi = std::min(n_tokens, span_end + 5);
}

bool author_in_window(const Reference& ref, std::span<const std::string> tokens,
                      int span_start, int span_end) {
    int lo, hi_left, lo_right, hi;
    window_bounds(span_start, span_end, static_cast<int>(tokens.size()), &lo,
                  &hi_left, &lo_right, &hi);
    return ref_has_surname_in(ref, tokens, lo, hi_left) ||
           ref_has_surname_in(ref, tokens, lo_right, hi);
}

bool is_year_token(std::string_view token, int* year) {
    if (token.size() < 6 || token.front() != '(' || token.back() != ')') return false;
    std::string_view inner = token.substr(1, token.size() - 2);
    if (inner.size() == 5 && std::islower(static_cast<unsigned char>(inner.back())))
        inner = inner.substr(0, 4);
    if (inner.size() != 4 || !is_digits(inner)) return false;
    *year = std::stoi(std::string(inner));
    return true;
}

void detect_numeric_in_sentence(const BodySentence& sentence, int sentence_index,
                                std::span<const Reference> references,
                                std::vector<MentionSite>* out,
                                std::vector<std::string>* warnings) {
    const auto& tokens = sentence.tokens;
    for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
        const std::string& tok = tokens[t];
        if (tok.size() < 3 || tok.front() != '[' || tok.back() != ']') continue;
        std::vector<int> ids;
        if (!parse_numeric_group(tok.substr(1, tok.size() - 2), &ids)) continue;
        bool alone = ids.size() == 1;
        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            int id = ids[pos];
            auto it = std::find_if(references.begin(), references.end(),
                                   [&](const Reference& r) { return r.ref_index == id; });
            if (it == references.end()) {
                if (warnings)
                    warnings->push_back("citation id " + std::to_string(id) + " in \"" +
                                        tok + "\" matches no reference; skipped");
                continue;
            }
            MentionSite site;
            site.ref_index = id;
            site.sentence_index = sentence_index;
            site.token_span = {t, t + 1};
            site.section = sentence.section;
            site.appears_alone = alone;
            site.appears_first_in_group = !alone && pos == 0;
            site.author_name_in_context = author_in_window(*it, tokens, t, t + 1);
            out->push_back(site);
        }
    }
}

void detect_textual_in_sentence(const BodySentence& sentence, int sentence_index,
                                std::span<const Reference> references,
                                std::vector<MentionSite>* out,
                                std::vector<std::string>* warnings) {
    const auto& tokens = sentence.tokens;
    for (int t = 0; t < static_cast<int>(tokens.size()); ++t) {
        int year = 0;
        if (!is_year_token(tokens[t], &year)) continue;
        // Work backwards over "Surname", "Surname et al.", "Surname and Other".
        int start = -1;
        std::string surname;
        auto word_at = [&](int i) {
            return i >= 0 && i < static_cast<int>(tokens.size())
                       ? text::normalize_word(tokens[i])
                       : std::string();
        };
        if (t >= 3 && word_at(t - 2) == "et" && word_at(t - 1) == "al") {
            start = t - 3;
            surname = word_at(t - 3);
        } else if (t >= 3 && word_at(t - 2) == "and") {
            start = t - 3;
            surname = word_at(t - 3);
        } else if (t >= 1) {
            std::string w = word_at(t - 1);
            if (!w.empty() && std::isupper(static_cast<unsigned char>(tokens[t - 1][0]))) {
                start = t - 1;
                surname = w;
            }
        }
        if (start < 0 || surname.empty()) continue;
        std::vector<const Reference*> matches;
        for (const Reference& r : references) {
            if (r.year != year || r.authors.empty()) continue;
            if (surname_key(r.authors.front()) == surname) matches.push_back(&r);
        }
        if (matches.empty()) continue;
        if (matches.size() > 1) {
            if (warnings)
                warnings->push_back("ambiguous textual citation '" + tokens[start] +
                                    " " + tokens[t] +
                                    "' (multiple references share surname and year); "
                                    "skipped");
            continue;
        }
        MentionSite site;
        site.ref_index = matches.front()->ref_index;
        site.sentence_index = sentence_index;
        site.token_span = {start, t + 1};
        site.section = sentence.section;
        site.appears_alone = true;
        site.appears_first_in_group = false;
        // The surname is part of the citation itself.
        site.author_name_in_context = true;
        out->push_back(site);
    }
}

}  // namespace

std::vector<MentionSite> detect_mentions_in_body(
    std::span<const BodySentence> body, std::span<const Reference> references,
    CitationStyle style, std::vector<std::string>* warnings) {
    std::vector<MentionSite> out;
    for (int s = 0; s < static_cast<int>(body.size()); ++s) {
        if (style == CitationStyle::numeric) {
            detect_numeric_in_sentence(body[s], s, references, &out, warnings);
        } else {
            detect_textual_in_sentence(body[s], s, references, &out, warnings);
        }
    }
    return out;
}

std::vector<MentionSite> detect_mentions(const std::string& raw_body,
                                         std::span<const Reference> references,
                                         CitationStyle style,
                                         std::vector<std::string>* warnings) {
    std::vector<BodySentence> body;
    for (const std::string& sentence : text::split_sentences(raw_body)) {
        body.push_back(BodySentence{SectionLabel::main, tokenize_body_text(sentence)});
    }
    return detect_mentions_in_body(body, references, style, warnings);
}

namespace {

using nlohmann::json;

[[noreturn]] void record_fail(const std::string& paper_id, const std::string& field,
                              const std::string& detail) {
    std::string who = paper_id.empty() ? "record" : "paper '" + paper_id + "'";
    throw CorpusError(who + ": " + field + ": " + detail);
}

int require_int(const json& j, const char* field, const std::string& paper_id) {
    if (!j.contains(field) || !j[field].is_number_integer())
        record_fail(paper_id, field, "missing or not an integer");
    return j[field].get<int>();
}

std::string require_string(const json& j, const char* field,
                           const std::string& paper_id) {
    if (!j.contains(field) || !j[field].is_string())
        record_fail(paper_id, field, "missing or not a string");
    return j[field].get<std::string>();
}

SectionLabel section_label_from_json(const json& sec, const std::string& paper_id,
                                     std::size_t index) {
    std::string field = "sections[" + std::to_string(index) + "]";
    if (sec.contains("label")) {
        std::string name = sec["label"].get<std::string>();
        auto label = parse_label(name);
        if (!label)
            record_fail(paper_id, field,
                        "unknown section label '" + name + "' (allowed: " +
                            allowed_labels_string() + ")");
        return *label;
    }
    if (sec.contains("heading")) {
        return standardize_section(sec["heading"].get<std::string>());
    }
    record_fail(paper_id, field, "needs either 'label' or 'heading'");
}

std::vector<std::vector<std::string>> sentences_from_json(const json& sec,
                                                          const std::string& paper_id,
                                                          std::size_t index) {
    std::string field = "sections[" + std::to_string(index) + "]";
    std::vector<std::vector<std::string>> sentences;
    if (sec.contains("sentences")) {
        if (!sec["sentences"].is_array())
            record_fail(paper_id, field, "'sentences' must be an array of token arrays");
        for (const json& s : sec["sentences"]) {
            std::vector<std::string> tokens;
            if (s.is_array()) {
                for (const json& t : s) {
                    if (!t.is_string())
                        record_fail(paper_id, field, "sentence tokens must be strings");
                    tokens.push_back(t.get<std::string>());
                }
            } else if (s.is_string()) {
                tokens = tokenize_body_text(s.get<std::string>());
            } else {
                record_fail(paper_id, field, "each sentence must be a token array or string");
            }
            sentences.push_back(std::move(tokens));
        }
    } else if (sec.contains("text")) {
        if (!sec["text"].is_string())
            record_fail(paper_id, field, "'text' must be a string");
        for (const std::string& s : text::split_sentences(sec["text"].get<std::string>())) {
            sentences.push_back(tokenize_body_text(s));
        }
    } else {
        record_fail(paper_id, field, "needs either 'sentences' or 'text'");
    }
    return sentences;
}

Reference reference_from_json(const json& r, const std::string& paper_id,
                              std::size_t index) {
    std::string field = "references[" + std::to_string(index) + "]";
    if (!r.is_object()) record_fail(paper_id, field, "must be an object");
    Reference ref;
    if (!r.contains("ref_index") || !r["ref_index"].is_number_integer())
        record_fail(paper_id, field, "missing ref_index");
    ref.ref_index = r["ref_index"].get<int>();
    ref.title = r.value("title", std::string());
    ref.year = r.value("year", 0);
    if (r.contains("authors")) {
        for (const json& a : r["authors"]) ref.authors.push_back(a.get<std::string>());
    }
    ref.global_cite_count = r.value("global_cite_count", 0LL);
    if (ref.global_cite_count < 0)
        record_fail(paper_id, field, "global_cite_count must be non-negative");
    ref.self_cite = r.value("self_cite", false);
    if (r.contains("gold_label") && !r["gold_label"].is_null()) {
        if (!r["gold_label"].is_boolean())
            record_fail(paper_id, field, "gold_label must be boolean");
        ref.gold_label = r["gold_label"].get<bool>();
    }
    ref.target_id = r.value("target_id", std::string());
    return ref;
}

MentionSite mention_from_json(const json& m, const std::string& paper_id,
                              std::size_t index) {
    std::string field = "mentions[" + std::to_string(index) + "]";
    if (!m.is_object()) record_fail(paper_id, field, "must be an object");
    MentionSite site;
    site.ref_index = require_int(m, "ref_index", paper_id);
    site.sentence_index = require_int(m, "sentence_index", paper_id);
    if (!m.contains("token_span") || !m["token_span"].is_array() ||
        m["token_span"].size() != 2)
        record_fail(paper_id, field, "token_span must be [start, end]");
    site.token_span = {m["token_span"][0].get<int>(), m["token_span"][1].get<int>()};
    std::string label = require_string(m, "section", paper_id);
    auto parsed = parse_label(label);
    if (!parsed)
        record_fail(paper_id, field,
                    "unknown section label '" + label + "' (allowed: " +
                        allowed_labels_string() + ")");
    site.section = *parsed;
    site.appears_alone = m.value("appears_alone", false);
    site.appears_first_in_group = m.value("appears_first_in_group", false);
    site.author_name_in_context = m.value("author_name_in_context", false);
    return site;
}

}  // namespace

AnnotatedPaper parse_paper_record(const std::string& json_line,
                                  std::vector<std::string>* warnings) {
    json j;
    try {
        j = json::parse(json_line);
    } catch (const json::parse_error& e) {
        throw CorpusError(std::string("record: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CorpusError("record: not a JSON object");

    std::string paper_id = require_string(j, "paper_id", "");
    if (paper_id.empty()) record_fail("", "paper_id", "empty");
    int version = require_int(j, "version", paper_id);
    if (version != 1)
        record_fail(paper_id, "version", "unsupported version " + std::to_string(version));

    AnnotatedPaper paper;
    paper.paper_id = paper_id;
    paper.year = require_int(j, "year", paper_id);
    if (j.contains("citation_style")) {
        std::string s = j["citation_style"].get<std::string>();
        auto style = parse_style(s);
        if (!style)
            record_fail(paper_id, "citation_style",
                        "must be 'numeric' or 'textual', got '" + s + "'");
        paper.style = *style;
    }
    if (!j.contains("sections") || !j["sections"].is_array())
        record_fail(paper_id, "sections", "missing or not an array");
    for (std::size_t i = 0; i < j["sections"].size(); ++i) {
        const json& sec = j["sections"][i];
        if (!sec.is_object())
            record_fail(paper_id, "sections[" + std::to_string(i) + "]",
                        "must be an object");
        paper.sections.emplace_back(section_label_from_json(sec, paper_id, i),
                                    sentences_from_json(sec, paper_id, i));
    }
    if (!j.contains("references") || !j["references"].is_array())
        record_fail(paper_id, "references", "missing or not an array");
    for (std::size_t i = 0; i < j["references"].size(); ++i) {
        paper.references.push_back(reference_from_json(j["references"][i], paper_id, i));
    }
    paper.rebuild_body();
    if (j.contains("mentions")) {
        if (!j["mentions"].is_array())
            record_fail(paper_id, "mentions", "not an array");
        for (std::size_t i = 0; i < j["mentions"].size(); ++i) {
            paper.mentions.push_back(mention_from_json(j["mentions"][i], paper_id, i));
        }
    } else {
        std::vector<std::string> local;
        paper.mentions =
            detect_mentions_in_body(paper.body, paper.references, paper.style, &local);
        if (warnings) {
            for (std::string& w : local)
                warnings->push_back("paper '" + paper_id + "': " + w);
        }
    }
    paper.validate();
    return paper;
}

std::vector<AnnotatedPaper> load_corpus(const std::string& path,
                                        std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot open corpus file: " + path);
    std::vector<AnnotatedPaper> papers;
    std::string line;
    int line_no = 0;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            papers.push_back(parse_paper_record(line, warnings));
        } catch (const CorpusError& e) {
            throw CorpusError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!ids.insert(papers.back().paper_id).second)
            throw CorpusError(path + ":" + std::to_string(line_no) +
                              ": duplicate paper_id '" + papers.back().paper_id + "'");
    }
    return papers;
}

std::string paper_to_json(const AnnotatedPaper& paper) {
    json j;
    j["version"] = 1;
    j["paper_id"] = paper.paper_id;
    j["year"] = paper.year;
    j["citation_style"] = std::string(to_string(paper.style));
    j["sections"] = json::array();
    for (const auto& [label, sentences] : paper.sections) {
        json sec;
        sec["label"] = std::string(to_string(label));
        sec["sentences"] = sentences;
        j["sections"].push_back(std::move(sec));
    }
    j["references"] = json::array();
    for (const Reference& r : paper.references) {
        json ref;
        ref["ref_index"] = r.ref_index;
        ref["title"] = r.title;
        ref["year"] = r.year;
        ref["authors"] = r.authors;
        ref["global_cite_count"] = r.global_cite_count;
        ref["self_cite"] = r.self_cite;
        if (r.gold_label) ref["gold_label"] = *r.gold_label;
        if (!r.target_id.empty()) ref["target_id"] = r.target_id;
        j["references"].push_back(std::move(ref));
    }
    j["mentions"] = json::array();
    for (const MentionSite& m : paper.mentions) {
        json site;
        site["ref_index"] = m.ref_index;
        site["sentence_index"] = m.sentence_index;
        site["token_span"] = {m.token_span.first, m.token_span.second};
        site["section"] = std::string(to_string(m.section));
        site["appears_alone"] = m.appears_alone;
        site["appears_first_in_group"] = m.appears_first_in_group;
        site["author_name_in_context"] = m.author_name_in_context;
        j["mentions"].push_back(std::move(site));
    }
    return j.dump();
}

}  // namespace influcite::corpus
