#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace influcite::corpus {

// The twelve standardized section labels.
enum class SectionLabel {
    title,
    author,
    abstract,
    introduction,
    related,
    main,
    conclusion,
    future,
    acknowledgment,
    reference,
    appendix,
    date,
};

inline constexpr int kSectionLabelCount = 12;

std::string_view to_string(SectionLabel label);
std::optional<SectionLabel> parse_label(std::string_view name);
std::string allowed_labels_string();

// Maps a raw heading to one of the twelve labels; unmatched headings map
// to main. Total and case-insensitive.
SectionLabel standardize_section(std::string_view raw_heading);

struct Reference {
    int ref_index = 0;
    std::string title;
    int year = 0;  // 0 = unknown
    std::vector<std::string> authors;
    long long global_cite_count = 0;
    bool self_cite = false;
    std::optional<bool> gold_label;
    // Corpus-internal id of the cited paper, when known; enables building
    // a citation network from the corpus. Empty = outside the corpus.
    std::string target_id;
};

struct MentionSite {
    int ref_index = 0;
    int sentence_index = 0;
    // Half-open token range [start, end) in the body sentence.
    std::pair<int, int> token_span{0, 0};
    SectionLabel section = SectionLabel::main;
    bool appears_alone = false;
    bool appears_first_in_group = false;
    bool author_name_in_context = false;
};

bool operator==(const MentionSite& a, const MentionSite& b);

// One sentence of the paper body (every section except `reference`),
// carrying its section label. Tokens are kept as written in the input;
// the text module normalizes them when building term vectors.
struct BodySentence {
    SectionLabel section = SectionLabel::main;
    std::vector<std::string> tokens;
};

enum class CitationStyle { numeric, textual };

std::string_view to_string(CitationStyle style);
std::optional<CitationStyle> parse_style(std::string_view name);

struct AnnotatedPaper {
    std::string paper_id;
    int year = 0;
    CitationStyle style = CitationStyle::numeric;
    // Sections in document order, each a list of tokenized sentences.
    std::vector<std::pair<SectionLabel, std::vector<std::vector<std::string>>>> sections;
    std::vector<Reference> references;
    std::vector<MentionSite> mentions;
    // Flattened body (reference sections excluded); mention sentence
    // indexes refer to this list.
    std::vector<BodySentence> body;

    const Reference* find_reference(int ref_index) const;
    void rebuild_body();
    // Throws CorpusError naming paper_id and field on any invariant breach.
    void validate() const;
};

class CorpusError : public std::runtime_error {
public:
    explicit CorpusError(const std::string& what) : std::runtime_error(what) {}
};

// Splits raw sentence text into tokens, keeping bracketed citation groups
// ("[4,5]") and parenthesized years ("(1998)") as single tokens.
std::vector<std::string> tokenize_body_text(std::string_view text);

// Detects citation mentions over tokenized body sentences. Numeric ranges
// expand ("[7-10]" yields sites for 7,8,9,10); group flags are set per
// bracket group; unresolvable ids produce a warning and are skipped.
std::vector<MentionSite> detect_mentions_in_body(
    std::span<const BodySentence> body, std::span<const Reference> references,
    CitationStyle style, std::vector<std::string>* warnings = nullptr);

// Convenience entry point: splits and tokenizes raw text (treated as one
// main-labeled section), then detects mentions.
std::vector<MentionSite> detect_mentions(const std::string& raw_body,
                                         std::span<const Reference> references,
                                         CitationStyle style,
                                         std::vector<std::string>* warnings = nullptr);

// Loads a JSON-lines corpus file (see docs/corpus-format in README).
// Precomputed mentions are validated; absent mentions are detected.
std::vector<AnnotatedPaper> load_corpus(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr);

// Parses one JSONL record; exposed for tests and streaming use.
AnnotatedPaper parse_paper_record(const std::string& json_line,
                                  std::vector<std::string>* warnings = nullptr);

// Serializes a paper back to a JSONL record (with mentions filled in).
std::string paper_to_json(const AnnotatedPaper& paper);

}  // namespace influcite::corpus
