#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "influcite/corpus.hpp"
#include "influcite/textproc.hpp"

namespace influcite::features {

inline constexpr int kFeatureCount = 38;

// Canonical feature order; serialized vectors and model files rely on it.
enum class FeatureId : int {
    countsInPaper_whole = 0,
    countsInPaper_secNum,
    countsInPaper_related,
    countsInPaper_intro,
    countsInPaper_core,
    sim_titleTitle,
    sim_titleCore,
    sim_titleIntro,
    sim_titleConcl,
    sim_titleAbstr,
    sim_contextTitle,
    sim_contextIntro,
    sim_contextConcl,
    sim_contextAbstr,
    contextMeta_authorMentioned,
    contextMeta_appearAlone,
    contextMeta_appearFirst,
    contextLex_relevant,
    contextLex_recent,
    contextLex_extreme,
    contextLex_comparative,
    contextLexOsg_wnPotency,
    contextLexOsg_wnEvaluative,
    contextLexOsg_wnActivity,
    contextLexOsg_giPotency,
    contextLexOsg_giEvaluative,
    contextLexOsg_giActivity,
    contextLexEmo_emo,
    contextLexEmo_polarity,
    posInSent_begin,
    posInSent_end,
    posInPaper_stdVar,
    posInPaper_mean,
    posInPaper_last,
    posInPaper_first,
    aux_citeCount,
    aux_selfCite,
    aux_yearDiff,
};

std::span<const std::string_view> feature_names();
std::string_view feature_name(FeatureId id);
// -1 when the name is unknown.
int feature_index(std::string_view name);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double& operator[](FeatureId id) { return values[static_cast<int>(id)]; }
    double operator[](FeatureId id) const { return values[static_cast<int>(id)]; }
};

struct PairKey {
    std::string paper_id;
    int ref_index = 0;
};

struct PairRow {
    PairKey key;
    FeatureVector features;
    std::optional<bool> gold;
};

// Lexicon inventory for the context-based features. The four short lists
// ship built in; General Inquirer, WordNet-extended, and emotion lexicons
// are loaded from files and their features stay disabled when absent.
struct LexiconSet {
    text::Lexicon relevant;
    text::Lexicon recent;
    text::Lexicon extreme;
    text::Lexicon comparative;
    std::optional<text::Lexicon> gi;
    std::optional<text::Lexicon> wn;
    std::optional<text::Lexicon> emotion;

    static LexiconSet builtin();
    // Reads relevant.lex/recent.lex/extreme.lex/comparative.lex (replacing
    // the built-ins) and gi.lex/wn.lex/emotion.lex from a directory;
    // missing optional files produce one warning each.
    void load_dir(const std::string& dir, std::vector<std::string>* warnings = nullptr);
};

// Raw (pre-normalization) extractors. Order within each array matches the
// FeatureId block for that family.
std::array<double, 5> count_features(const corpus::AnnotatedPaper& paper,
                                     const corpus::Reference& ref);
std::array<double, 5> title_similarity_features(const corpus::AnnotatedPaper& paper,
                                                const corpus::Reference& ref);
std::array<double, 4> context_similarity_features(const corpus::AnnotatedPaper& paper,
                                                  const corpus::Reference& ref);
std::array<double, 3> context_meta_features(std::span<const corpus::MentionSite> sites);
std::array<double, 12> context_lexical_features(const corpus::AnnotatedPaper& paper,
                                                const corpus::Reference& ref,
                                                const LexiconSet& lexicons);
std::array<double, 6> position_features(const corpus::AnnotatedPaper& paper,
                                        const corpus::Reference& ref);
std::array<double, 3> misc_features(const corpus::AnnotatedPaper& paper,
                                    const corpus::Reference& ref,
                                    std::vector<std::string>* warnings = nullptr);

FeatureVector raw_features(const corpus::AnnotatedPaper& paper,
                           const corpus::Reference& ref, const LexiconSet& lexicons,
                           std::vector<std::string>* warnings = nullptr);

// Per-paper contextual normalization: every feature is divided by its
// maximum over the paper's references; a zero maximum normalizes to zero.
// Binary features are unchanged by this by construction.
void contextual_normalize(std::span<FeatureVector> pairs_of_one_paper);

// Extracts normalized vectors for one paper, in reference order.
std::vector<PairRow> extract_paper(const corpus::AnnotatedPaper& paper,
                                   const LexiconSet& lexicons,
                                   std::vector<std::string>* warnings = nullptr);

// Whole-corpus extraction. The parallel version distributes papers over
// OpenMP threads; results are identical to the serial reference for any
// thread count.
std::vector<PairRow> extract_corpus(std::span<const corpus::AnnotatedPaper> papers,
                                    const LexiconSet& lexicons,
                                    std::vector<std::string>* warnings = nullptr);
std::vector<PairRow> extract_corpus_serial(std::span<const corpus::AnnotatedPaper> papers,
                                           const LexiconSet& lexicons,
                                           std::vector<std::string>* warnings = nullptr);

// Pearson correlation; *zero_variance is set when either side is constant
// (r is reported as 0 in that case).
double pearson(std::span<const double> xs, std::span<const double> ys,
               bool* zero_variance = nullptr);

struct CorrelationEntry {
    std::string name;
    double r = 0.0;
    bool zero_variance = false;
};

struct CorrelationReport {
    // All 38 features against the gold labels, in canonical order.
    std::vector<CorrelationEntry> features;
    // contextLexEmo_polarity split into positive/negative counts.
    std::vector<CorrelationEntry> polarity_split;
    // contextLexEmo_emo split into the eight basic emotions.
    std::vector<CorrelationEntry> emotion_split;
    // aux_yearDiff discretized over 0..10, 11-20, 21-30, 31+.
    std::vector<CorrelationEntry> year_diff_buckets;
};

// Correlates normalized features with gold influence labels over all pairs
// that carry a label. Throws std::invalid_argument when no labeled pairs
// exist.
CorrelationReport feature_label_correlations(
    std::span<const corpus::AnnotatedPaper> papers, const LexiconSet& lexicons);

// Feature dump: TSV with a header row, one row per pair
// (paper_id, ref_index, 38 features, gold_label as 0/1/NA).
void write_feature_tsv(std::ostream& out, std::span<const PairRow> rows);
std::vector<PairRow> read_feature_tsv(std::istream& in);

}  // namespace influcite::features
