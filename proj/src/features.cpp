#include "influcite/features.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace influcite::features {

using corpus::AnnotatedPaper;
using corpus::MentionSite;
using corpus::Reference;
using corpus::SectionLabel;
using text::TermVector;

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "countsInPaper_whole",
    "countsInPaper_secNum",
    "countsInPaper_related",
    "countsInPaper_intro",
    "countsInPaper_core",
    "sim_titleTitle",
    "sim_titleCore",
    "sim_titleIntro",
    "sim_titleConcl",
    "sim_titleAbstr",
    "sim_contextTitle",
    "sim_contextIntro",
    "sim_contextConcl",
    "sim_contextAbstr",
    "contextMeta_authorMentioned",
    "contextMeta_appearAlone",
    "contextMeta_appearFirst",
    "contextLex_relevant",
    "contextLex_recent",
    "contextLex_extreme",
    "contextLex_comparative",
    "contextLexOsg_wnPotency",
    "contextLexOsg_wnEvaluative",
    "contextLexOsg_wnActivity",
    "contextLexOsg_giPotency",
    "contextLexOsg_giEvaluative",
    "contextLexOsg_giActivity",
    "contextLexEmo_emo",
    "contextLexEmo_polarity",
    "posInSent_begin",
    "posInSent_end",
    "posInPaper_stdVar",
    "posInPaper_mean",
    "posInPaper_last",
    "posInPaper_first",
    "aux_citeCount",
    "aux_selfCite",
    "aux_yearDiff",
};

// Core sections: everything except introduction, related, acknowledgment,
// conclusion, and future (reference never reaches the body).
bool is_core_section(SectionLabel label) {
    switch (label) {
        case SectionLabel::introduction:
        case SectionLabel::related:
        case SectionLabel::acknowledgment:
        case SectionLabel::conclusion:
        case SectionLabel::future:
            return false;
        default:
            return true;
    }
}

void add_tokens(TermVector& vec, std::span<const std::string> raw_tokens) {
    for (const std::string& raw : raw_tokens) {
        for (const std::string& t : text::tokenize(raw)) vec.add(text::stem(t));
    }
}

struct SectionVectors {
    TermVector title;
    TermVector intro;
    TermVector concl;
    TermVector abstr;
    TermVector core;
};

SectionVectors build_section_vectors(const AnnotatedPaper& paper) {
    SectionVectors v;
    for (const corpus::BodySentence& s : paper.body) {
        if (s.section == SectionLabel::title) add_tokens(v.title, s.tokens);
        if (s.section == SectionLabel::introduction) add_tokens(v.intro, s.tokens);
        if (s.section == SectionLabel::conclusion) add_tokens(v.concl, s.tokens);
        if (s.section == SectionLabel::abstract) add_tokens(v.abstr, s.tokens);
        if (is_core_section(s.section)) add_tokens(v.core, s.tokens);
    }
    return v;
}

TermVector title_vector(const Reference& ref) {
    TermVector v;
    for (const std::string& t : text::tokenize(ref.title)) v.add(text::stem(t));
    return v;
}

std::vector<const MentionSite*> sites_of(const AnnotatedPaper& paper,
                                         const Reference& ref) {
    std::vector<const MentionSite*> sites;
    for (const MentionSite& m : paper.mentions) {
        if (m.ref_index == ref.ref_index) sites.push_back(&m);
    }
    return sites;
}

// +-5 tokens each side of the span, clipped to the sentence, span excluded.
std::vector<std::string> context_window(const corpus::BodySentence& sentence,
                                        const MentionSite& site) {
    const auto& tokens = sentence.tokens;
    int n = static_cast<int>(tokens.size());
    int lo = std::max(0, site.token_span.first - 5);
    int hi = std::min(n, site.token_span.second + 5);
    std::vector<std::string> window;
    for (int i = lo; i < site.token_span.first; ++i) window.push_back(tokens[i]);
    for (int i = site.token_span.second; i < hi; ++i) window.push_back(tokens[i]);
    return window;
}

int count_any_label(std::span<const std::string> context, const text::Lexicon& lex,
                    std::span<const std::string_view> labels) {
    int count = 0;
    for (const std::string& raw : context) {
        std::string word = text::normalize_word(raw);
        if (word.empty()) continue;
        auto it = lex.entries.find(word);
        if (it == lex.entries.end()) continue;
        if (lex.pos_filter && !it->second.count("adj") && !it->second.count("adv"))
            continue;
        for (std::string_view label : labels) {
            if (it->second.count(std::string(label))) {
                ++count;
                break;
            }
        }
    }
    return count;
}

constexpr std::array<std::string_view, 8> kEmotionLabels{
    "joy", "sadness", "anger", "fear", "surprise", "anticipation", "trust", "disgust",
};

constexpr std::array<std::string_view, 2> kPolarityLabels{"positive", "negative"};

}  // namespace

std::span<const std::string_view> feature_names() { return kFeatureNames; }

std::string_view feature_name(FeatureId id) {
    return kFeatureNames[static_cast<int>(id)];
}

int feature_index(std::string_view name) {
    for (int i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) return i;
    }
    return -1;
}

namespace {

const char* const kRelevantWords[] = {
    "relevant", "relevantly", "related", "relatedly", "similar", "similarly",
    "likewise", "pertinent", "applicable", "appropriate", "useful", "pivotal",
    "influential", "influenced", "comparable", "original", "originally",
    "innovative", "suggested", "interesting", "inspiring", "inspired",
};

const char* const kRecentWords[] = {
    "recent",       "recently",   "up-to-date", "latest",      "later",
    "late",         "subsequent", "subsequently", "previous",  "previously",
    "initial",      "initially",  "continuing", "continued",   "sudden",
    "current",      "currently",  "future",     "unexpected",  "upcoming",
    "expected",     "ongoing",    "imminent",   "anticipated", "unprecedented",
    "proposed",     "startling",  "preliminary", "ensuing",    "repeated",
    "reported",     "new",        "old",        "early",       "earlier",
    "earliest",     "existing",   "further",    "update",      "renewed",
    "revised",      "improved",   "extended",
};

// Partial lists; the full inventories exceed one hundred words each and are
// user-extendable through --lexicon-dir.
const char* const kExtremeWords[] = {
    "greatly", "intensely", "acutely", "almighty", "awfully", "drastically",
    "exceedingly", "exceptionally", "excessively",
};

const char* const kComparativeWords[] = {
    "easy", "easier", "easiest", "strong", "stronger", "strongest",
    "vague", "vaguer", "vaguest", "weak", "weaker", "weakest",
};

}  // namespace

LexiconSet LexiconSet::builtin() {
    LexiconSet set;
    set.relevant = text::Lexicon::from_words("relevant", kRelevantWords, "relevant");
    set.recent = text::Lexicon::from_words("recent", kRecentWords, "recent");
    set.extreme = text::Lexicon::from_words("extreme", kExtremeWords, "extreme");
    set.comparative =
        text::Lexicon::from_words("comparative", kComparativeWords, "comparative");
    return set;
}

void LexiconSet::load_dir(const std::string& dir, std::vector<std::string>* warnings) {
    namespace fs = std::filesystem;
    auto path_of = [&](const char* file) { return (fs::path(dir) / file).string(); };
    struct Builtin {
        const char* file;
        text::Lexicon* lex;
    };
    Builtin builtins[] = {
        {"relevant.lex", &relevant},
        {"recent.lex", &recent},
        {"extreme.lex", &extreme},
        {"comparative.lex", &comparative},
    };
    for (const Builtin& b : builtins) {
        std::string p = path_of(b.file);
        if (fs::exists(p)) b.lex->merge_file(p);
    }
    struct Optional {
        const char* file;
        const char* name;
        const char* affected;
        std::optional<text::Lexicon>* slot;
    };
    Optional optionals[] = {
        {"gi.lex", "gi", "contextLexOsg_gi*", &gi},
        {"wn.lex", "wn", "contextLexOsg_wn*", &wn},
        {"emotion.lex", "emotion", "contextLexEmo_*", &emotion},
    };
    for (const Optional& o : optionals) {
        std::string p = path_of(o.file);
        if (fs::exists(p)) {
            *o.slot = text::Lexicon::load_file(p, o.name);
        } else if (!o.slot->has_value() && warnings) {
            warnings->push_back(std::string("lexicon file ") + o.file +
                                " not found in " + dir + "; " + o.affected +
                                " features disabled");
        }
    }
}

std::array<double, 5> count_features(const AnnotatedPaper& paper, const Reference& ref) {
    double whole = 0, related = 0, intro = 0, core = 0;
    std::set<SectionLabel> sections_hit;
    for (const MentionSite& m : paper.mentions) {
        if (m.ref_index != ref.ref_index) continue;
        whole += 1;
        sections_hit.insert(m.section);
        if (m.section == SectionLabel::introduction) intro += 1;
        if (m.section == SectionLabel::related) related += 1;
        if (is_core_section(m.section)) core += 1;
    }
    return {whole, static_cast<double>(sections_hit.size()), related, intro, core};
}

namespace {

// Shares section vectors and citation-sentence vectors across all the
// references of one paper.
struct PaperCache {
    const AnnotatedPaper* paper = nullptr;
    SectionVectors sec;
    std::vector<std::optional<TermVector>> sentence_vectors;

    explicit PaperCache(const AnnotatedPaper& p)
        : paper(&p), sec(build_section_vectors(p)), sentence_vectors(p.body.size()) {}

    const TermVector& sentence_vector(int index) {
        auto& slot = sentence_vectors[index];
        if (!slot) {
            TermVector v;
            add_tokens(v, paper->body[index].tokens);
            slot = std::move(v);
        }
        return *slot;
    }
};

std::array<double, 5> title_similarity_cached(PaperCache& cache, const Reference& ref) {
    TermVector title = title_vector(ref);
    return {
        text::cosine(title, cache.sec.title), text::cosine(title, cache.sec.core),
        text::cosine(title, cache.sec.intro), text::cosine(title, cache.sec.concl),
        text::cosine(title, cache.sec.abstr),
    };
}

std::array<double, 4> context_similarity_cached(PaperCache& cache, const Reference& ref) {
    std::vector<const MentionSite*> sites = sites_of(*cache.paper, ref);
    if (sites.empty()) return {0, 0, 0, 0};
    double sum_title = 0, sum_intro = 0, sum_concl = 0, sum_abstr = 0;
    for (const MentionSite* m : sites) {
        const TermVector& ctx = cache.sentence_vector(m->sentence_index);
        sum_title += text::cosine(ctx, cache.sec.title);
        sum_intro += text::cosine(ctx, cache.sec.intro);
        sum_concl += text::cosine(ctx, cache.sec.concl);
        sum_abstr += text::cosine(ctx, cache.sec.abstr);
    }
    double n = static_cast<double>(sites.size());
    return {sum_title / n, sum_intro / n, sum_concl / n, sum_abstr / n};
}

}  // namespace

std::array<double, 5> title_similarity_features(const AnnotatedPaper& paper,
                                                const Reference& ref) {
    PaperCache cache(paper);
    return title_similarity_cached(cache, ref);
}

std::array<double, 4> context_similarity_features(const AnnotatedPaper& paper,
                                                  const Reference& ref) {
    PaperCache cache(paper);
    return context_similarity_cached(cache, ref);
}

std::array<double, 3> context_meta_features(std::span<const MentionSite> sites) {
    if (sites.empty()) return {0, 0, 0};
    double author = 0, alone = 0, first = 0;
    for (const MentionSite& m : sites) {
        author += m.author_name_in_context ? 1 : 0;
        alone += m.appears_alone ? 1 : 0;
        first += m.appears_first_in_group ? 1 : 0;
    }
    double n = static_cast<double>(sites.size());
    return {author / n, alone / n, first / n};
}

std::array<double, 12> context_lexical_features(const AnnotatedPaper& paper,
                                                const Reference& ref,
                                                const LexiconSet& lexicons) {
    std::vector<const MentionSite*> sites = sites_of(paper, ref);
    std::array<double, 12> sums{};
    if (sites.empty()) return sums;
    for (const MentionSite* m : sites) {
        std::vector<std::string> window =
            context_window(paper.body[m->sentence_index], *m);
        sums[0] += text::lexicon_count(window, lexicons.relevant, "relevant");
        sums[1] += text::lexicon_count(window, lexicons.recent, "recent");
        sums[2] += text::lexicon_count(window, lexicons.extreme, "extreme");
        sums[3] += text::lexicon_count(window, lexicons.comparative, "comparative");
        if (lexicons.wn) {
            sums[4] += text::lexicon_count(window, *lexicons.wn, "Strong");
            sums[5] += text::lexicon_count(window, *lexicons.wn, "Positiv");
            sums[6] += text::lexicon_count(window, *lexicons.wn, "Active");
        }
        if (lexicons.gi) {
            sums[7] += text::lexicon_count(window, *lexicons.gi, "Strong");
            sums[8] += text::lexicon_count(window, *lexicons.gi, "Positiv");
            sums[9] += text::lexicon_count(window, *lexicons.gi, "Active");
        }
        if (lexicons.emotion) {
            sums[10] += count_any_label(window, *lexicons.emotion, kEmotionLabels);
            sums[11] += count_any_label(window, *lexicons.emotion, kPolarityLabels);
        }
    }
    double n = static_cast<double>(sites.size());
    for (double& v : sums) v /= n;
    return sums;
}

std::array<double, 6> position_features(const AnnotatedPaper& paper,
                                        const Reference& ref) {
    std::vector<const MentionSite*> sites = sites_of(paper, ref);
    if (sites.empty() || paper.body.empty()) return {0, 0, 0, 0, 0, 0};
    double begin = 0, end = 0;
    std::vector<double> positions;
    positions.reserve(sites.size());
    double total = static_cast<double>(paper.body.size());
    for (const MentionSite* m : sites) {
        const auto& tokens = paper.body[m->sentence_index].tokens;
        if (m->token_span.first == 0) begin += 1;
        int last_word = -1;
        for (int i = static_cast<int>(tokens.size()) - 1; i >= 0; --i) {
            if (!text::normalize_word(tokens[i]).empty()) {
                last_word = i;
                break;
            }
        }
        if (last_word >= 0 && m->token_span.second - 1 == last_word) end += 1;
        positions.push_back(static_cast<double>(m->sentence_index) / total);
    }
    double n = static_cast<double>(sites.size());
    double mean = 0;
    for (double p : positions) mean += p;
    mean /= n;
    double var = 0;
    for (double p : positions) var += (p - mean) * (p - mean);
    var /= n;
    double first = *std::min_element(positions.begin(), positions.end());
    double last = *std::max_element(positions.begin(), positions.end());
    return {begin / n, end / n, var, mean, last, first};
}

std::array<double, 3> misc_features(const AnnotatedPaper& paper, const Reference& ref,
                                    std::vector<std::string>* warnings) {
    double cite_count = static_cast<double>(ref.global_cite_count);
    double self_cite = ref.self_cite ? 1.0 : 0.0;
    double year_diff = 0.0;
    if (ref.year <= 0 || paper.year <= 0) {
        if (warnings)
            warnings->push_back("paper '" + paper.paper_id + "': ref_index " +
                                std::to_string(ref.ref_index) +
                                ": missing year; aux_yearDiff set to 0");
    } else {
        year_diff = std::max(0, paper.year - ref.year);
    }
    return {cite_count, self_cite, year_diff};
}

namespace {

FeatureVector raw_features_cached(PaperCache& cache, const Reference& ref,
                                  const LexiconSet& lexicons,
                                  std::vector<std::string>* warnings) {
    const AnnotatedPaper& paper = *cache.paper;
    FeatureVector out;
    auto counts = count_features(paper, ref);
    auto title_sim = title_similarity_cached(cache, ref);
    auto ctx_sim = context_similarity_cached(cache, ref);
    std::vector<MentionSite> own;
    for (const MentionSite& m : paper.mentions)
        if (m.ref_index == ref.ref_index) own.push_back(m);
    auto meta = context_meta_features(own);
    auto lex = context_lexical_features(paper, ref, lexicons);
    auto pos = position_features(paper, ref);
    auto misc = misc_features(paper, ref, warnings);

    int i = 0;
    for (double v : counts) out.values[i++] = v;
    for (double v : title_sim) out.values[i++] = v;
    for (double v : ctx_sim) out.values[i++] = v;
    for (double v : meta) out.values[i++] = v;
    for (double v : lex) out.values[i++] = v;
    for (double v : pos) out.values[i++] = v;
    for (double v : misc) out.values[i++] = v;
    return out;
}

}  // namespace

FeatureVector raw_features(const AnnotatedPaper& paper, const Reference& ref,
                           const LexiconSet& lexicons,
                           std::vector<std::string>* warnings) {
    PaperCache cache(paper);
    return raw_features_cached(cache, ref, lexicons, warnings);
}

void contextual_normalize(std::span<FeatureVector> pairs_of_one_paper) {
    for (int k = 0; k < kFeatureCount; ++k) {
        double max_value = 0.0;
        for (const FeatureVector& fv : pairs_of_one_paper)
            max_value = std::max(max_value, fv.values[k]);
        if (max_value > 0.0) {
            for (FeatureVector& fv : pairs_of_one_paper) fv.values[k] /= max_value;
        } else {
            for (FeatureVector& fv : pairs_of_one_paper) fv.values[k] = 0.0;
        }
    }
}

std::vector<PairRow> extract_paper(const AnnotatedPaper& paper,
                                   const LexiconSet& lexicons,
                                   std::vector<std::string>* warnings) {
    PaperCache cache(paper);
    std::vector<FeatureVector> vectors;
    vectors.reserve(paper.references.size());
    for (const Reference& ref : paper.references)
        vectors.push_back(raw_features_cached(cache, ref, lexicons, warnings));
    contextual_normalize(vectors);
    std::vector<PairRow> rows;
    rows.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        rows.push_back(PairRow{{paper.paper_id, paper.references[i].ref_index},
                               vectors[i],
                               paper.references[i].gold_label});
    }
    return rows;
}

namespace {

std::vector<PairRow> extract_corpus_impl(std::span<const AnnotatedPaper> papers,
                                         const LexiconSet& lexicons,
                                         std::vector<std::string>* warnings,
                                         bool parallel) {
    std::vector<std::vector<PairRow>> per_paper(papers.size());
    std::vector<std::vector<std::string>> per_warnings(papers.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(papers.size()); ++i) {
            per_paper[i] = extract_paper(papers[i], lexicons, &per_warnings[i]);
        }
    } else {
        for (std::size_t i = 0; i < papers.size(); ++i) {
            per_paper[i] = extract_paper(papers[i], lexicons, &per_warnings[i]);
        }
    }
    std::vector<PairRow> rows;
    for (std::size_t i = 0; i < papers.size(); ++i) {
        rows.insert(rows.end(), std::make_move_iterator(per_paper[i].begin()),
                    std::make_move_iterator(per_paper[i].end()));
        if (warnings)
            warnings->insert(warnings->end(), per_warnings[i].begin(),
                             per_warnings[i].end());
    }
    return rows;
}

}  // namespace

std::vector<PairRow> extract_corpus(std::span<const AnnotatedPaper> papers,
                                    const LexiconSet& lexicons,
                                    std::vector<std::string>* warnings) {
    return extract_corpus_impl(papers, lexicons, warnings, true);
}

std::vector<PairRow> extract_corpus_serial(std::span<const AnnotatedPaper> papers,
                                           const LexiconSet& lexicons,
                                           std::vector<std::string>* warnings) {
    return extract_corpus_impl(papers, lexicons, warnings, false);
}

double pearson(std::span<const double> xs, std::span<const double> ys,
               bool* zero_variance) {
    if (zero_variance) *zero_variance = false;
    if (xs.size() != ys.size() || xs.size() < 2) {
        if (zero_variance) *zero_variance = true;
        return 0.0;
    }
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        if (zero_variance) *zero_variance = true;
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

namespace {

CorrelationEntry correlate(std::string name, std::span<const double> xs,
                           std::span<const double> ys) {
    CorrelationEntry entry;
    entry.name = std::move(name);
    entry.r = pearson(xs, ys, &entry.zero_variance);
    if (entry.zero_variance) entry.r = 0.0;
    return entry;
}

}  // namespace

CorrelationReport feature_label_correlations(std::span<const AnnotatedPaper> papers,
                                             const LexiconSet& lexicons) {
    std::vector<PairRow> rows = extract_corpus(papers, lexicons, nullptr);

    // Split features need raw per-pair recomputation, normalized per paper.
    constexpr int kSplitCount = 10;  // positive, negative, 8 emotions
    std::vector<std::array<double, kSplitCount>> split_values;
    std::vector<double> year_diffs;
    split_values.reserve(rows.size());
    year_diffs.reserve(rows.size());
    for (const AnnotatedPaper& paper : papers) {
        std::size_t first = split_values.size();
        for (const Reference& ref : paper.references) {
            std::array<double, kSplitCount> vals{};
            std::vector<const MentionSite*> sites = sites_of(paper, ref);
            if (!sites.empty() && lexicons.emotion) {
                for (const MentionSite* m : sites) {
                    std::vector<std::string> window =
                        context_window(paper.body[m->sentence_index], *m);
                    vals[0] += text::lexicon_count(window, *lexicons.emotion, "positive");
                    vals[1] += text::lexicon_count(window, *lexicons.emotion, "negative");
                    for (int e = 0; e < 8; ++e) {
                        vals[2 + e] += text::lexicon_count(
                            window, *lexicons.emotion, std::string(kEmotionLabels[e]));
                    }
                }
                for (double& v : vals) v /= static_cast<double>(sites.size());
            }
            split_values.push_back(vals);
            if (ref.year > 0 && paper.year > 0) {
                year_diffs.push_back(std::max(0, paper.year - ref.year));
            } else {
                year_diffs.push_back(0);
            }
        }
        // contextual normalization of the split columns within this paper
        for (int k = 0; k < kSplitCount; ++k) {
            double max_value = 0.0;
            for (std::size_t i = first; i < split_values.size(); ++i)
                max_value = std::max(max_value, split_values[i][k]);
            for (std::size_t i = first; i < split_values.size(); ++i)
                split_values[i][k] = max_value > 0 ? split_values[i][k] / max_value : 0.0;
        }
    }

    std::vector<std::size_t> labeled;
    std::vector<double> y;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].gold) {
            labeled.push_back(i);
            y.push_back(*rows[i].gold ? 1.0 : 0.0);
        }
    }
    if (labeled.empty())
        throw std::invalid_argument(
            "feature_label_correlations: corpus has no gold labels");

    CorrelationReport report;
    std::vector<double> xs(labeled.size());
    for (int k = 0; k < kFeatureCount; ++k) {
        for (std::size_t i = 0; i < labeled.size(); ++i)
            xs[i] = rows[labeled[i]].features.values[k];
        report.features.push_back(correlate(std::string(kFeatureNames[k]), xs, y));
    }

    const char* split_names[kSplitCount] = {
        "polarity_positive", "polarity_negative", "emo_joy",      "emo_sadness",
        "emo_anger",         "emo_fear",          "emo_surprise", "emo_anticipation",
        "emo_trust",         "emo_disgust",
    };
    for (int k = 0; k < kSplitCount; ++k) {
        for (std::size_t i = 0; i < labeled.size(); ++i)
            xs[i] = split_values[labeled[i]][k];
        CorrelationEntry entry = correlate(split_names[k], xs, y);
        if (k < 2)
            report.polarity_split.push_back(entry);
        else
            report.emotion_split.push_back(entry);
    }

    struct Bucket {
        std::string name;
        int lo, hi;  // inclusive; hi < 0 means open-ended
    };
    std::vector<Bucket> buckets;
    for (int v = 0; v <= 10; ++v)
        buckets.push_back({"yearDiff=" + std::to_string(v), v, v});
    buckets.push_back({"yearDiff=11-20", 11, 20});
    buckets.push_back({"yearDiff=21-30", 21, 30});
    buckets.push_back({"yearDiff=31+", 31, -1});
    for (const Bucket& b : buckets) {
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            double v = year_diffs[labeled[i]];
            bool in = v >= b.lo && (b.hi < 0 || v <= b.hi);
            xs[i] = in ? 1.0 : 0.0;
        }
        report.year_diff_buckets.push_back(correlate(b.name, xs, y));
    }
    return report;
}

namespace {

void write_double(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

void write_feature_tsv(std::ostream& out, std::span<const PairRow> rows) {
    out << "paper_id\tref_index";
    for (std::string_view name : kFeatureNames) out << '\t' << name;
    out << "\tgold_label\n";
    for (const PairRow& row : rows) {
        out << row.key.paper_id << '\t' << row.key.ref_index;
        for (double v : row.features.values) {
            out << '\t';
            write_double(out, v);
        }
        out << '\t';
        if (row.gold)
            out << (*row.gold ? '1' : '0');
        else
            out << "NA";
        out << '\n';
    }
}

std::vector<PairRow> read_feature_tsv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("feature table: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::ostringstream expected;
        expected << "paper_id\tref_index";
        for (std::string_view name : kFeatureNames) expected << '\t' << name;
        expected << "\tgold_label";
        if (line != expected.str())
            throw std::runtime_error(
                "feature table: header does not match the canonical feature order");
    }
    std::vector<PairRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '\t')) cells.push_back(cell);
        if (cells.size() != 2 + kFeatureCount + 1)
            throw std::runtime_error("feature table line " + std::to_string(line_no) +
                                     ": expected " +
                                     std::to_string(2 + kFeatureCount + 1) +
                                     " columns, got " + std::to_string(cells.size()));
        PairRow row;
        row.key.paper_id = cells[0];
        row.key.ref_index = std::stoi(cells[1]);
        for (int k = 0; k < kFeatureCount; ++k)
            row.features.values[k] = std::stod(cells[2 + k]);
        const std::string& gold = cells[2 + kFeatureCount];
        if (gold == "1")
            row.gold = true;
        else if (gold == "0")
            row.gold = false;
        else if (gold != "NA")
            throw std::runtime_error("feature table line " + std::to_string(line_no) +
                                     ": gold_label must be 0, 1, or NA");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace influcite::features
