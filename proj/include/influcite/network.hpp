#pragma once

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace influcite::network {

inline constexpr long long kNoRankLimit = std::numeric_limits<long long>::max();

// T1: minimum in-paper mention count; T2: edges survive only while the
// cited paper's 0-based rank among the citer's references (descending by
// mention count, ties in insertion order) stays below T2.
struct FilterSpec {
    long long min_count = 1;        // T1 >= 1
    long long max_rank = kNoRankLimit;  // T2 >= 1
};

enum class Counting { conventional, primed };

// Directed citation multigraph over a closed literature: per-edge in-paper
// mention counts plus author ownership. Immutable once built; all metric
// queries are read-only.
class CitationNetwork {
public:
    // Returns the paper's dense index, adding it if new.
    int add_paper(const std::string& paper_id);
    // Records that `citing` mentions `cited` `count` times. Repeated edges
    // accumulate. Self-citations are dropped (returns false).
    bool add_edge(const std::string& citing, const std::string& cited, long long count);
    void add_author(const std::string& author_id, const std::string& paper_id);

    std::size_t paper_count() const { return paper_ids_.size(); }
    std::size_t edge_count() const;
    const std::vector<std::string>& paper_ids() const { return paper_ids_; }
    const std::map<std::string, std::vector<int>>& authors() const { return authors_; }
    bool has_paper(const std::string& paper_id) const;

    long long mention_count(const std::string& citing, const std::string& cited) const;

    // Number of papers citing the given paper (in-degree). Throws on an
    // unknown paper.
    long long conventional_count(const std::string& paper_id) const;

    // Influence-primed citation count: sum of mention counts raised to
    // `exponent` over incoming edges (exponent 2 is the validated default).
    long long cip(const std::string& paper_id, int exponent = 2) const;

    // Per-paper metrics for the whole network, indexed like paper_ids().
    // The parallel version matches the serial reference for any thread count.
    std::vector<long long> all_conventional_counts() const;
    std::vector<long long> all_cip(int exponent = 2) const;
    std::vector<long long> all_cip_serial(int exponent = 2) const;

    // h-index over the author's papers, counting either in-degree
    // (conventional) or cip (primed: the hip-index). Throws on an unknown
    // author.
    int h_index(const std::string& author_id, Counting counting,
                int exponent = 2) const;

    // h or hip for every author, author id -> value.
    std::map<std::string, int> all_h_indexes(Counting counting, int exponent = 2) const;
    std::map<std::string, int> all_h_indexes_serial(Counting counting,
                                                    int exponent = 2) const;

    // Keeps edge (x,y) iff c(x,y) >= T1 and rank(y) < T2 among x's
    // references. filter({1, kNoRankLimit}) is the identity.
    CitationNetwork filter_edges(const FilterSpec& spec) const;

    // Edge list: `citing<TAB>cited<TAB>count`; author file:
    // `author<TAB>paper`. '#' comments and blank lines are skipped. When
    // `paper_list_path` is given, papers outside the list are dropped along
    // with their edges (closed-graph ingestion).
    static CitationNetwork load(const std::string& edges_path,
                                const std::string& authors_path = "",
                                const std::string& paper_list_path = "",
                                std::vector<std::string>* warnings = nullptr);

private:
    std::vector<std::string> paper_ids_;
    std::map<std::string, int> paper_index_;
    // insertion order preserved per citer; drives the T2 tie rule
    std::vector<std::vector<std::pair<int, long long>>> out_;
    std::vector<std::vector<std::pair<int, long long>>> in_;
    std::map<std::string, std::vector<int>> authors_;

    int require_paper(const std::string& paper_id) const;
    long long paper_metric(int paper, Counting counting, int exponent) const;
};

// Spearman rank correlation with average ranks for ties; nullopt when
// fewer than two points or either side has zero rank variance.
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

struct GroupCorrelation {
    // 1-based inclusive leaderboard positions, e.g. 1-100.
    int first = 0;
    int last = 0;
    std::optional<double> rho;
};

enum class Entity { papers, authors };

// Entities ranked by the conventional metric (descending, ties by id);
// consecutive complete groups of `group_size`; per group the Spearman
// correlation between conventional and influence-primed values. Throws
// when not even one complete group exists.
std::vector<GroupCorrelation> grouped_rank_correlation(const CitationNetwork& net,
                                                       Entity entity, int group_size,
                                                       int exponent = 2);

// Deterministic leaderboards: metric descending, ties by id ascending.
std::vector<std::pair<std::string, long long>> paper_leaderboard(
    const CitationNetwork& net, Counting counting, int exponent = 2);
std::vector<std::pair<std::string, int>> author_leaderboard(const CitationNetwork& net,
                                                            Counting counting,
                                                            int exponent = 2);

// |top-N ∩ honorees| / N over an already-ranked list. Throws when N < 1 or
// N exceeds the list.
double precision_at_n(std::span<const std::string> ranked,
                      const std::set<std::string>& honorees, int n);

// Precision-at-N bounds over all orderings of tied scores.
struct PrecisionInterval {
    double pessimistic = 0.0;
    double optimistic = 0.0;
};
template <typename Score>
PrecisionInterval precision_at_n_interval(
    std::span<const std::pair<std::string, Score>> ranked_with_scores,
    const std::set<std::string>& honorees, int n);

// AveP(n_c) = sum_{k=1..n_c} P(k)*rel(k) / n_r. Throws when n_c exceeds
// the list or n_r < 1.
double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& honorees, int cutoff,
                         int total_relevant);

std::set<std::string> load_honorees(const std::string& path);

}  // namespace influcite::network
