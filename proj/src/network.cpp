#include "influcite/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace influcite::network {

int CitationNetwork::add_paper(const std::string& paper_id) {
    auto [it, fresh] = paper_index_.try_emplace(paper_id, static_cast<int>(paper_ids_.size()));
    if (fresh) {
        paper_ids_.push_back(paper_id);
        out_.emplace_back();
        in_.emplace_back();
    }
    return it->second;
}

bool CitationNetwork::add_edge(const std::string& citing, const std::string& cited,
                               long long count) {
    if (count < 1) throw std::invalid_argument("add_edge: count must be >= 1");
    if (citing == cited) return false;  // no self-edges
    int x = add_paper(citing);
    int y = add_paper(cited);
    for (auto& [to, c] : out_[x]) {
        if (to == y) {
            c += count;
            for (auto& [from, cin] : in_[y]) {
                if (from == x) {
                    cin += count;
                    break;
                }
            }
            return true;
        }
    }
    out_[x].emplace_back(y, count);
    in_[y].emplace_back(x, count);
    return true;
}

void CitationNetwork::add_author(const std::string& author_id,
                                 const std::string& paper_id) {
    int p = add_paper(paper_id);
    auto& papers = authors_[author_id];
    if (std::find(papers.begin(), papers.end(), p) == papers.end()) papers.push_back(p);
}

std::size_t CitationNetwork::edge_count() const {
    std::size_t n = 0;
    for (const auto& edges : out_) n += edges.size();
    return n;
}

bool CitationNetwork::has_paper(const std::string& paper_id) const {
    return paper_index_.count(paper_id) > 0;
}

int CitationNetwork::require_paper(const std::string& paper_id) const {
    auto it = paper_index_.find(paper_id);
    if (it == paper_index_.end())
        throw std::invalid_argument("unknown paper: " + paper_id);
    return it->second;
}

long long CitationNetwork::mention_count(const std::string& citing,
                                         const std::string& cited) const {
    auto x = paper_index_.find(citing);
    auto y = paper_index_.find(cited);
    if (x == paper_index_.end() || y == paper_index_.end()) return 0;
    for (const auto& [to, c] : out_[x->second]) {
        if (to == y->second) return c;
    }
    return 0;
}

long long CitationNetwork::conventional_count(const std::string& paper_id) const {
    return static_cast<long long>(in_[require_paper(paper_id)].size());
}

namespace {

long long ipow(long long base, int exponent) {
    long long r = 1;
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

}  // namespace

long long CitationNetwork::cip(const std::string& paper_id, int exponent) const {
    if (exponent < 1) throw std::invalid_argument("cip: exponent must be >= 1");
    long long total = 0;
    for (const auto& [from, c] : in_[require_paper(paper_id)]) total += ipow(c, exponent);
    return total;
}

std::vector<long long> CitationNetwork::all_conventional_counts() const {
    std::vector<long long> out(paper_ids_.size());
    for (std::size_t i = 0; i < in_.size(); ++i)
        out[i] = static_cast<long long>(in_[i].size());
    return out;
}

namespace {

std::vector<long long> all_cip_impl(
    const std::vector<std::vector<std::pair<int, long long>>>& in, int exponent,
    bool parallel) {
    std::vector<long long> out(in.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(in.size()); ++i) {
            long long total = 0;
            for (const auto& [from, c] : in[i]) total += ipow(c, exponent);
            out[i] = total;
        }
    } else {
        for (std::size_t i = 0; i < in.size(); ++i) {
            long long total = 0;
            for (const auto& [from, c] : in[i]) total += ipow(c, exponent);
            out[i] = total;
        }
    }
    return out;
}

// Largest h with at least h values >= h.
int h_from_counts(std::vector<long long> counts) {
    std::sort(counts.begin(), counts.end(), std::greater<long long>());
    int h = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] >= static_cast<long long>(i + 1))
            h = static_cast<int>(i + 1);
        else
            break;
    }
    return h;
}

}  // namespace

std::vector<long long> CitationNetwork::all_cip(int exponent) const {
    if (exponent < 1) throw std::invalid_argument("cip: exponent must be >= 1");
    return all_cip_impl(in_, exponent, true);
}

std::vector<long long> CitationNetwork::all_cip_serial(int exponent) const {
    if (exponent < 1) throw std::invalid_argument("cip: exponent must be >= 1");
    return all_cip_impl(in_, exponent, false);
}

long long CitationNetwork::paper_metric(int paper, Counting counting,
                                        int exponent) const {
    if (counting == Counting::conventional)
        return static_cast<long long>(in_[paper].size());
    long long total = 0;
    for (const auto& [from, c] : in_[paper]) total += ipow(c, exponent);
    return total;
}

int CitationNetwork::h_index(const std::string& author_id, Counting counting,
                             int exponent) const {
    auto it = authors_.find(author_id);
    if (it == authors_.end())
        throw std::invalid_argument("unknown author: " + author_id);
    std::vector<long long> counts;
    counts.reserve(it->second.size());
    for (int p : it->second) counts.push_back(paper_metric(p, counting, exponent));
    return h_from_counts(std::move(counts));
}

namespace {

std::map<std::string, int> all_h_impl(
    const std::map<std::string, std::vector<int>>& authors,
    const std::vector<long long>& metric, bool parallel) {
    std::vector<const std::pair<const std::string, std::vector<int>>*> entries;
    entries.reserve(authors.size());
    for (const auto& entry : authors) entries.push_back(&entry);
    std::vector<int> values(entries.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(entries.size()); ++i) {
            std::vector<long long> counts;
            counts.reserve(entries[i]->second.size());
            for (int p : entries[i]->second) counts.push_back(metric[p]);
            values[i] = h_from_counts(std::move(counts));
        }
    } else {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::vector<long long> counts;
            counts.reserve(entries[i]->second.size());
            for (int p : entries[i]->second) counts.push_back(metric[p]);
            values[i] = h_from_counts(std::move(counts));
        }
    }
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        out.emplace(entries[i]->first, values[i]);
    return out;
}

}  // namespace

std::map<std::string, int> CitationNetwork::all_h_indexes(Counting counting,
                                                          int exponent) const {
    std::vector<long long> metric = counting == Counting::conventional
                                        ? all_conventional_counts()
                                        : all_cip(exponent);
    return all_h_impl(authors_, metric, true);
}

std::map<std::string, int> CitationNetwork::all_h_indexes_serial(Counting counting,
                                                                 int exponent) const {
    std::vector<long long> metric = counting == Counting::conventional
                                        ? all_conventional_counts()
                                        : all_cip_serial(exponent);
    return all_h_impl(authors_, metric, false);
}

CitationNetwork CitationNetwork::filter_edges(const FilterSpec& spec) const {
    if (spec.min_count < 1 || spec.max_rank < 1)
        throw std::invalid_argument("filter_edges: T1 and T2 must be >= 1");
    CitationNetwork out;
    for (const std::string& id : paper_ids_) out.add_paper(id);
    for (std::size_t x = 0; x < out_.size(); ++x) {
        // rank references by count descending; stable keeps insertion order
        std::vector<std::size_t> order(out_[x].size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return out_[x][a].second > out_[x][b].second;
        });
        std::vector<bool> keep(out_[x].size(), false);
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            if (static_cast<long long>(rank) >= spec.max_rank) break;
            keep[order[rank]] = true;
        }
        for (std::size_t e = 0; e < out_[x].size(); ++e) {
            const auto& [y, c] = out_[x][e];
            if (keep[e] && c >= spec.min_count)
                out.add_edge(paper_ids_[x], paper_ids_[y], c);
        }
    }
    for (const auto& [author, papers] : authors_) {
        for (int p : papers) out.add_author(author, paper_ids_[p]);
    }
    return out;
}

CitationNetwork CitationNetwork::load(const std::string& edges_path,
                                      const std::string& authors_path,
                                      const std::string& paper_list_path,
                                      std::vector<std::string>* warnings) {
    CitationNetwork net;
    std::set<std::string> allowed;
    bool restricted = !paper_list_path.empty();
    if (restricted) {
        std::ifstream in(paper_list_path);
        if (!in) throw std::runtime_error("cannot open paper list: " + paper_list_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            allowed.insert(line);
            net.add_paper(line);
        }
    }
    auto in_scope = [&](const std::string& id) { return !restricted || allowed.count(id); };

    std::ifstream in(edges_path);
    if (!in) throw std::runtime_error("cannot open edge list: " + edges_path);
    std::string line;
    int line_no = 0;
    int dropped = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string citing, cited, count_str;
        if (!std::getline(ss, citing, '\t') || !std::getline(ss, cited, '\t') ||
            !std::getline(ss, count_str, '\t') || citing.empty() || cited.empty())
            throw std::runtime_error(edges_path + ":" + std::to_string(line_no) +
                                     ": expected `citing<TAB>cited<TAB>count`");
        long long count = 0;
        try {
            count = std::stoll(count_str);
        } catch (...) {
            throw std::runtime_error(edges_path + ":" + std::to_string(line_no) +
                                     ": bad mention count '" + count_str + "'");
        }
        if (count < 1)
            throw std::runtime_error(edges_path + ":" + std::to_string(line_no) +
                                     ": mention count must be >= 1");
        if (!in_scope(citing) || !in_scope(cited)) {
            ++dropped;
            continue;
        }
        if (!net.add_edge(citing, cited, count) && warnings)
            warnings->push_back(edges_path + ":" + std::to_string(line_no) +
                                ": self-citation edge dropped (" + citing + ")");
    }
    if (dropped > 0 && warnings)
        warnings->push_back(edges_path + ": dropped " + std::to_string(dropped) +
                            " edge(s) outside the closed paper list");

    if (!authors_path.empty()) {
        std::ifstream ain(authors_path);
        if (!ain) throw std::runtime_error("cannot open author file: " + authors_path);
        int aline = 0;
        while (std::getline(ain, line)) {
            ++aline;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::stringstream ss(line);
            std::string author, paper;
            if (!std::getline(ss, author, '\t') || !std::getline(ss, paper, '\t') ||
                author.empty() || paper.empty())
                throw std::runtime_error(authors_path + ":" + std::to_string(aline) +
                                         ": expected `author<TAB>paper`");
            if (!in_scope(paper)) continue;
            net.add_author(author, paper);
        }
    }
    return net;
}

namespace {

// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) return std::nullopt;
    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double dx = rx[i] - mx;
        double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::pair<std::string, long long>> paper_leaderboard(
    const CitationNetwork& net, Counting counting, int exponent) {
    std::vector<long long> metric = counting == Counting::conventional
                                        ? net.all_conventional_counts()
                                        : net.all_cip(exponent);
    std::vector<std::pair<std::string, long long>> board;
    board.reserve(net.paper_count());
    for (std::size_t i = 0; i < net.paper_ids().size(); ++i)
        board.emplace_back(net.paper_ids()[i], metric[i]);
    std::sort(board.begin(), board.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return board;
}

std::vector<std::pair<std::string, int>> author_leaderboard(const CitationNetwork& net,
                                                            Counting counting,
                                                            int exponent) {
    std::map<std::string, int> h = net.all_h_indexes(counting, exponent);
    std::vector<std::pair<std::string, int>> board(h.begin(), h.end());
    std::sort(board.begin(), board.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return board;
}

std::vector<GroupCorrelation> grouped_rank_correlation(const CitationNetwork& net,
                                                       Entity entity, int group_size,
                                                       int exponent) {
    if (group_size < 2)
        throw std::invalid_argument("grouped_rank_correlation: group_size must be >= 2");
    std::vector<double> conventional;
    std::vector<double> primed;
    if (entity == Entity::papers) {
        auto board = paper_leaderboard(net, Counting::conventional, exponent);
        std::vector<long long> cip_metric = net.all_cip(exponent);
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < net.paper_ids().size(); ++i)
            index[net.paper_ids()[i]] = i;
        for (const auto& [id, value] : board) {
            conventional.push_back(static_cast<double>(value));
            primed.push_back(static_cast<double>(cip_metric[index[id]]));
        }
    } else {
        auto board = author_leaderboard(net, Counting::conventional, exponent);
        std::map<std::string, int> hip = net.all_h_indexes(Counting::primed, exponent);
        for (const auto& [id, value] : board) {
            conventional.push_back(static_cast<double>(value));
            primed.push_back(static_cast<double>(hip.at(id)));
        }
    }
    std::size_t n = conventional.size();
    if (n < static_cast<std::size_t>(group_size))
        throw std::invalid_argument(
            "grouped_rank_correlation: fewer entities than one group");
    std::vector<GroupCorrelation> groups;
    for (std::size_t start = 0; start + group_size <= n; start += group_size) {
        GroupCorrelation g;
        g.first = static_cast<int>(start + 1);
        g.last = static_cast<int>(start + group_size);
        g.rho = spearman(
            std::span<const double>(conventional.data() + start, group_size),
            std::span<const double>(primed.data() + start, group_size));
        groups.push_back(g);
    }
    return groups;
}

double precision_at_n(std::span<const std::string> ranked,
                      const std::set<std::string>& honorees, int n) {
    if (n < 1) throw std::invalid_argument("precision_at_n: N must be >= 1");
    if (static_cast<std::size_t>(n) > ranked.size())
        throw std::invalid_argument("precision_at_n: N exceeds the ranked list");
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += honorees.count(ranked[i]) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(n);
}

template <typename Score>
PrecisionInterval precision_at_n_interval(
    std::span<const std::pair<std::string, Score>> ranked_with_scores,
    const std::set<std::string>& honorees, int n) {
    if (n < 1) throw std::invalid_argument("precision_at_n: N must be >= 1");
    if (static_cast<std::size_t>(n) > ranked_with_scores.size())
        throw std::invalid_argument("precision_at_n: N exceeds the ranked list");
    // Entries strictly above the score at the cut always count; the tie
    // group straddling the boundary can be ordered either way.
    Score cut = ranked_with_scores[n - 1].second;
    int sure_hits = 0;
    int slots_in_tie = 0;
    int tie_honorees = 0;
    int tie_size = 0;
    for (std::size_t i = 0; i < ranked_with_scores.size(); ++i) {
        const auto& [id, score] = ranked_with_scores[i];
        if (score > cut) {
            if (static_cast<int>(i) < n && honorees.count(id)) ++sure_hits;
        } else if (score == cut) {
            ++tie_size;
            if (static_cast<int>(i) < n) ++slots_in_tie;
            if (honorees.count(id)) ++tie_honorees;
        }
    }
    int best = sure_hits + std::min(slots_in_tie, tie_honorees);
    int worst = sure_hits + std::max(0, slots_in_tie - (tie_size - tie_honorees));
    PrecisionInterval out;
    out.pessimistic = static_cast<double>(worst) / n;
    out.optimistic = static_cast<double>(best) / n;
    return out;
}

template PrecisionInterval precision_at_n_interval<long long>(
    std::span<const std::pair<std::string, long long>>, const std::set<std::string>&,
    int);
template PrecisionInterval precision_at_n_interval<int>(
    std::span<const std::pair<std::string, int>>, const std::set<std::string>&, int);

double average_precision(std::span<const std::string> ranked,
                         const std::set<std::string>& honorees, int cutoff,
                         int total_relevant) {
    if (total_relevant < 1)
        throw std::invalid_argument("average_precision: n_r must be >= 1");
    if (cutoff < 0 || static_cast<std::size_t>(cutoff) > ranked.size())
        throw std::invalid_argument("average_precision: n_c exceeds the ranked list");
    double sum = 0.0;
    int hits = 0;
    for (int k = 1; k <= cutoff; ++k) {
        bool rel = honorees.count(ranked[k - 1]) > 0;
        if (rel) ++hits;
        double p_at_k = static_cast<double>(hits) / static_cast<double>(k);
        if (rel) sum += p_at_k;
    }
    return sum / static_cast<double>(total_relevant);
}

std::set<std::string> load_honorees(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open honoree file: " + path);
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        out.insert(line);
    }
    return out;
}

}  // namespace influcite::network
