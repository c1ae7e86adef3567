#include "influcite/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "influcite/rng.hpp"

namespace influcite::model {

namespace {

constexpr std::size_t kChunk = 256;

double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

double linear(std::span<const double> weights, std::span<const double> x) {
    double z = weights[0];
    for (std::size_t j = 0; j < x.size(); ++j) z += weights[j + 1] * x[j];
    return z;
}

void format_double(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

}  // namespace

double LogisticModel::probability(std::span<const double> x) const {
    return sigmoid(linear(weights, x));
}

void LogisticModel::save(std::ostream& out) const {
    out << "influcite-model v1\n";
    out << "seed\t" << seed << "\n";
    out << "threshold\t";
    format_double(out, threshold);
    out << "\n";
    out << "capped\t" << (capped ? 1 : 0) << "\n";
    out << "features";
    for (const std::string& f : feature_names) out << '\t' << f;
    out << "\n";
    out << "weights";
    for (double w : weights) {
        out << '\t';
        format_double(out, w);
    }
    out << "\n";
}

LogisticModel LogisticModel::load(std::istream& in) {
    auto next_line = [&](const char* what) {
        std::string line;
        if (!std::getline(in, line))
            throw std::runtime_error(std::string("model file: missing ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    if (next_line("header") != "influcite-model v1")
        throw std::runtime_error("model file: bad header (expected 'influcite-model v1')");
    LogisticModel model;
    auto split_tabs = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, '\t')) cells.push_back(cell);
        return cells;
    };
    auto expect = [&](const std::string& line, const char* key) {
        auto cells = split_tabs(line);
        if (cells.empty() || cells[0] != key)
            throw std::runtime_error(std::string("model file: expected '") + key + "' line");
        return cells;
    };
    model.seed = std::stoull(expect(next_line("seed"), "seed").at(1));
    model.threshold = std::stod(expect(next_line("threshold"), "threshold").at(1));
    model.capped = std::stoi(expect(next_line("capped"), "capped").at(1)) != 0;
    auto feats = expect(next_line("features"), "features");
    model.feature_names.assign(feats.begin() + 1, feats.end());
    auto ws = expect(next_line("weights"), "weights");
    for (std::size_t i = 1; i < ws.size(); ++i) model.weights.push_back(std::stod(ws[i]));
    if (model.weights.size() != model.feature_names.size() + 1)
        throw std::runtime_error("model file: weight count must be feature count + 1");
    for (double w : model.weights) {
        if (!std::isfinite(w)) throw std::runtime_error("model file: non-finite weight");
    }
    return model;
}

Dataset Dataset::from_rows(std::span<const features::PairRow> rows,
                           std::span<const std::string> feature_subset) {
    Dataset data;
    std::vector<int> columns;
    for (const std::string& name : feature_subset) {
        int idx = features::feature_index(name);
        if (idx < 0) throw std::invalid_argument("unknown feature: " + name);
        columns.push_back(idx);
        data.feature_names.push_back(name);
    }
    for (const features::PairRow& row : rows) {
        if (!row.gold) continue;
        std::vector<double> x(columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j)
            x[j] = row.features.values[columns[j]];
        data.x.push_back(std::move(x));
        data.y.push_back(*row.gold ? 1 : 0);
        data.keys.push_back(row.key);
    }
    return data;
}

namespace {

// Fixed-size chunks keep the floating-point summation order independent of
// the thread count.
template <typename PartialFn>
std::vector<std::vector<double>> chunk_partials(std::size_t n, std::size_t width,
                                                bool parallel, PartialFn fn) {
    std::size_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> partials(n_chunks, std::vector<double>(width, 0.0));
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
            std::size_t begin = static_cast<std::size_t>(c) * kChunk;
            std::size_t end = std::min(n, begin + kChunk);
            fn(begin, end, partials[c]);
        }
    } else {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            std::size_t begin = c * kChunk;
            std::size_t end = std::min(n, begin + kChunk);
            fn(begin, end, partials[c]);
        }
    }
    return partials;
}

std::vector<double> gradient_impl(std::span<const double> weights, const Dataset& data,
                                  bool parallel) {
    std::size_t width = weights.size();
    auto partials = chunk_partials(
        data.x.size(), width, parallel,
        [&](std::size_t begin, std::size_t end, std::vector<double>& out) {
            for (std::size_t i = begin; i < end; ++i) {
                double p = sigmoid(linear(weights, data.x[i]));
                double r = static_cast<double>(data.y[i]) - p;
                out[0] += r;
                for (std::size_t j = 0; j + 1 < width; ++j) out[j + 1] += r * data.x[i][j];
            }
        });
    std::vector<double> grad(width, 0.0);
    for (const auto& part : partials) {
        for (std::size_t j = 0; j < width; ++j) grad[j] += part[j];
    }
    return grad;
}

double log_likelihood_impl(std::span<const double> weights, const Dataset& data,
                           bool parallel) {
    auto partials = chunk_partials(
        data.x.size(), 1, parallel,
        [&](std::size_t begin, std::size_t end, std::vector<double>& out) {
            for (std::size_t i = begin; i < end; ++i) {
                double z = linear(weights, data.x[i]);
                double y = static_cast<double>(data.y[i]);
                // y*z - log(1 + e^z), computed stably
                double log1pe = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
                out[0] += y * z - log1pe;
            }
        });
    double ll = 0.0;
    for (const auto& part : partials) ll += part[0];
    return ll;
}

}  // namespace

double log_likelihood(std::span<const double> weights, const Dataset& data) {
    return log_likelihood_impl(weights, data, true);
}

std::vector<double> ll_gradient(std::span<const double> weights, const Dataset& data) {
    return gradient_impl(weights, data, true);
}

std::vector<double> ll_gradient_serial(std::span<const double> weights,
                                       const Dataset& data) {
    return gradient_impl(weights, data, false);
}

namespace {

Dataset downsample_negatives(const Dataset& data, std::uint64_t seed) {
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        (data.y[i] == 1 ? positives : negatives).push_back(i);
    }
    if (negatives.size() <= positives.size()) return data;
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> chosen =
        rng::sample_without_replacement(gen, negatives.size(), positives.size());
    std::vector<std::size_t> keep = positives;
    for (std::size_t c : chosen) keep.push_back(negatives[c]);
    std::sort(keep.begin(), keep.end());
    Dataset out;
    out.feature_names = data.feature_names;
    for (std::size_t i : keep) {
        out.x.push_back(data.x[i]);
        out.y.push_back(data.y[i]);
        out.keys.push_back(data.keys[i]);
    }
    return out;
}

double pick_threshold(const LogisticModel& model, const Dataset& data) {
    std::size_t n = data.y.size();
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) probs[i] = model.probability(data.x[i]);
    std::size_t positives = 0;
    for (int y : data.y) positives += y;
    std::sort(probs.begin(), probs.end(), std::greater<double>());
    double q = static_cast<double>(positives) / static_cast<double>(n);
    std::size_t m = static_cast<std::size_t>(std::llround(q * static_cast<double>(n)));
    if (m == 0) return probs.front();
    if (m >= n) return probs.back() / 2.0;
    return (probs[m - 1] + probs[m]) / 2.0;
}

}  // namespace

LogisticModel train(const Dataset& data, const TrainConfig& config,
                    std::vector<std::string>* warnings) {
    Dataset working =
        config.downsample ? downsample_negatives(data, rng::derive(config.seed, 0xD0))
                          : data;
    std::size_t n = working.y.size();
    if (n == 0) throw std::invalid_argument("train: no labeled examples");
    std::size_t positives = 0;
    for (int y : working.y) positives += y;
    if (positives == 0 || positives == n)
        throw std::invalid_argument("train: need at least one example of each class");

    std::size_t width = working.feature_names.size() + 1;
    std::vector<double> w(width, 0.0);
    const double cap = config.weight_cap;
    auto clamp_weights = [&](std::vector<double>& v) {
        bool hit = false;
        for (double& wi : v) {
            if (wi > cap) {
                wi = cap;
                hit = true;
            } else if (wi < -cap) {
                wi = -cap;
                hit = true;
            }
        }
        return hit;
    };

    double ll = log_likelihood(w, working);
    double step = 1.0;
    enum class Stop { gradient, stalled, pinned, iterations } stop = Stop::iterations;
    int stall_count = 0;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        std::vector<double> grad = ll_gradient(w, working);
        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax <= config.gradient_tolerance) {
            stop = Stop::gradient;
            break;
        }
        // backtracking line search on the projected step
        double t = step;
        bool accepted = false;
        bool pinned = false;
        while (t > 1e-18) {
            std::vector<double> trial(w);
            for (std::size_t j = 0; j < width; ++j) trial[j] += t * grad[j];
            clamp_weights(trial);
            double moved = 0.0;
            double dir = 0.0;
            for (std::size_t j = 0; j < width; ++j) {
                double d = trial[j] - w[j];
                moved += std::abs(d);
                dir += grad[j] * d;
            }
            if (moved == 0.0) {
                pinned = true;  // every coordinate sits at the cap
                break;
            }
            double trial_ll = log_likelihood(trial, working);
            if (trial_ll >= ll + 1e-4 * dir) {
                if (trial_ll - ll < 1e-14 * (1.0 + std::abs(ll)))
                    ++stall_count;
                else
                    stall_count = 0;
                w = std::move(trial);
                ll = trial_ll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (pinned || !accepted || stall_count >= 3) {
            stop = pinned ? Stop::pinned : Stop::stalled;
            break;
        }
        step = std::min(t * 2.0, 1e3);
    }

    LogisticModel model;
    model.weights = std::move(w);
    model.feature_names = working.feature_names;
    model.seed = config.seed;
    model.capped = false;
    for (double wi : model.weights) {
        if (std::abs(wi) >= cap) model.capped = true;
    }
    if (warnings) {
        if (model.capped) {
            warnings->push_back("train: weights reached the cap of " +
                                std::to_string(cap) + " (perfectly separable data?)");
        } else if (stop == Stop::iterations) {
            warnings->push_back("train: iteration limit reached before gradient "
                                "tolerance");
        }
        // Stop::stalled without a capped weight is ordinary numerical
        // convergence; no warning.
    }
    model.threshold = pick_threshold(model, working);
    return model;
}

std::set<int> predict_paper(std::span<const ScoredRef> refs, int k) {
    if (k < 1) throw std::invalid_argument("predict_paper: k must be >= 1");
    std::vector<ScoredRef> sorted(refs.begin(), refs.end());
    std::sort(sorted.begin(), sorted.end(), [](const ScoredRef& a, const ScoredRef& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.ref_index < b.ref_index;
    });
    std::set<int> out;
    for (std::size_t i = 0; i < sorted.size() && i < static_cast<std::size_t>(k); ++i)
        out.insert(sorted[i].ref_index);
    return out;
}

std::set<int> predict_paper(const LogisticModel& model,
                            std::span<const features::PairRow> paper_rows, int k) {
    std::vector<int> columns;
    for (const std::string& name : model.feature_names) {
        int idx = features::feature_index(name);
        if (idx < 0) throw std::invalid_argument("unknown feature: " + name);
        columns.push_back(idx);
    }
    std::vector<ScoredRef> scored;
    scored.reserve(paper_rows.size());
    for (const features::PairRow& row : paper_rows) {
        std::vector<double> x(columns.size());
        for (std::size_t j = 0; j < columns.size(); ++j)
            x[j] = row.features.values[columns[j]];
        scored.push_back({row.key.ref_index, model.probability(x)});
    }
    return predict_paper(scored, k);
}

PRF f_measure(const std::set<int>& predicted, const std::set<int>& gold) {
    std::size_t hits = 0;
    for (int p : predicted) hits += gold.count(p);
    PRF out;
    out.precision =
        predicted.empty() ? 0.0 : static_cast<double>(hits) / predicted.size();
    out.recall = gold.empty() ? 0.0 : static_cast<double>(hits) / gold.size();
    out.f = (out.precision + out.recall) == 0.0
                ? 0.0
                : 2.0 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

namespace {

struct PaperGroup {
    std::string paper_id;
    std::vector<std::size_t> rows;  // indexes into the PairRow span
    std::set<int> gold_positive;
};

std::vector<PaperGroup> group_by_paper(std::span<const features::PairRow> rows) {
    std::vector<PaperGroup> groups;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const features::PairRow& row = rows[i];
        if (!row.gold)
            throw std::invalid_argument(
                "evaluation requires a gold label on every pair (paper '" +
                row.key.paper_id + "', ref " + std::to_string(row.key.ref_index) + ")");
        auto [it, fresh] = index.try_emplace(row.key.paper_id, groups.size());
        if (fresh) groups.push_back(PaperGroup{row.key.paper_id, {}, {}});
        PaperGroup& g = groups[it->second];
        g.rows.push_back(i);
        if (*row.gold) g.gold_positive.insert(row.key.ref_index);
    }
    return groups;
}

std::vector<int> assign_folds(std::size_t n_papers, int folds, std::uint64_t seed) {
    std::vector<std::size_t> order(n_papers);
    for (std::size_t i = 0; i < n_papers; ++i) order[i] = i;
    std::mt19937_64 gen(rng::derive(seed, 0xF0));
    rng::shuffle(order, gen);
    std::vector<int> fold_of(n_papers);
    for (std::size_t pos = 0; pos < n_papers; ++pos)
        fold_of[order[pos]] = static_cast<int>(pos % folds);
    return fold_of;
}

void finalize_macro(EvalReport& report) {
    double p = 0, r = 0, f = 0;
    for (const PaperEval& e : report.papers) {
        p += e.prf.precision;
        r += e.prf.recall;
        f += e.prf.f;
    }
    double n = static_cast<double>(report.papers.size());
    report.macro_precision = n > 0 ? p / n : 0.0;
    report.macro_recall = n > 0 ? r / n : 0.0;
    report.macro_f = n > 0 ? f / n : 0.0;
}

int auto_top_k(std::size_t train_positives, std::size_t train_papers) {
    if (train_papers == 0) return 1;
    long k = std::lround(static_cast<double>(train_positives) /
                         static_cast<double>(train_papers));
    return std::max(1, static_cast<int>(k));
}

}  // namespace

EvalReport cross_validate(std::span<const features::PairRow> rows,
                          const TrainConfig& config) {
    if (config.folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (config.top_k < 0)
        throw std::invalid_argument("cross_validate: top_k must be >= 1 (or 0 for auto)");
    if (config.features.empty())
        throw std::invalid_argument("cross_validate: no features selected");
    std::vector<PaperGroup> groups = group_by_paper(rows);
    if (groups.size() < static_cast<std::size_t>(config.folds))
        throw std::invalid_argument("cross_validate: fewer papers (" +
                                    std::to_string(groups.size()) + ") than folds (" +
                                    std::to_string(config.folds) + ")");
    std::vector<int> fold_of = assign_folds(groups.size(), config.folds, config.seed);

    EvalReport report;
    report.papers.resize(groups.size());
    report.seed = config.seed;
    report.folds = config.folds;
    report.top_k = config.top_k;
    report.feature_names = config.features;

    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < config.folds; ++f) {
        try {
            std::vector<features::PairRow> train_rows;
            std::size_t train_positives = 0;
            std::size_t train_papers = 0;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (fold_of[g] == f) continue;
                ++train_papers;
                for (std::size_t i : groups[g].rows) train_rows.push_back(rows[i]);
                train_positives += groups[g].gold_positive.size();
            }
            Dataset train_data = Dataset::from_rows(train_rows, config.features);
            TrainConfig fold_config = config;
            fold_config.seed = rng::derive(config.seed, 0x100 + f);
            LogisticModel fold_model = train(train_data, fold_config, nullptr);
            int k = config.top_k > 0 ? config.top_k
                                     : auto_top_k(train_positives, train_papers);
            for (std::size_t g = 0; g < groups.size(); ++g) {
                if (fold_of[g] != f) continue;
                std::vector<features::PairRow> paper_rows;
                for (std::size_t i : groups[g].rows) paper_rows.push_back(rows[i]);
                std::set<int> predicted = predict_paper(fold_model, paper_rows, k);
                report.papers[g] =
                    PaperEval{groups[g].paper_id, f,
                              f_measure(predicted, groups[g].gold_positive)};
            }
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    finalize_macro(report);
    return report;
}

EvalReport random_baseline(std::span<const features::PairRow> rows,
                           const TrainConfig& config) {
    if (config.folds < 2)
        throw std::invalid_argument("random_baseline: folds must be >= 2");
    std::vector<PaperGroup> groups = group_by_paper(rows);
    if (groups.size() < static_cast<std::size_t>(config.folds))
        throw std::invalid_argument("random_baseline: fewer papers than folds");
    std::vector<int> fold_of = assign_folds(groups.size(), config.folds, config.seed);

    EvalReport report;
    report.papers.resize(groups.size());
    report.seed = config.seed;
    report.folds = config.folds;
    report.top_k = 0;
    report.feature_names = {"random"};

    for (int f = 0; f < config.folds; ++f) {
        std::size_t train_rows = 0, train_positives = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (fold_of[g] == f) continue;
            train_rows += groups[g].rows.size();
            for (std::size_t i : groups[g].rows)
                train_positives += *rows[i].gold ? 1 : 0;
        }
        double q = train_rows > 0
                       ? static_cast<double>(train_positives) / train_rows
                       : 0.0;
        std::mt19937_64 gen(rng::derive(config.seed, 0x200 + f));
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (fold_of[g] != f) continue;
            std::set<int> predicted;
            for (std::size_t i : groups[g].rows) {
                if (rng::uniform01(gen) < q) predicted.insert(rows[i].key.ref_index);
            }
            report.papers[g] = PaperEval{groups[g].paper_id, f,
                                         f_measure(predicted, groups[g].gold_positive)};
        }
    }
    finalize_macro(report);
    return report;
}

std::vector<SelectionStep> greedy_feature_selection(
    std::span<const features::PairRow> rows, std::span<const std::string> candidates,
    const TrainConfig& config) {
    if (candidates.empty())
        throw std::invalid_argument("greedy_feature_selection: no candidates");
    for (const std::string& c : candidates) {
        if (features::feature_index(c) < 0)
            throw std::invalid_argument("unknown feature: " + c);
    }
    std::vector<std::string> remaining(candidates.begin(), candidates.end());
    std::vector<std::string> selected;
    std::vector<SelectionStep> path;
    double best_f = -1.0;
    while (!remaining.empty()) {
        std::string best_candidate;
        double round_best = best_f;
        for (const std::string& candidate : remaining) {
            TrainConfig trial = config;
            trial.features = selected;
            trial.features.push_back(candidate);
            double f = cross_validate(rows, trial).macro_f;
            if (f > round_best) {
                round_best = f;
                best_candidate = candidate;
            }
        }
        if (best_candidate.empty()) break;
        selected.push_back(best_candidate);
        path.push_back(SelectionStep{best_candidate, round_best});
        best_f = round_best;
        remaining.erase(std::find(remaining.begin(), remaining.end(), best_candidate));
    }
    return path;
}

std::vector<SweepPoint> threshold_sweep(std::span<const features::PairRow> rows,
                                        const std::string& feature_name) {
    int column = features::feature_index(feature_name);
    if (column < 0) throw std::invalid_argument("unknown feature: " + feature_name);
    std::vector<PaperGroup> groups = group_by_paper(rows);
    std::vector<SweepPoint> curve;
    for (int step = 0; step <= 101; ++step) {
        double threshold = static_cast<double>(step) / 100.0;
        std::size_t total_predicted = 0;
        double f_sum = 0.0;
        for (const PaperGroup& g : groups) {
            std::set<int> predicted;
            for (std::size_t i : g.rows) {
                if (rows[i].features.values[column] >= threshold)
                    predicted.insert(rows[i].key.ref_index);
            }
            total_predicted += predicted.size();
            f_sum += f_measure(predicted, g.gold_positive).f;
        }
        SweepPoint point;
        point.threshold = threshold;
        point.fraction_positive =
            rows.empty() ? 0.0 : static_cast<double>(total_predicted) / rows.size();
        point.macro_f = groups.empty() ? 0.0 : f_sum / groups.size();
        curve.push_back(point);
    }
    return curve;
}

void EvalReport::write(std::ostream& out) const {
    out << "paper_id\tfold\tprecision\trecall\tf\n";
    for (const PaperEval& e : papers) {
        out << e.paper_id << '\t' << e.fold << '\t';
        format_double(out, e.prf.precision);
        out << '\t';
        format_double(out, e.prf.recall);
        out << '\t';
        format_double(out, e.prf.f);
        out << '\n';
    }
    out << "\n";
    out << "macro_precision\t";
    format_double(out, macro_precision);
    out << "\nmacro_recall\t";
    format_double(out, macro_recall);
    out << "\nmacro_f\t";
    format_double(out, macro_f);
    out << "\nfolds\t" << folds;
    out << "\nseed\t" << seed;
    out << "\ntop_k\t";
    if (top_k > 0)
        out << top_k;
    else
        out << "auto";
    out << "\nfeatures\t";
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (i) out << ',';
        out << feature_names[i];
    }
    out << "\n";
}

}  // namespace influcite::model
