#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "influcite/features.hpp"

namespace influcite::model {

struct LogisticModel {
    // weights[0] is the intercept; weights[1..] follow feature_names.
    std::vector<double> weights;
    std::vector<std::string> feature_names;
    double threshold = 0.5;  // omega
    std::uint64_t seed = 0;
    bool capped = false;  // hit the weight cap (perfect separation)

    double probability(std::span<const double> x) const;

    void save(std::ostream& out) const;
    static LogisticModel load(std::istream& in);
};

struct TrainConfig {
    std::vector<std::string> features;
    int folds = 10;
    std::uint64_t seed = 0;
    bool downsample = true;
    int top_k = 0;  // 0 = "auto": round(mean positives per training paper)
    int max_iterations = 10000;
    double gradient_tolerance = 1e-8;
    double weight_cap = 50.0;
};

// Labeled design matrix carved out of feature rows for a feature subset.
struct Dataset {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> x;  // row major, one row per pair
    std::vector<int> y;
    std::vector<features::PairKey> keys;

    // Keeps only rows with gold labels. Throws on an unknown feature name.
    static Dataset from_rows(std::span<const features::PairRow> rows,
                             std::span<const std::string> feature_subset);
};

// Log-likelihood of the logistic model and its gradient with respect to
// the weights. The gradient accumulates fixed-size chunks so the parallel
// version reproduces the serial one bit for bit.
double log_likelihood(std::span<const double> weights, const Dataset& data);
std::vector<double> ll_gradient(std::span<const double> weights, const Dataset& data);
std::vector<double> ll_gradient_serial(std::span<const double> weights,
                                       const Dataset& data);

// Maximum-likelihood training by gradient ascent with backtracking line
// search; deterministic given config.seed. Down-sampling (when enabled)
// discards random negatives until the classes balance. Throws
// std::invalid_argument on single-class input.
LogisticModel train(const Dataset& data, const TrainConfig& config,
                    std::vector<std::string>* warnings = nullptr);

// Top-k selection for the references of one paper: highest predicted
// probability wins, ties break toward the lower ref_index.
struct ScoredRef {
    int ref_index = 0;
    double probability = 0.0;
};
std::set<int> predict_paper(std::span<const ScoredRef> refs, int k);
std::set<int> predict_paper(const LogisticModel& model,
                            std::span<const features::PairRow> paper_rows, int k);

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

// Division by zero counts as zero throughout.
PRF f_measure(const std::set<int>& predicted, const std::set<int>& gold);

struct PaperEval {
    std::string paper_id;
    int fold = 0;
    PRF prf;
};

struct EvalReport {
    std::vector<PaperEval> papers;  // every paper, exactly once
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f = 0.0;
    std::uint64_t seed = 0;
    int folds = 0;
    int top_k = 0;  // 0 = auto (per-fold)
    std::vector<std::string> feature_names;

    void write(std::ostream& out) const;
};

// Paper-level ten-fold (configurable) cross-validation with per-fold
// down-sampling and macro-averaged scores. Folds train in parallel;
// results are independent of thread count. Throws when there are fewer
// papers than folds.
EvalReport cross_validate(std::span<const features::PairRow> rows,
                          const TrainConfig& config);

// Baseline that guesses influential with probability equal to the training
// prior, evaluated with the same fold structure.
EvalReport random_baseline(std::span<const features::PairRow> rows,
                           const TrainConfig& config);

struct SelectionStep {
    std::string feature;
    double macro_f = 0.0;
};

// Forward selection by cross-validated macro-F; stops when no candidate
// improves the score.
std::vector<SelectionStep> greedy_feature_selection(
    std::span<const features::PairRow> rows,
    std::span<const std::string> candidates, const TrainConfig& config);

struct SweepPoint {
    double threshold = 0.0;
    double fraction_positive = 0.0;
    double macro_f = 0.0;
};

// Single-feature thresholding curve: predict influential when the
// normalized feature value is >= threshold, for thresholds over [0, 1]
// plus one point beyond 1 (nothing predicted).
std::vector<SweepPoint> threshold_sweep(std::span<const features::PairRow> rows,
                                        const std::string& feature_name);

}  // namespace influcite::model
