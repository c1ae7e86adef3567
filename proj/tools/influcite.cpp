#include <omp.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "influcite/corpus.hpp"
#include "influcite/features.hpp"
#include "influcite/model.hpp"
#include "influcite/network.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;
using namespace influcite;

// Exit codes: 0 ok, 1 validation (bad input or flags), 2 runtime.
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationFailure("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

// Buffers a command's primary output so it can be digested and written in
// one shot (file or stdout).
class OutputSink {
public:
    explicit OutputSink(std::string path) : path_(std::move(path)) {}

    std::ostream& stream() { return buffer_; }

    // Returns {path, digest}; path is "-" for stdout.
    std::pair<std::string, std::string> flush() {
        std::string bytes = buffer_.str();
        if (path_.empty()) {
            std::cout << bytes;
            return {"-", fnv1a_hex(bytes)};
        }
        std::ofstream out(path_, std::ios::binary);
        if (!out) throw ValidationFailure("cannot write output file: " + path_);
        out << bytes;
        return {path_, fnv1a_hex(bytes)};
    }

private:
    std::string path_;
    std::ostringstream buffer_;
};

// Every run records what it read, what it wrote, and the knobs in between.
class Manifest {
public:
    Manifest(std::string command, std::string explicit_path)
        : explicit_path_(std::move(explicit_path)) {
        doc_["tool"] = "influcite";
        doc_["version"] = kVersion;
        doc_["command"] = std::move(command);
        doc_["inputs"] = json::object();
        doc_["outputs"] = json::object();
        doc_["config"] = json::object();
    }

    void add_input(const std::string& path, const std::string& bytes) {
        doc_["inputs"][path] = fnv1a_hex(bytes);
    }
    void add_output(const std::pair<std::string, std::string>& path_digest) {
        doc_["outputs"][path_digest.first] = path_digest.second;
    }
    json& config() { return doc_["config"]; }

    void write(const std::string& default_near) {
        std::string path = explicit_path_;
        if (path.empty()) {
            path = default_near.empty() || default_near == "-"
                       ? "influcite.manifest.json"
                       : default_near + ".manifest.json";
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ValidationFailure("cannot write manifest: " + path);
        out << doc_.dump(2) << "\n";
    }

private:
    std::string explicit_path_;
    json doc_;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void apply_jobs(int jobs) {
    if (jobs > 0) omp_set_num_threads(jobs);
}

void format_value(std::ostream& out, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    out << buf;
}

features::LexiconSet load_lexicons(const std::string& dir,
                                   std::vector<std::string>* warnings) {
    features::LexiconSet set = features::LexiconSet::builtin();
    if (!dir.empty()) set.load_dir(dir, warnings);
    return set;
}

std::vector<features::PairRow> load_feature_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationFailure("cannot open feature table: " + path);
    try {
        return features::read_feature_tsv(in);
    } catch (const std::exception& e) {
        throw ValidationFailure(std::string(e.what()));
    }
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    std::string corpus_path;
    std::string output;
    std::string manifest;
    std::string emit_annotated;
    std::string emit_edges;
    std::string exclude_style;
    std::string format = "tsv";
};

void run_ingest(const IngestArgs& args) {
    Manifest manifest("ingest", args.manifest);
    manifest.add_input(args.corpus_path, read_file_bytes(args.corpus_path));
    manifest.config()["format"] = args.format;

    std::vector<std::string> warnings;
    std::vector<corpus::AnnotatedPaper> papers;
    try {
        papers = corpus::load_corpus(args.corpus_path, &warnings);
    } catch (const corpus::CorpusError& e) {
        throw ValidationFailure(e.what());
    }
    std::size_t pairs = 0, mentions = 0, positives = 0;
    for (const auto& p : papers) {
        pairs += p.references.size();
        mentions += p.mentions.size();
        for (const auto& r : p.references) positives += r.gold_label.value_or(false);
    }
    print_warnings(warnings);

    OutputSink sink(args.output);
    if (args.format == "pretty") {
        sink.stream() << papers.size() << " papers, " << pairs
                      << " paper-reference pairs, " << mentions << " mentions, "
                      << positives << " influential labels\n";
    } else {
        sink.stream() << "papers\t" << papers.size() << "\n"
                      << "pairs\t" << pairs << "\n"
                      << "mentions\t" << mentions << "\n"
                      << "positives\t" << positives << "\n"
                      << "warnings\t" << warnings.size() << "\n";
    }
    manifest.add_output(sink.flush());

    if (!args.emit_annotated.empty()) {
        std::ostringstream out;
        for (const auto& p : papers) out << corpus::paper_to_json(p) << "\n";
        std::ofstream file(args.emit_annotated, std::ios::binary);
        if (!file) throw ValidationFailure("cannot write: " + args.emit_annotated);
        file << out.str();
        manifest.add_output({args.emit_annotated, fnv1a_hex(out.str())});
    }

    // Citation edge list from in-paper mention counts, for references whose
    // cited paper is known by corpus id. Papers in the excluded citation
    // style contribute no edges.
    if (!args.emit_edges.empty()) {
        std::optional<corpus::CitationStyle> excluded;
        if (!args.exclude_style.empty()) {
            excluded = corpus::parse_style(args.exclude_style);
            if (!excluded)
                throw ValidationFailure("--exclude-style must be numeric or textual");
        }
        std::ostringstream out;
        for (const auto& p : papers) {
            if (excluded && p.style == *excluded) continue;
            for (const auto& ref : p.references) {
                if (ref.target_id.empty()) continue;
                long long count = 0;
                for (const auto& m : p.mentions)
                    if (m.ref_index == ref.ref_index) ++count;
                if (count > 0)
                    out << p.paper_id << '\t' << ref.target_id << '\t' << count << "\n";
            }
        }
        std::ofstream file(args.emit_edges, std::ios::binary);
        if (!file) throw ValidationFailure("cannot write: " + args.emit_edges);
        file << out.str();
        manifest.add_output({args.emit_edges, fnv1a_hex(out.str())});
    }
    manifest.write(args.output);
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
    std::string corpus_path;
    std::string output;
    std::string manifest;
    std::string lexicon_dir;
    int jobs = 0;
    bool serial = false;
};

void run_features(const FeaturesArgs& args) {
    apply_jobs(args.jobs);
    Manifest manifest("features", args.manifest);
    manifest.add_input(args.corpus_path, read_file_bytes(args.corpus_path));
    manifest.config()["lexicon_dir"] = args.lexicon_dir;
    manifest.config()["jobs"] = args.jobs;
    manifest.config()["serial"] = args.serial;

    std::vector<std::string> warnings;
    std::vector<corpus::AnnotatedPaper> papers;
    try {
        papers = corpus::load_corpus(args.corpus_path, &warnings);
    } catch (const corpus::CorpusError& e) {
        throw ValidationFailure(e.what());
    }
    features::LexiconSet lexicons = load_lexicons(args.lexicon_dir, &warnings);
    std::vector<features::PairRow> rows =
        args.serial ? features::extract_corpus_serial(papers, lexicons, &warnings)
                    : features::extract_corpus(papers, lexicons, &warnings);
    print_warnings(warnings);

    OutputSink sink(args.output);
    features::write_feature_tsv(sink.stream(), rows);
    manifest.add_output(sink.flush());
    manifest.write(args.output);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string features_path;
    std::string output;
    std::string manifest;
    std::string feature_list;
    std::uint64_t seed = 0;
    bool no_downsample = false;
};

void run_train(const TrainArgs& args) {
    Manifest manifest("train", args.manifest);
    manifest.add_input(args.features_path, read_file_bytes(args.features_path));
    manifest.config()["features"] = args.feature_list;
    manifest.config()["seed"] = args.seed;
    manifest.config()["downsample"] = !args.no_downsample;

    auto rows = load_feature_rows(args.features_path);
    model::TrainConfig config;
    config.features = split_csv(args.feature_list);
    config.seed = args.seed;
    config.downsample = !args.no_downsample;
    if (config.features.empty())
        throw ValidationFailure("train: --features must name at least one feature");

    model::Dataset data;
    try {
        data = model::Dataset::from_rows(rows, config.features);
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    std::vector<std::string> warnings;
    model::LogisticModel trained;
    try {
        trained = model::train(data, config, &warnings);
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    print_warnings(warnings);

    OutputSink sink(args.output);
    trained.save(sink.stream());
    manifest.add_output(sink.flush());
    manifest.write(args.output);
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
    std::string model_path;
    std::string features_path;
    std::string output;
    std::string manifest;
    int top_k = 3;  // 0 = threshold on omega instead of top-k
};

void run_predict(const PredictArgs& args) {
    Manifest manifest("predict", args.manifest);
    std::string model_bytes = read_file_bytes(args.model_path);
    manifest.add_input(args.model_path, model_bytes);
    manifest.add_input(args.features_path, read_file_bytes(args.features_path));
    manifest.config()["top_k"] = args.top_k;

    std::istringstream model_in(model_bytes);
    model::LogisticModel m;
    try {
        m = model::LogisticModel::load(model_in);
    } catch (const std::exception& e) {
        throw ValidationFailure(e.what());
    }
    auto rows = load_feature_rows(args.features_path);

    std::vector<int> columns;
    for (const std::string& name : m.feature_names) {
        int idx = features::feature_index(name);
        if (idx < 0) throw ValidationFailure("model uses unknown feature: " + name);
        columns.push_back(idx);
    }

    // group rows by paper, preserving first-seen order
    std::vector<std::string> paper_order;
    std::map<std::string, std::vector<const features::PairRow*>> by_paper;
    for (const auto& row : rows) {
        auto [it, fresh] = by_paper.try_emplace(row.key.paper_id);
        if (fresh) paper_order.push_back(row.key.paper_id);
        it->second.push_back(&row);
    }

    OutputSink sink(args.output);
    sink.stream() << "paper_id\tref_index\tprobability\tpredicted\n";
    for (const std::string& paper : paper_order) {
        const auto& paper_rows = by_paper[paper];
        std::vector<model::ScoredRef> scored;
        for (const auto* row : paper_rows) {
            std::vector<double> x(columns.size());
            for (std::size_t j = 0; j < columns.size(); ++j)
                x[j] = row->features.values[columns[j]];
            scored.push_back({row->key.ref_index, m.probability(x)});
        }
        std::set<int> predicted;
        if (args.top_k > 0) {
            predicted = model::predict_paper(scored, args.top_k);
        } else {
            for (const auto& s : scored)
                if (s.probability > m.threshold) predicted.insert(s.ref_index);
        }
        for (std::size_t i = 0; i < paper_rows.size(); ++i) {
            sink.stream() << paper << '\t' << paper_rows[i]->key.ref_index << '\t';
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", scored[i].probability);
            sink.stream() << buf << '\t'
                          << (predicted.count(scored[i].ref_index) ? 1 : 0) << "\n";
        }
    }
    manifest.add_output(sink.flush());
    manifest.write(args.output);
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string features_path;
    std::string output;
    std::string manifest;
    std::string feature_list;
    std::string baseline;
    int folds = 10;
    std::uint64_t seed = 0;
    int top_k = 0;
    int jobs = 0;
};

void run_evaluate(const EvaluateArgs& args) {
    apply_jobs(args.jobs);
    Manifest manifest("evaluate", args.manifest);
    manifest.add_input(args.features_path, read_file_bytes(args.features_path));
    manifest.config()["features"] = args.feature_list;
    manifest.config()["baseline"] = args.baseline;
    manifest.config()["folds"] = args.folds;
    manifest.config()["seed"] = args.seed;
    manifest.config()["top_k"] = args.top_k;

    auto rows = load_feature_rows(args.features_path);
    model::TrainConfig config;
    config.features = split_csv(args.feature_list);
    config.folds = args.folds;
    config.seed = args.seed;
    config.top_k = args.top_k;

    model::EvalReport report;
    try {
        if (args.baseline == "random") {
            report = model::random_baseline(rows, config);
        } else if (!args.baseline.empty()) {
            throw ValidationFailure("unknown baseline: " + args.baseline);
        } else {
            if (config.features.empty())
                throw ValidationFailure("evaluate: --features or --baseline required");
            report = model::cross_validate(rows, config);
        }
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }

    OutputSink sink(args.output);
    report.write(sink.stream());
    manifest.add_output(sink.flush());
    manifest.write(args.output);
}

// ---------------------------------------------------------------- netstats

struct NetstatsArgs {
    std::string edges_path;
    std::string authors_path;
    std::string papers_list;
    std::string output;
    std::string manifest;
    long long t1 = 1;
    long long t2 = 0;  // 0 = no rank limit
    int exponent = 2;
    std::vector<std::string> papers;
    std::vector<std::string> authors;
    std::string format = "tsv";
};

void run_netstats(const NetstatsArgs& args) {
    Manifest manifest("netstats", args.manifest);
    manifest.add_input(args.edges_path, read_file_bytes(args.edges_path));
    if (!args.authors_path.empty())
        manifest.add_input(args.authors_path, read_file_bytes(args.authors_path));
    if (!args.papers_list.empty())
        manifest.add_input(args.papers_list, read_file_bytes(args.papers_list));
    manifest.config()["t1"] = args.t1;
    manifest.config()["t2"] = args.t2;
    manifest.config()["exponent"] = args.exponent;

    std::vector<std::string> warnings;
    network::CitationNetwork net;
    try {
        net = network::CitationNetwork::load(args.edges_path, args.authors_path,
                                             args.papers_list, &warnings);
        if (args.t1 != 1 || args.t2 != 0) {
            network::FilterSpec spec;
            spec.min_count = args.t1;
            spec.max_rank = args.t2 == 0 ? network::kNoRankLimit : args.t2;
            net = net.filter_edges(spec);
        }
    } catch (const std::exception& e) {
        throw ValidationFailure(e.what());
    }
    print_warnings(warnings);

    OutputSink sink(args.output);
    bool pretty = args.format == "pretty";
    auto emit_paper = [&](const std::string& id) {
        long long conv = net.conventional_count(id);
        long long primed = net.cip(id, args.exponent);
        if (pretty)
            sink.stream() << "paper " << id << ": citations=" << conv
                          << " cip=" << primed << "\n";
        else
            sink.stream() << "paper\t" << id << '\t' << conv << '\t' << primed << "\n";
    };
    auto emit_author = [&](const std::string& id) {
        int h = net.h_index(id, network::Counting::conventional, args.exponent);
        int hip = net.h_index(id, network::Counting::primed, args.exponent);
        if (pretty)
            sink.stream() << "author " << id << ": h=" << h << " hip=" << hip << "\n";
        else
            sink.stream() << "author\t" << id << '\t' << h << '\t' << hip << "\n";
    };
    try {
        if (!pretty) sink.stream() << "kind\tid\tconventional\tprimed\n";
        if (args.papers.empty() && args.authors.empty()) {
            for (const std::string& id : net.paper_ids()) emit_paper(id);
            for (const auto& [author, papers] : net.authors()) emit_author(author);
        } else {
            for (const std::string& id : args.papers) emit_paper(id);
            for (const std::string& id : args.authors) emit_author(id);
        }
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    manifest.add_output(sink.flush());
    manifest.write(args.output);
}

// ---------------------------------------------------------------- report

struct ReportCommonArgs {
    std::string output;
    std::string manifest;
    int jobs = 0;
};

void run_report_correlations(const ReportCommonArgs& common,
                             const std::string& corpus_path,
                             const std::string& lexicon_dir) {
    apply_jobs(common.jobs);
    Manifest manifest("report correlations", common.manifest);
    manifest.add_input(corpus_path, read_file_bytes(corpus_path));
    manifest.config()["lexicon_dir"] = lexicon_dir;

    std::vector<std::string> warnings;
    std::vector<corpus::AnnotatedPaper> papers;
    try {
        papers = corpus::load_corpus(corpus_path, &warnings);
    } catch (const corpus::CorpusError& e) {
        throw ValidationFailure(e.what());
    }
    features::LexiconSet lexicons = load_lexicons(lexicon_dir, &warnings);
    features::CorrelationReport report;
    try {
        report = features::feature_label_correlations(papers, lexicons);
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    print_warnings(warnings);

    OutputSink sink(common.output);
    auto emit = [&](const char* block,
                    const std::vector<features::CorrelationEntry>& entries) {
        sink.stream() << "# " << block << "\n";
        for (const auto& e : entries) {
            sink.stream() << e.name << '\t';
            format_value(sink.stream(), e.r);
            sink.stream() << '\t' << (e.zero_variance ? 1 : 0) << "\n";
        }
    };
    sink.stream() << "feature\tpearson_r\tzero_variance\n";
    emit("features", report.features);
    emit("polarity split", report.polarity_split);
    emit("emotion split", report.emotion_split);
    emit("yearDiff buckets", report.year_diff_buckets);
    manifest.add_output(sink.flush());
    manifest.write(common.output);
}

void run_report_sweep(const ReportCommonArgs& common, const std::string& features_path,
                      const std::string& feature) {
    Manifest manifest("report sweep", common.manifest);
    manifest.add_input(features_path, read_file_bytes(features_path));
    manifest.config()["feature"] = feature;

    auto rows = load_feature_rows(features_path);
    std::vector<model::SweepPoint> curve;
    try {
        curve = model::threshold_sweep(rows, feature);
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    OutputSink sink(common.output);
    sink.stream() << "threshold\tfraction_positive\tmacro_f\n";
    for (const auto& p : curve) {
        format_value(sink.stream(), p.threshold);
        sink.stream() << '\t';
        format_value(sink.stream(), p.fraction_positive);
        sink.stream() << '\t';
        format_value(sink.stream(), p.macro_f);
        sink.stream() << "\n";
    }
    manifest.add_output(sink.flush());
    manifest.write(common.output);
}

void run_report_models(const ReportCommonArgs& common, const std::string& features_path,
                       int folds, std::uint64_t seed, int top_k,
                       const std::string& candidates_csv) {
    apply_jobs(common.jobs);
    Manifest manifest("report models", common.manifest);
    manifest.add_input(features_path, read_file_bytes(features_path));
    manifest.config()["folds"] = folds;
    manifest.config()["seed"] = seed;
    manifest.config()["top_k"] = top_k;
    manifest.config()["candidates"] = candidates_csv;

    auto rows = load_feature_rows(features_path);
    model::TrainConfig config;
    config.folds = folds;
    config.seed = seed;
    config.top_k = top_k;

    std::vector<std::string> candidates = split_csv(candidates_csv);
    if (candidates.empty()) {
        for (std::string_view name : features::feature_names())
            candidates.emplace_back(name);
    }

    OutputSink sink(common.output);
    sink.stream() << "model\tfeatures\tmacro_f\tmacro_precision\tmacro_recall\n";
    auto emit_row = [&](int index, const std::string& label,
                        const model::EvalReport& report) {
        sink.stream() << '(' << index << ")\t" << label << '\t';
        format_value(sink.stream(), report.macro_f);
        sink.stream() << '\t';
        format_value(sink.stream(), report.macro_precision);
        sink.stream() << '\t';
        format_value(sink.stream(), report.macro_recall);
        sink.stream() << "\n";
    };
    try {
        emit_row(1, "random", model::random_baseline(rows, config));
        model::TrainConfig cite_config = config;
        cite_config.features = {"aux_citeCount"};
        emit_row(2, "aux_citeCount", model::cross_validate(rows, cite_config));

        auto path = model::greedy_feature_selection(rows, candidates, config);
        std::string label;
        std::vector<std::string> selected;
        int index = 3;
        for (const auto& step : path) {
            label = label.empty() ? step.feature : label + "+" + step.feature;
            selected.push_back(step.feature);
            model::TrainConfig step_config = config;
            step_config.features = selected;
            emit_row(index++, label, model::cross_validate(rows, step_config));
        }
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    manifest.add_output(sink.flush());
    manifest.write(common.output);
}

void run_report_groups(const ReportCommonArgs& common, const std::string& edges_path,
                       const std::string& authors_path, const std::string& entity,
                       int group_size, int exponent) {
    Manifest manifest("report groups", common.manifest);
    manifest.add_input(edges_path, read_file_bytes(edges_path));
    if (!authors_path.empty())
        manifest.add_input(authors_path, read_file_bytes(authors_path));
    manifest.config()["entity"] = entity;
    manifest.config()["group_size"] = group_size;
    manifest.config()["exponent"] = exponent;

    std::vector<std::string> warnings;
    std::vector<network::GroupCorrelation> groups;
    try {
        auto net =
            network::CitationNetwork::load(edges_path, authors_path, "", &warnings);
        network::Entity kind = entity == "papers" ? network::Entity::papers
                                                  : network::Entity::authors;
        groups = network::grouped_rank_correlation(net, kind, group_size, exponent);
    } catch (const std::exception& e) {
        throw ValidationFailure(e.what());
    }
    print_warnings(warnings);

    OutputSink sink(common.output);
    sink.stream() << "range\tspearman\n";
    for (const auto& g : groups) {
        sink.stream() << g.first << '-' << g.last << '\t';
        if (g.rho)
            format_value(sink.stream(), *g.rho);
        else
            sink.stream() << "NA";
        sink.stream() << "\n";
    }
    manifest.add_output(sink.flush());
    manifest.write(common.output);
}

void run_report_fellows(const ReportCommonArgs& common, const std::string& edges_path,
                        const std::string& authors_path,
                        const std::string& honorees_path, long long t1, long long t2,
                        int exponent) {
    Manifest manifest("report fellows", common.manifest);
    manifest.add_input(edges_path, read_file_bytes(edges_path));
    manifest.add_input(authors_path, read_file_bytes(authors_path));
    manifest.add_input(honorees_path, read_file_bytes(honorees_path));
    manifest.config()["t1"] = t1;
    manifest.config()["t2"] = t2;
    manifest.config()["exponent"] = exponent;

    std::vector<std::string> warnings;
    OutputSink sink(common.output);
    try {
        auto net =
            network::CitationNetwork::load(edges_path, authors_path, "", &warnings);
        if (t1 != 1 || t2 != 0) {
            network::FilterSpec spec;
            spec.min_count = t1;
            spec.max_rank = t2 == 0 ? network::kNoRankLimit : t2;
            net = net.filter_edges(spec);
        }
        auto honorees = network::load_honorees(honorees_path);
        if (honorees.empty()) throw ValidationFailure("honoree file is empty");

        auto h_board =
            network::author_leaderboard(net, network::Counting::conventional, exponent);
        auto hip_board =
            network::author_leaderboard(net, network::Counting::primed, exponent);
        std::vector<std::string> h_ranked, hip_ranked;
        for (const auto& [id, v] : h_board) h_ranked.push_back(id);
        for (const auto& [id, v] : hip_board) hip_ranked.push_back(id);

        int n_r = static_cast<int>(honorees.size());
        int max_n = std::min<int>(n_r, static_cast<int>(h_ranked.size()));
        if (max_n < 1) throw ValidationFailure("no ranked authors");

        sink.stream() << "N\th_precision\th_lo\th_hi\thip_precision\thip_lo\thip_hi\n";
        for (int n = 1; n <= max_n; ++n) {
            auto hi = network::precision_at_n_interval<int>(h_board, honorees, n);
            auto pi = network::precision_at_n_interval<int>(hip_board, honorees, n);
            sink.stream() << n << '\t';
            format_value(sink.stream(), network::precision_at_n(h_ranked, honorees, n));
            sink.stream() << '\t';
            format_value(sink.stream(), hi.pessimistic);
            sink.stream() << '\t';
            format_value(sink.stream(), hi.optimistic);
            sink.stream() << '\t';
            format_value(sink.stream(),
                         network::precision_at_n(hip_ranked, honorees, n));
            sink.stream() << '\t';
            format_value(sink.stream(), pi.pessimistic);
            sink.stream() << '\t';
            format_value(sink.stream(), pi.optimistic);
            sink.stream() << "\n";
        }
        sink.stream() << "AveP\t";
        format_value(sink.stream(),
                     network::average_precision(h_ranked, honorees, max_n, n_r));
        sink.stream() << "\t\t\t";
        format_value(sink.stream(),
                     network::average_precision(hip_ranked, honorees, max_n, n_r));
        sink.stream() << "\t\t\n";
    } catch (const std::invalid_argument& e) {
        throw ValidationFailure(e.what());
    }
    print_warnings(warnings);
    manifest.add_output(sink.flush());
    manifest.write(common.output);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"influcite: classify influential references and compute "
                 "influence-primed citation metrics"};
    app.set_version_flag("--version", std::string("influcite ") + kVersion);
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and print stats");
    ingest->add_option("corpus", ingest_args.corpus_path, "corpus JSONL file")->required();
    ingest->add_option("-o,--output", ingest_args.output, "stats output file");
    ingest->add_option("--manifest", ingest_args.manifest, "manifest path");
    ingest->add_option("--emit-annotated", ingest_args.emit_annotated,
                       "write the corpus back with detected mentions");
    ingest->add_option("--emit-edges", ingest_args.emit_edges,
                       "write a citation edge list from in-paper counts");
    ingest->add_option("--exclude-style", ingest_args.exclude_style,
                       "drop papers of this citation style from the edge list")
        ->check(CLI::IsMember({"numeric", "textual"}));
    ingest->add_option("--format", ingest_args.format, "tsv or pretty")
        ->check(CLI::IsMember({"tsv", "pretty"}));

    FeaturesArgs features_args;
    auto* features_cmd =
        app.add_subcommand("features", "Extract normalized 38-feature vectors");
    features_cmd->add_option("corpus", features_args.corpus_path, "corpus JSONL file")
        ->required();
    features_cmd->add_option("-o,--output", features_args.output, "feature TSV output");
    features_cmd->add_option("--manifest", features_args.manifest, "manifest path");
    features_cmd->add_option("--lexicon-dir", features_args.lexicon_dir,
                             "directory with lexicon files");
    features_cmd->add_option("--jobs", features_args.jobs, "worker threads");
    features_cmd->add_flag("--serial", features_args.serial,
                           "use the serial reference path");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train the logistic influence model");
    train->add_option("table", train_args.features_path, "feature TSV")->required();
    train->add_option("-o,--output", train_args.output, "model file");
    train->add_option("--manifest", train_args.manifest, "manifest path");
    train->add_option("--features", train_args.feature_list,
                      "comma-separated feature names")
        ->required();
    train->add_option("--seed", train_args.seed, "random seed");
    train->add_flag("--no-downsample", train_args.no_downsample,
                    "keep all negative examples");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Apply a trained model");
    predict->add_option("model", predict_args.model_path, "model file")->required();
    predict->add_option("table", predict_args.features_path, "feature TSV")
        ->required();
    predict->add_option("-o,--output", predict_args.output, "prediction TSV");
    predict->add_option("--manifest", predict_args.manifest, "manifest path");
    predict->add_option("--top-k", predict_args.top_k,
                        "positives per paper (0 = threshold on omega)");

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation");
    evaluate->add_option("table", evaluate_args.features_path, "feature TSV")
        ->required();
    evaluate->add_option("-o,--output", evaluate_args.output, "report output");
    evaluate->add_option("--manifest", evaluate_args.manifest, "manifest path");
    evaluate->add_option("--features", evaluate_args.feature_list,
                         "comma-separated feature names");
    evaluate->add_option("--baseline", evaluate_args.baseline, "random");
    evaluate->add_option("--folds", evaluate_args.folds, "cross-validation folds");
    evaluate->add_option("--seed", evaluate_args.seed, "random seed");
    evaluate->add_option("--top-k", evaluate_args.top_k,
                         "positives per paper (0 = auto)");
    evaluate->add_option("--jobs", evaluate_args.jobs, "worker threads");

    NetstatsArgs netstats_args;
    auto* netstats = app.add_subcommand("netstats", "Citation-network metrics");
    netstats->add_option("edges", netstats_args.edges_path, "edge list file")->required();
    netstats->add_option("--authors", netstats_args.authors_path, "author-paper file");
    netstats->add_option("--papers-list", netstats_args.papers_list,
                         "closed-graph paper list");
    netstats->add_option("-o,--output", netstats_args.output, "output file");
    netstats->add_option("--manifest", netstats_args.manifest, "manifest path");
    netstats->add_option("--t1", netstats_args.t1, "minimum in-paper count");
    netstats->add_option("--t2", netstats_args.t2, "rank cutoff (0 = none)");
    netstats->add_option("--exponent", netstats_args.exponent, "cip exponent");
    netstats->add_option("--paper", netstats_args.papers, "paper id (repeatable)");
    netstats->add_option("--author", netstats_args.authors, "author id (repeatable)");
    netstats->add_option("--format", netstats_args.format, "tsv or pretty")
        ->check(CLI::IsMember({"tsv", "pretty"}));

    auto* report = app.add_subcommand("report", "Analysis tables");
    report->require_subcommand(1);

    ReportCommonArgs corr_common;
    std::string corr_corpus, corr_lexicons;
    auto* corr = report->add_subcommand("correlations",
                                        "Pearson correlations of features vs labels");
    corr->add_option("corpus", corr_corpus, "corpus JSONL file")->required();
    corr->add_option("-o,--output", corr_common.output, "output file");
    corr->add_option("--manifest", corr_common.manifest, "manifest path");
    corr->add_option("--lexicon-dir", corr_lexicons, "lexicon directory");
    corr->add_option("--jobs", corr_common.jobs, "worker threads");

    ReportCommonArgs sweep_common;
    std::string sweep_features, sweep_feature;
    auto* sweep = report->add_subcommand("sweep", "Single-feature threshold curve");
    sweep->add_option("table", sweep_features, "feature TSV")->required();
    sweep->add_option("--feature", sweep_feature, "feature to sweep")->required();
    sweep->add_option("-o,--output", sweep_common.output, "output file");
    sweep->add_option("--manifest", sweep_common.manifest, "manifest path");

    ReportCommonArgs models_common;
    std::string models_features, models_candidates;
    int models_folds = 10, models_top_k = 0;
    std::uint64_t models_seed = 0;
    auto* models = report->add_subcommand("models", "Additive model comparison table");
    models->add_option("table", models_features, "feature TSV")->required();
    models->add_option("-o,--output", models_common.output, "output file");
    models->add_option("--manifest", models_common.manifest, "manifest path");
    models->add_option("--folds", models_folds, "cross-validation folds");
    models->add_option("--seed", models_seed, "random seed");
    models->add_option("--top-k", models_top_k, "positives per paper (0 = auto)");
    models->add_option("--candidates", models_candidates,
                       "comma-separated candidate features (default: all)");
    models->add_option("--jobs", models_common.jobs, "worker threads");

    ReportCommonArgs groups_common;
    std::string groups_edges, groups_authors, groups_entity = "papers";
    int groups_size = 100, groups_exponent = 2;
    auto* groups = report->add_subcommand(
        "groups", "Spearman correlation of conventional vs primed ranks");
    groups->add_option("edges", groups_edges, "edge list file")->required();
    groups->add_option("--authors", groups_authors, "author-paper file");
    groups->add_option("--entity", groups_entity, "papers or authors")
        ->check(CLI::IsMember({"papers", "authors"}));
    groups->add_option("--group-size", groups_size, "entities per group");
    groups->add_option("--exponent", groups_exponent, "cip exponent");
    groups->add_option("-o,--output", groups_common.output, "output file");
    groups->add_option("--manifest", groups_common.manifest, "manifest path");

    ReportCommonArgs fellows_common;
    std::string fellows_edges, fellows_authors, fellows_honorees;
    long long fellows_t1 = 1, fellows_t2 = 0;
    int fellows_exponent = 2;
    auto* fellows =
        report->add_subcommand("fellows", "Precision@N and AveP for an honoree set");
    fellows->add_option("edges", fellows_edges, "edge list file")->required();
    fellows->add_option("--authors", fellows_authors, "author-paper file")->required();
    fellows->add_option("--honorees", fellows_honorees, "honoree list file")->required();
    fellows->add_option("--t1", fellows_t1, "minimum in-paper count");
    fellows->add_option("--t2", fellows_t2, "rank cutoff (0 = none)");
    fellows->add_option("--exponent", fellows_exponent, "cip exponent");
    fellows->add_option("-o,--output", fellows_common.output, "output file");
    fellows->add_option("--manifest", fellows_common.manifest, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage problems are validation failures
    }

    try {
        if (*ingest) run_ingest(ingest_args);
        if (*features_cmd) run_features(features_args);
        if (*train) run_train(train_args);
        if (*predict) run_predict(predict_args);
        if (*evaluate) run_evaluate(evaluate_args);
        if (*netstats) run_netstats(netstats_args);
        if (*corr) run_report_correlations(corr_common, corr_corpus, corr_lexicons);
        if (*sweep) run_report_sweep(sweep_common, sweep_features, sweep_feature);
        if (*models)
            run_report_models(models_common, models_features, models_folds, models_seed,
                              models_top_k, models_candidates);
        if (*groups)
            run_report_groups(groups_common, groups_edges, groups_authors, groups_entity,
                              groups_size, groups_exponent);
        if (*fellows)
            run_report_fellows(fellows_common, fellows_edges, fellows_authors,
                               fellows_honorees, fellows_t1, fellows_t2,
                               fellows_exponent);
    } catch (const ValidationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
