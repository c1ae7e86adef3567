// Compares the OpenMP kernels against their serial reference
// implementations on synthetic data and checks that results agree.

#include <omp.h>

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "influcite/corpus.hpp"
#include "influcite/features.hpp"
#include "influcite/model.hpp"
#include "influcite/network.hpp"
#include "influcite/rng.hpp"

using namespace influcite;

namespace {

std::vector<corpus::AnnotatedPaper> synth_corpus(int n_papers, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<corpus::AnnotatedPaper> papers;
    papers.reserve(n_papers);
    for (int i = 0; i < n_papers; ++i) {
        corpus::AnnotatedPaper p;
        p.paper_id = "p" + std::to_string(i);
        p.year = 2000 + static_cast<int>(gen() % 20);
        int refs = 20 + static_cast<int>(gen() % 20);
        std::vector<std::vector<std::string>> title{
            corpus::tokenize_body_text("a study of synthetic frobnication methods")};
        p.sections.emplace_back(corpus::SectionLabel::title, title);
        std::vector<std::vector<std::string>> body;
        for (int s = 0; s < 120; ++s) {
            int target = 1 + static_cast<int>(gen() % refs);
            body.push_back(corpus::tokenize_body_text(
                "sentence " + std::to_string(s) + " extends the inspired approach of [" +
                std::to_string(target) + "] with additional analysis and detail"));
        }
        p.sections.emplace_back(corpus::SectionLabel::main, body);
        for (int r = 1; r <= refs; ++r) {
            corpus::Reference ref;
            ref.ref_index = r;
            ref.title = "synthetic prior work number " + std::to_string(r);
            ref.year = 1980 + static_cast<int>(gen() % 35);
            ref.global_cite_count = static_cast<long long>(gen() % 1000);
            ref.gold_label = (r <= 3);
            p.references.push_back(std::move(ref));
        }
        p.rebuild_body();
        p.mentions = corpus::detect_mentions_in_body(p.body, p.references,
                                                     corpus::CitationStyle::numeric);
        papers.push_back(std::move(p));
    }
    return papers;
}

network::CitationNetwork synth_network(int n_papers, int n_edges, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    network::CitationNetwork net;
    for (int i = 0; i < n_papers; ++i) net.add_paper("p" + std::to_string(i));
    for (int e = 0; e < n_edges; ++e) {
        int a = static_cast<int>(rng::bounded(gen, n_papers));
        int b = static_cast<int>(rng::bounded(gen, n_papers));
        if (a == b) continue;
        net.add_edge("p" + std::to_string(a), "p" + std::to_string(b),
                     1 + static_cast<long long>(rng::bounded(gen, 6)));
    }
    for (int a = 0; a < n_papers / 3; ++a) {
        int k = 1 + static_cast<int>(rng::bounded(gen, 8));
        for (int i = 0; i < k; ++i)
            net.add_author("a" + std::to_string(a),
                           "p" + std::to_string(rng::bounded(gen, n_papers)));
    }
    return net;
}

void report(const char* kernel, double serial_s, double parallel_s, bool identical) {
    std::printf("%-24s %10.3fs %10.3fs %8.2fx   %s\n", kernel, serial_s, parallel_s,
                serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int scale = argc > 1 ? std::atoi(argv[1]) : 1;
    std::printf("threads: %d, scale: %d\n\n", omp_get_max_threads(), scale);
    std::printf("%-24s %11s %11s %9s\n", "kernel", "serial", "openmp", "speedup");

    {
        auto papers = synth_corpus(120 * scale, 1);
        auto lexicons = features::LexiconSet::builtin();
        double t0 = omp_get_wtime();
        auto serial = features::extract_corpus_serial(papers, lexicons, nullptr);
        double t1 = omp_get_wtime();
        auto parallel = features::extract_corpus(papers, lexicons, nullptr);
        double t2 = omp_get_wtime();
        bool same = serial.size() == parallel.size();
        for (std::size_t i = 0; same && i < serial.size(); ++i)
            same = serial[i].features.values == parallel[i].features.values;
        report("feature extraction", t1 - t0, t2 - t1, same);
    }

    {
        std::mt19937_64 gen(2);
        model::Dataset data;
        data.feature_names = {"a", "b", "c", "d"};
        int n = 400000 * scale;
        for (int i = 0; i < n; ++i) {
            data.x.push_back({rng::uniform01(gen), rng::uniform01(gen),
                              rng::uniform01(gen), rng::uniform01(gen)});
            data.y.push_back(gen() % 2 ? 1 : 0);
            data.keys.push_back({"p", i});
        }
        std::vector<double> w{0.1, -0.7, 0.4, 1.3, -2.1};
        double t0 = omp_get_wtime();
        std::vector<double> serial;
        for (int r = 0; r < 10; ++r) serial = model::ll_gradient_serial(w, data);
        double t1 = omp_get_wtime();
        std::vector<double> parallel;
        for (int r = 0; r < 10; ++r) parallel = model::ll_gradient(w, data);
        double t2 = omp_get_wtime();
        report("logistic gradient x10", t1 - t0, t2 - t1, serial == parallel);
    }

    {
        auto net = synth_network(60000 * scale, 600000 * scale, 3);
        double t0 = omp_get_wtime();
        auto serial = net.all_cip_serial();
        double t1 = omp_get_wtime();
        auto parallel = net.all_cip();
        double t2 = omp_get_wtime();
        report("cip over all papers", t1 - t0, t2 - t1, serial == parallel);

        t0 = omp_get_wtime();
        auto h_serial = net.all_h_indexes_serial(network::Counting::primed);
        t1 = omp_get_wtime();
        auto h_parallel = net.all_h_indexes(network::Counting::primed);
        t2 = omp_get_wtime();
        report("hip over all authors", t1 - t0, t2 - t1, h_serial == h_parallel);
    }

    return 0;
}
