#include <doctest.h>

#include <omp.h>

#include <random>

#include "influcite/corpus.hpp"
#include "influcite/features.hpp"
#include "influcite/model.hpp"
#include "influcite/network.hpp"
#include "influcite/rng.hpp"

// The OpenMP kernels must reproduce the serial reference bit for bit, for
// any thread count: results go into preassigned slots and reductions run
// over fixed-size chunks.

using namespace influcite;

namespace {

std::vector<corpus::AnnotatedPaper> synthetic_corpus(int n_papers, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<corpus::AnnotatedPaper> papers;
    for (int i = 0; i < n_papers; ++i) {
        corpus::AnnotatedPaper p;
        p.paper_id = "p" + std::to_string(i);
        p.year = 2000 + static_cast<int>(gen() % 20);
        int refs = 3 + static_cast<int>(gen() % 6);
        std::vector<std::vector<std::string>> sentences;
        sentences.push_back(corpus::tokenize_body_text("A study of frobnication"));
        p.sections.emplace_back(corpus::SectionLabel::title, sentences);
        std::vector<std::vector<std::string>> body;
        for (int s = 0; s < 20; ++s) {
            int target = 1 + static_cast<int>(gen() % refs);
            std::string text = gen() % 3 ? "we extend the inspired approach of [" +
                                               std::to_string(target) + "] further"
                                         : "plain filler sentence without citations";
            body.push_back(corpus::tokenize_body_text(text));
        }
        p.sections.emplace_back(corpus::SectionLabel::main, body);
        for (int r = 1; r <= refs; ++r) {
            corpus::Reference ref;
            ref.ref_index = r;
            ref.title = "prior work " + std::to_string(r);
            ref.year = 1990 + static_cast<int>(gen() % 25);
            ref.global_cite_count = static_cast<long long>(gen() % 500);
            ref.self_cite = gen() % 7 == 0;
            ref.gold_label = (r == 1);
            p.references.push_back(std::move(ref));
        }
        p.rebuild_body();
        p.mentions = corpus::detect_mentions_in_body(p.body, p.references,
                                                     corpus::CitationStyle::numeric);
        papers.push_back(std::move(p));
    }
    return papers;
}

}  // namespace

TEST_CASE("feature extraction matches the serial reference for any thread count") {
    auto papers = synthetic_corpus(24, 12);
    auto lexicons = features::LexiconSet::builtin();
    std::vector<std::string> serial_warnings;
    auto serial = features::extract_corpus_serial(papers, lexicons, &serial_warnings);
    for (int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        std::vector<std::string> warnings;
        auto parallel = features::extract_corpus(papers, lexicons, &warnings);
        REQUIRE(parallel.size() == serial.size());
        for (std::size_t i = 0; i < serial.size(); ++i) {
            CHECK(parallel[i].key.paper_id == serial[i].key.paper_id);
            CHECK(parallel[i].key.ref_index == serial[i].key.ref_index);
            for (int k = 0; k < features::kFeatureCount; ++k) {
                CHECK(parallel[i].features.values[k] == serial[i].features.values[k]);
            }
        }
        CHECK(warnings == serial_warnings);
    }
}

TEST_CASE("log-likelihood gradient matches the serial reference bitwise") {
    std::mt19937_64 gen(5);
    model::Dataset data;
    data.feature_names = {"a", "b", "c"};
    for (int i = 0; i < 1500; ++i) {
        data.x.push_back({rng::uniform01(gen), rng::uniform01(gen), rng::uniform01(gen)});
        data.y.push_back(gen() % 2 ? 1 : 0);
        data.keys.push_back({"p", i});
    }
    std::vector<double> w{0.3, -1.2, 0.7, 2.5};
    auto serial = model::ll_gradient_serial(w, data);
    for (int threads : {1, 2, 5, 8}) {
        omp_set_num_threads(threads);
        auto parallel = model::ll_gradient(w, data);
        REQUIRE(parallel.size() == serial.size());
        for (std::size_t j = 0; j < serial.size(); ++j)
            CHECK(parallel[j] == serial[j]);  // exact equality
    }
}

TEST_CASE("network metrics match the serial reference for any thread count") {
    std::mt19937_64 gen(6);
    network::CitationNetwork net;
    for (int i = 0; i < 300; ++i) net.add_paper("p" + std::to_string(i));
    for (int e = 0; e < 2500; ++e) {
        int a = static_cast<int>(rng::bounded(gen, 300));
        int b = static_cast<int>(rng::bounded(gen, 300));
        if (a == b) continue;
        net.add_edge("p" + std::to_string(a), "p" + std::to_string(b),
                     1 + static_cast<long long>(rng::bounded(gen, 5)));
    }
    for (int a = 0; a < 60; ++a) {
        for (int k = 0; k < 5; ++k)
            net.add_author("a" + std::to_string(a),
                           "p" + std::to_string(rng::bounded(gen, 300)));
    }
    auto cip_serial = net.all_cip_serial();
    auto h_serial = net.all_h_indexes_serial(network::Counting::primed);
    for (int threads : {1, 2, 4, 8}) {
        omp_set_num_threads(threads);
        CHECK(net.all_cip() == cip_serial);
        CHECK(net.all_h_indexes(network::Counting::primed) == h_serial);
    }
}

TEST_CASE("cross-validation result is independent of the thread count") {
    auto papers = synthetic_corpus(30, 21);
    auto rows = features::extract_corpus_serial(papers, features::LexiconSet::builtin(),
                                                nullptr);
    model::TrainConfig config;
    config.features = {"countsInPaper_whole", "sim_titleCore"};
    config.folds = 5;
    config.seed = 9;
    omp_set_num_threads(1);
    auto one = model::cross_validate(rows, config);
    omp_set_num_threads(8);
    auto eight = model::cross_validate(rows, config);
    CHECK(one.macro_f == eight.macro_f);
    CHECK(one.macro_precision == eight.macro_precision);
    CHECK(one.macro_recall == eight.macro_recall);
    REQUIRE(one.papers.size() == eight.papers.size());
    for (std::size_t i = 0; i < one.papers.size(); ++i) {
        CHECK(one.papers[i].prf.f == eight.papers[i].prf.f);
        CHECK(one.papers[i].fold == eight.papers[i].fold);
    }
    omp_set_num_threads(omp_get_num_procs());
}
