// Microbenchmarks for the hot paths that run per item or per pair: markdown
// chunking, token counting, pairwise cosine, rank correlations, and the
// per-item permutation draw.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "groundbench/analysis.hpp"
#include "groundbench/corpus.hpp"
#include "groundbench/harness.hpp"
#include "groundbench/quality.hpp"

namespace {

std::string synthetic_doc(int sections) {
    std::ostringstream out;
    out << "# Synthetic document\n\nIntro paragraph with enough text to survive merging.\n\n";
    for (int i = 0; i < sections; ++i) {
        out << "## Section " << i << "\n\n";
        for (int p = 0; p < 4; ++p) {
            out << "Paragraph " << p << " of section " << i
                << " contains a couple of factual statements about topic " << i
                << " so the chunk clears the minimum size.\n\n";
        }
    }
    return out.str();
}

std::vector<std::vector<double>> random_vectors(int n, int dim) {
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(dim));
    for (auto& v : out) {
        for (auto& x : v) x = normal(rng);
    }
    return out;
}

std::vector<double> random_series(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = uniform(rng);
    return out;
}

void BM_ChunkDocument(benchmark::State& state) {
    const auto doc = groundbench::corpus::parse_markdown(
        synthetic_doc(static_cast<int>(state.range(0))), "bench");
    groundbench::corpus::ChunkPolicy policy;
    for (auto _ : state) {
        auto chunks = groundbench::corpus::chunk_document(doc, policy);
        benchmark::DoNotOptimize(chunks);
    }
}
BENCHMARK(BM_ChunkDocument)->Arg(16)->Arg(128);

void BM_TokenCount(benchmark::State& state) {
    const std::string question =
        "In which year did the expedition (after two failed attempts) finally "
        "reach the southern terminus, and who led it?";
    for (auto _ : state) {
        benchmark::DoNotOptimize(groundbench::quality::count_question_tokens(question));
    }
}
BENCHMARK(BM_TokenCount);

void BM_PairwiseCosine(benchmark::State& state) {
    const auto vectors = random_vectors(static_cast<int>(state.range(0)), 64);
    for (auto _ : state) {
        benchmark::DoNotOptimize(groundbench::quality::mean_pairwise_cosine(vectors));
    }
}
BENCHMARK(BM_PairwiseCosine)->Arg(32)->Arg(256);

void BM_Pearson(benchmark::State& state) {
    const auto xs = random_series(static_cast<int>(state.range(0)), 1);
    const auto ys = random_series(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(groundbench::analysis::pearson(xs, ys));
    }
}
BENCHMARK(BM_Pearson)->Arg(64)->Arg(1024);

void BM_Spearman(benchmark::State& state) {
    const auto xs = random_series(static_cast<int>(state.range(0)), 3);
    const auto ys = random_series(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(groundbench::analysis::spearman(xs, ys));
    }
}
BENCHMARK(BM_Spearman)->Arg(64)->Arg(1024);

void BM_DrawPermutation(benchmark::State& state) {
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto perm = groundbench::harness::draw_permutation(
            42, "doc#3.t" + std::to_string(i++) + ".mcq.genA");
        benchmark::DoNotOptimize(perm);
    }
}
BENCHMARK(BM_DrawPermutation);

}  // namespace

BENCHMARK_MAIN();
