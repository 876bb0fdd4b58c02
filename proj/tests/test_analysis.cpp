#include <doctest.h>

#include <cmath>
#include <random>

#include "groundbench/analysis.hpp"
#include "groundbench/errors.hpp"
#include "support/helpers.hpp"

using namespace groundbench;

namespace {

// Seeded series with a controllable amount of ties (rounding injects them).
std::pair<std::vector<double>, std::vector<double>> seeded_series(std::uint64_t seed,
                                                                  std::size_t n,
                                                                  bool inject_ties) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = dist(rng);
        ys[i] = 0.4 * xs[i] + dist(rng);
        if (inject_ties) {
            xs[i] = std::round(xs[i] * 2.0) / 2.0;
            ys[i] = std::round(ys[i] * 2.0) / 2.0;
        }
    }
    return {xs, ys};
}

harness::AccuracyMatrix matrix_from(
    const std::map<std::string, std::map<std::string, double>>& accs) {
    harness::AccuracyMatrix m;
    for (const auto& [model, row] : accs)
        for (const auto& [dataset, acc] : row) {
            harness::AccuracyCell cell;
            cell.n_items = 100;
            cell.correct = static_cast<int>(std::lround(acc * 100));
            cell.accuracy = acc;
            m.cells[model][dataset] = cell;
        }
    return m;
}

}  // namespace

TEST_CASE("pearson matches the sum-formula oracle, ties included") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto [xs, ys] = seeded_series(seed, 3 + seed % 40, seed % 2 == 0);
        double got = analysis::pearson(xs, ys);
        double want = oracle::pearson_sums(xs, ys);
        CHECK(std::fabs(got - want) <= 1e-12);
    }
}

TEST_CASE("pearson endpoints and errors") {
    CHECK(analysis::pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(analysis::pearson({1, 2, 3}, {6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_THROWS_AS(analysis::pearson({1, 1, 1}, {1, 2, 3}), DegenerateSeries);
    CHECK_THROWS_AS(analysis::pearson({1, 2, 3}, {1, 1, 1}), DegenerateSeries);
    CHECK_THROWS_AS(analysis::pearson({1, 2}, {1, 2, 3}), Error);
    CHECK_THROWS_AS(analysis::pearson({1}, {2}), Error);
}

TEST_CASE("average_ranks ties share the mean of their span") {
    auto ranks = analysis::average_ranks({10, 20, 20, 30});
    REQUIRE(ranks.size() == 4);
    CHECK(ranks[0] == 1.0);
    CHECK(ranks[1] == 2.5);
    CHECK(ranks[2] == 2.5);
    CHECK(ranks[3] == 4.0);

    for (double r : analysis::average_ranks({7, 7, 7, 7})) CHECK(r == 2.5);

    auto rev = analysis::average_ranks({3, 2, 1});
    CHECK(rev == std::vector<double>{3.0, 2.0, 1.0});

    for (std::uint64_t seed = 50; seed < 60; ++seed) {
        auto [xs, ys] = seeded_series(seed, 25, true);
        (void)ys;
        CHECK(analysis::average_ranks(xs) == oracle::ranks_naive(xs));
    }
}

TEST_CASE("spearman matches the naive-rank oracle and a hand case") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        auto [xs, ys] = seeded_series(seed, 4 + seed % 30, true);
        CHECK(std::fabs(analysis::spearman(xs, ys) - oracle::spearman_naive(xs, ys)) <= 1e-12);
    }

    // ranks x = [1, 2.5, 2.5, 4], ranks y = [1.5, 1.5, 3, 4]
    std::vector<double> xs{1, 2, 2, 3}, ys{1, 1, 2, 3};
    CHECK(std::fabs(analysis::spearman(xs, ys) - oracle::pearson_sums({1, 2.5, 2.5, 4},
                                                                      {1.5, 1.5, 3, 4})) <= 1e-12);
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    auto [xs, ys] = seeded_series(7, 30, false);
    double base = analysis::spearman(xs, ys);
    std::vector<double> cubed(ys), exped(ys);
    for (auto& v : cubed) v = v * v * v;
    for (auto& v : exped) v = std::exp(v);
    CHECK(std::fabs(analysis::spearman(xs, cubed) - base) <= 1e-12);
    CHECK(std::fabs(analysis::spearman(xs, exped) - base) <= 1e-12);
}

TEST_CASE("least_squares_slope matches the normal-equation oracle") {
    for (std::uint64_t seed = 200; seed < 215; ++seed) {
        auto [xs, ys] = seeded_series(seed, 5 + seed % 20, seed % 3 == 0);
        CHECK(std::fabs(analysis::least_squares_slope(xs, ys) -
                        oracle::slope_normal_eq(xs, ys)) <= 1e-12);
    }
    // Exact line y = 3x + 1.
    CHECK(analysis::least_squares_slope({0, 1, 2, 3}, {1, 4, 7, 10}) ==
          doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(analysis::least_squares_slope({2, 2, 2}, {1, 2, 3}), DegenerateSeries);
}

TEST_CASE("agreement joins on (model, dataset) and reports hand-checked stats") {
    auto synth = matrix_from({{"alpha", {{"d1", 0.9}, {"d2", 0.6}}},
                              {"beta", {{"d1", 0.7}, {"d2", 0.3}}}});
    auto ref = matrix_from({{"alpha", {{"d1", 0.8}, {"d2", 0.5}}},
                            {"beta", {{"d1", 0.6}, {"d2", 0.4}}}});

    auto report = analysis::agreement(synth, ref);
    CHECK(report.n_points == 4);
    REQUIRE(report.pairing.size() == 4);
    // Deterministic join order: model, then dataset.
    CHECK(report.pairing[0].model == "alpha");
    CHECK(report.pairing[0].dataset == "d1");
    CHECK(report.pairing[3].model == "beta");
    CHECK(report.pairing[3].dataset == "d2");

    std::vector<double> sx, rx;
    for (const auto& p : report.pairing) {
        sx.push_back(p.synth_acc);
        rx.push_back(p.reference_acc);
    }
    CHECK(std::fabs(report.pearson_accuracy - oracle::pearson_sums(sx, rx)) <= 1e-12);

    // Model means: alpha 0.75 vs 0.65, beta 0.5 vs 0.5.
    CHECK(std::fabs(report.spearman_rank -
                    oracle::spearman_naive({0.75, 0.5}, {0.65, 0.5})) <= 1e-12);

    CHECK(report.per_model_overperformance.at("alpha") == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(report.per_model_overperformance.at("beta") == doctest::Approx(0.0).epsilon(1e-12));

    // Per-dataset Pearson: both datasets have 2 models with distinct values.
    REQUIRE(report.pearson_mean_per_dataset.has_value());
    double d1 = oracle::pearson_sums({0.9, 0.7}, {0.8, 0.6});
    double d2 = oracle::pearson_sums({0.6, 0.3}, {0.5, 0.4});
    CHECK(std::fabs(*report.pearson_mean_per_dataset - (d1 + d2) / 2.0) <= 1e-12);

    auto js = report.to_json();
    CHECK(js.contains("pearson_accuracy"));
    CHECK(js.contains("spearman_rank"));
    CHECK(js.contains("n_points"));
    CHECK(js.contains("per_model_overperformance"));
}

TEST_CASE("agreement ignores unshared cells and enforces the overlap floor") {
    auto synth = matrix_from({{"alpha", {{"d1", 0.9}, {"only-synth", 0.2}}},
                              {"beta", {{"d1", 0.5}}},
                              {"gamma", {{"d9", 0.4}}}});
    auto ref = matrix_from({{"alpha", {{"d1", 0.8}}},
                            {"beta", {{"d1", 0.4}, {"only-ref", 0.6}}}});
    auto report = analysis::agreement(synth, ref);
    CHECK(report.n_points == 2);

    auto tiny = matrix_from({{"alpha", {{"d1", 0.9}}}});
    CHECK_THROWS_AS(analysis::agreement(tiny, ref), InsufficientOverlap);
}

TEST_CASE("agreement on identical matrices is exact unity") {
    auto m = matrix_from({{"alpha", {{"d1", 0.91}, {"d2", 0.62}}},
                          {"beta", {{"d1", 0.55}, {"d2", 0.37}}},
                          {"gamma", {{"d1", 0.71}, {"d2", 0.48}}}});
    auto report = analysis::agreement(m, m);
    CHECK(report.pearson_accuracy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.spearman_rank == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [model, delta] : report.per_model_overperformance) {
        INFO("model ", model);
        CHECK(delta == 0.0);
    }
}

TEST_CASE("agreement surfaces degenerate series instead of inventing a number") {
    auto synth = matrix_from({{"alpha", {{"d1", 0.5}}}, {"beta", {{"d1", 0.5}}}});
    auto ref = matrix_from({{"alpha", {{"d1", 0.8}}}, {"beta", {{"d1", 0.3}}}});
    CHECK_THROWS_AS(analysis::agreement(synth, ref), DegenerateSeries);
}

TEST_CASE("per-dataset pearson is absent when no dataset has two usable points") {
    // Each dataset is covered by a single model: pooled Pearson still has four
    // points, but no within-dataset correlation exists.
    auto synth = matrix_from({{"alpha", {{"d1", 0.9}}},
                              {"beta", {{"d2", 0.4}}},
                              {"gamma", {{"d3", 0.7}}},
                              {"delta", {{"d4", 0.2}}}});
    auto ref = matrix_from({{"alpha", {{"d1", 0.8}}},
                            {"beta", {{"d2", 0.5}}},
                            {"gamma", {{"d3", 0.6}}},
                            {"delta", {{"d4", 0.3}}}});
    auto report = analysis::agreement(synth, ref);
    CHECK(report.n_points == 4);
    CHECK_FALSE(report.pearson_mean_per_dataset.has_value());
}

TEST_CASE("rank_models orders by mean accuracy with lexicographic tie-break") {
    auto m = matrix_from({{"zeta", {{"d1", 0.8}, {"d2", 0.6}}},
                          {"alpha", {{"d1", 0.9}, {"d2", 0.5}}},
                          {"mid", {{"d1", 0.95}}}});
    auto ranked = analysis::rank_models(m);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].first == "mid");  // 0.95
    CHECK(ranked[0].second == doctest::Approx(0.95));
    // alpha and zeta both average 0.7: alphabetical.
    CHECK(ranked[1].first == "alpha");
    CHECK(ranked[2].first == "zeta");
    CHECK(ranked[1].second == doctest::Approx(0.7));
    CHECK(ranked[2].second == doctest::Approx(0.7));
}

TEST_CASE("length_effect attributes deltas per generating model") {
    genesis::Benchmark b1;
    b1.benchmark_id = "b1";
    b1.dataset = "d1";
    b1.mode = genesis::ItemMode::mcq;
    b1.generating_models = {"g1"};
    genesis::Benchmark b2 = b1;
    b2.benchmark_id = "b2";
    b2.dataset = "d2";
    b2.generating_models = {"g2"};

    auto item = [](const std::string& id, const std::string& gen) {
        auto it = testutil::sample_mcq_item();
        it.item_id = id;
        it.generating_model = gen;
        return it;
    };
    b1.items = {item("i1", "g1"), item("i2", "g1")};
    b2.items = {item("i3", "g2"), item("i4", "g2")};

    auto record = [](const std::string& id, int tokens) {
        quality::QualityRecord r;
        r.item_id = id;
        r.question_token_count = tokens;
        r.clarity = r.groundedness = r.answer_correctness = r.explanation_validity = 9;
        r.judge_model = "judge1";
        return r;
    };
    std::vector<quality::QualityRecord> records{record("i1", 10), record("i2", 12),
                                                record("i3", 30), record("i4", 34)};

    auto synth = matrix_from({{"m1", {{"d1", 0.9}, {"d2", 0.5}}}});
    auto ref = matrix_from({{"m1", {{"d1", 0.6}, {"d2", 0.55}}}});

    auto report = analysis::length_effect({b1, b2}, records, synth, ref);
    REQUIRE(report.points.size() == 2);
    std::map<std::string, analysis::LengthEffectPoint> by_gen;
    for (const auto& p : report.points) by_gen[p.generating_model] = p;
    CHECK(by_gen.at("g1").mean_question_tokens == doctest::Approx(11.0));
    CHECK(by_gen.at("g2").mean_question_tokens == doctest::Approx(32.0));
    CHECK(by_gen.at("g1").delta == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(by_gen.at("g2").delta == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(std::fabs(report.trend_slope -
                    oracle::slope_normal_eq({11.0, 32.0}, {0.3, -0.05})) <= 1e-12);

    records.pop_back();  // i4 now lacks a record
    CHECK_THROWS_AS(analysis::length_effect({b1, b2}, records, synth, ref), MissingRecord);
}

TEST_CASE("length_effect with a shared ensemble gives both members the same delta") {
    genesis::Benchmark b;
    b.benchmark_id = "b";
    b.dataset = "d1";
    b.generating_models = {"g1", "g2"};
    auto i1 = testutil::sample_mcq_item();
    i1.item_id = "e1";
    i1.generating_model = "g1";
    auto i2 = testutil::sample_mcq_item();
    i2.item_id = "e2";
    i2.generating_model = "g2";
    b.items = {i1, i2};

    quality::QualityRecord r1, r2;
    r1.item_id = "e1";
    r1.question_token_count = 8;
    r2.item_id = "e2";
    r2.question_token_count = 20;

    auto synth = matrix_from({{"m1", {{"d1", 0.75}}}});
    auto ref = matrix_from({{"m1", {{"d1", 0.5}}}});
    auto report = analysis::length_effect({b}, {r1, r2}, synth, ref);
    REQUIRE(report.points.size() == 2);
    CHECK(report.points[0].delta == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(report.points[1].delta == doctest::Approx(0.25).epsilon(1e-12));
    // Identical deltas across both token means: flat trend.
    CHECK(report.trend_slope == doctest::Approx(0.0).epsilon(1e-12));
}
