#pragma once

// Agreement statistics between a synthetic benchmark's accuracy matrix and a
// reference one: Pearson, Spearman (average ranks on ties), over-performance
// deltas, model rankings, and the question-length effect.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groundbench/harness.hpp"
#include "groundbench/quality.hpp"

namespace groundbench::analysis {

// Product-moment correlation; throws DegenerateSeries on a constant series,
// Error on length mismatch or n < 2.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// 1-based ranks; tied values share the average of the ranks they span.
std::vector<double> average_ranks(const std::vector<double>& values);

// Pearson of the rank vectors.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Least-squares slope of y on x; throws DegenerateSeries when x is constant.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

struct PairedPoint {
    std::string model;
    std::string dataset;
    double synth_acc = 0;
    double reference_acc = 0;
};

struct AgreementReport {
    // Pearson over all joined (model, dataset) cells — the pooled variant.
    double pearson_accuracy = 0;
    // Mean of per-dataset Pearson correlations over models; absent when no
    // dataset has enough non-degenerate points.  Emitted alongside the pooled
    // number because the two granularities answer different questions.
    std::optional<double> pearson_mean_per_dataset;
    // Spearman over per-dataset-averaged model means.
    double spearman_rank = 0;
    int n_points = 0;
    std::map<std::string, double> per_model_overperformance;  // mean(synth - reference)
    std::vector<PairedPoint> pairing;

    nlohmann::json to_json() const;
};

// Inner join on (model, dataset); throws InsufficientOverlap below 2 shared
// cells.  Deterministic regardless of input map ordering.
AgreementReport agreement(const harness::AccuracyMatrix& synth,
                          const harness::AccuracyMatrix& reference);

// Descending mean accuracy across each model's datasets; ties broken
// lexicographically by model name.
std::vector<std::pair<std::string, double>> rank_models(const harness::AccuracyMatrix& matrix);

struct LengthEffectPoint {
    std::string generating_model;
    double mean_question_tokens = 0;
    double delta = 0;  // synthetic accuracy - reference accuracy, averaged
};

struct LengthEffectReport {
    std::vector<LengthEffectPoint> points;
    double trend_slope = 0;

    nlohmann::json to_json() const;
};

// Per generating model: mean question tokens (from the quality records —
// MissingRecord when an item lacks one) against the over-performance of the
// benchmarks it contributed to.  Ensemble benchmarks attribute their shared
// delta to every member.  Joins synth and reference on (model, dataset).
LengthEffectReport length_effect(const std::vector<genesis::Benchmark>& benchmarks,
                                 const std::vector<quality::QualityRecord>& records,
                                 const harness::AccuracyMatrix& synth,
                                 const harness::AccuracyMatrix& reference);

}  // namespace groundbench::analysis
