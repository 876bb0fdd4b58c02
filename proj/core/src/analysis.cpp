#include "groundbench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "groundbench/errors.hpp"

namespace groundbench::analysis {

using nlohmann::json;

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw Error("pearson: series lengths differ (" + std::to_string(xs.size()) + " vs " +
                    std::to_string(ys.size()) + ")");
    std::size_t n = xs.size();
    if (n < 2) throw Error("pearson: need at least 2 points");

    double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mean_x;
        double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DegenerateSeries("xs is constant");
    if (syy == 0.0) throw DegenerateSeries("ys is constant");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average of ranks i+1..j+1
        double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error("spearman: series lengths differ");
    if (xs.size() < 2) throw Error("spearman: need at least 2 points");
    return pearson(average_ranks(xs), average_ranks(ys));
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error("least_squares_slope: series lengths differ");
    std::size_t n = xs.size();
    if (n < 2) throw Error("least_squares_slope: need at least 2 points");

    double mean_x = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double mean_y = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
    }
    if (sxx == 0.0) throw DegenerateSeries("xs is constant");
    return sxy / sxx;
}

json AgreementReport::to_json() const {
    json pairing_json = json::array();
    for (const auto& point : pairing)
        pairing_json.push_back(json{{"model", point.model},
                                    {"dataset", point.dataset},
                                    {"synth_acc", point.synth_acc},
                                    {"reference_acc", point.reference_acc}});
    json out{{"pearson_accuracy", pearson_accuracy},
             {"pearson_granularity", "pooled over (model, dataset) cells"},
             {"spearman_rank", spearman_rank},
             {"spearman_granularity", "per-dataset-averaged model means"},
             {"n_points", n_points},
             {"per_model_overperformance", per_model_overperformance},
             {"pairing", pairing_json}};
    if (pearson_mean_per_dataset) {
        out["pearson_mean_per_dataset"] = *pearson_mean_per_dataset;
        out["pearson_mean_per_dataset_granularity"] =
            "mean of per-dataset correlations over models";
    }
    return out;
}

AgreementReport agreement(const harness::AccuracyMatrix& synth,
                          const harness::AccuracyMatrix& reference) {
    AgreementReport report;
    for (const auto& [model, synth_row] : synth.cells) {
        auto ref_it = reference.cells.find(model);
        if (ref_it == reference.cells.end()) continue;
        for (const auto& [dataset, synth_cell] : synth_row) {
            auto cell_it = ref_it->second.find(dataset);
            if (cell_it == ref_it->second.end()) continue;
            report.pairing.push_back(
                {model, dataset, synth_cell.accuracy, cell_it->second.accuracy});
        }
    }
    report.n_points = static_cast<int>(report.pairing.size());
    if (report.n_points < 2) throw InsufficientOverlap(report.n_points);

    std::vector<double> synth_accs, ref_accs;
    for (const auto& point : report.pairing) {
        synth_accs.push_back(point.synth_acc);
        ref_accs.push_back(point.reference_acc);
    }
    report.pearson_accuracy = pearson(synth_accs, ref_accs);

    // per-dataset correlations over models, averaged (skipping datasets with
    // too few models or no variance)
    std::map<std::string, std::vector<std::pair<double, double>>> by_dataset;
    for (const auto& point : report.pairing)
        by_dataset[point.dataset].emplace_back(point.synth_acc, point.reference_acc);
    std::vector<double> dataset_correlations;
    for (const auto& [dataset, pairs] : by_dataset) {
        if (pairs.size() < 2) continue;
        std::vector<double> xs, ys;
        for (const auto& [x, y] : pairs) {
            xs.push_back(x);
            ys.push_back(y);
        }
        try {
            dataset_correlations.push_back(pearson(xs, ys));
        } catch (const DegenerateSeries&) {
        }
    }
    if (!dataset_correlations.empty())
        report.pearson_mean_per_dataset =
            std::accumulate(dataset_correlations.begin(), dataset_correlations.end(), 0.0) /
            static_cast<double>(dataset_correlations.size());

    // Spearman over per-dataset-averaged model means; over-performance along
    // the way.
    std::map<std::string, std::pair<double, double>> model_sums;  // model -> (synth, ref)
    std::map<std::string, int> model_counts;
    for (const auto& point : report.pairing) {
        model_sums[point.model].first += point.synth_acc;
        model_sums[point.model].second += point.reference_acc;
        model_counts[point.model] += 1;
    }
    std::vector<double> synth_means, ref_means;
    for (const auto& [model, sums] : model_sums) {
        double count = model_counts[model];
        synth_means.push_back(sums.first / count);
        ref_means.push_back(sums.second / count);
        report.per_model_overperformance[model] = (sums.first - sums.second) / count;
    }
    if (synth_means.size() < 2)
        throw DegenerateSeries("fewer than 2 models shared between the matrices");
    report.spearman_rank = spearman(synth_means, ref_means);
    return report;
}

std::vector<std::pair<std::string, double>> rank_models(const harness::AccuracyMatrix& matrix) {
    if (matrix.cells.empty()) throw Error("rank_models: empty matrix");
    std::vector<std::pair<std::string, double>> ranking;
    for (const auto& [model, row] : matrix.cells) {
        if (row.empty()) continue;
        double sum = 0;
        for (const auto& [dataset, cell] : row) sum += cell.accuracy;
        ranking.emplace_back(model, sum / static_cast<double>(row.size()));
    }
    std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranking;
}

json LengthEffectReport::to_json() const {
    json points_json = json::array();
    for (const auto& point : points)
        points_json.push_back(json{{"generating_model", point.generating_model},
                                   {"mean_question_tokens", point.mean_question_tokens},
                                   {"delta", point.delta}});
    return json{{"points", points_json}, {"trend_slope", trend_slope}};
}

LengthEffectReport length_effect(const std::vector<genesis::Benchmark>& benchmarks,
                                 const std::vector<quality::QualityRecord>& records,
                                 const harness::AccuracyMatrix& synth,
                                 const harness::AccuracyMatrix& reference) {
    std::map<std::string, const quality::QualityRecord*> by_id;
    for (const auto& record : records) by_id[record.item_id] = &record;

    struct Accum {
        double token_sum = 0;
        int item_count = 0;
        double delta_sum = 0;
        int delta_count = 0;
    };
    std::map<std::string, Accum> per_generator;

    for (const auto& benchmark : benchmarks) {
        std::string dataset =
            benchmark.dataset.empty() ? benchmark.benchmark_id : benchmark.dataset;
        // the benchmark's over-performance across evaluated models in the join
        double delta_sum = 0;
        int delta_count = 0;
        for (const auto& [model, synth_row] : synth.cells) {
            auto synth_cell = synth_row.find(dataset);
            if (synth_cell == synth_row.end()) continue;
            auto ref_row = reference.cells.find(model);
            if (ref_row == reference.cells.end()) continue;
            auto ref_cell = ref_row->second.find(dataset);
            if (ref_cell == ref_row->second.end()) continue;
            delta_sum += synth_cell->second.accuracy - ref_cell->second.accuracy;
            ++delta_count;
        }
        for (const auto& item : benchmark.items) {
            auto record = by_id.find(item.item_id);
            if (record == by_id.end()) throw MissingRecord(item.item_id);
            Accum& accum = per_generator[item.generating_model];
            accum.token_sum += record->second->question_token_count;
            accum.item_count += 1;
        }
        if (delta_count > 0) {
            double delta = delta_sum / static_cast<double>(delta_count);
            for (const auto& generator : benchmark.generating_models) {
                per_generator[generator].delta_sum += delta;
                per_generator[generator].delta_count += 1;
            }
        }
    }

    LengthEffectReport report;
    std::vector<double> xs, ys;
    for (const auto& [generator, accum] : per_generator) {
        if (accum.item_count == 0 || accum.delta_count == 0) continue;
        LengthEffectPoint point;
        point.generating_model = generator;
        point.mean_question_tokens = accum.token_sum / accum.item_count;
        point.delta = accum.delta_sum / accum.delta_count;
        xs.push_back(point.mean_question_tokens);
        ys.push_back(point.delta);
        report.points.push_back(std::move(point));
    }
    if (xs.size() >= 2) {
        try {
            report.trend_slope = least_squares_slope(xs, ys);
        } catch (const DegenerateSeries&) {
            report.trend_slope = 0.0;  // all generators share one mean length
        }
    }
    return report;
}

}  // namespace groundbench::analysis
