#include "tocc/eval.hpp"

#include "tocc/error.hpp"
#include "tocc/numcore.hpp"
#include "tocc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace tocc {

ConfusionMetrics confusion_metrics(const std::vector<bool>& accepted, std::span<const RowLabel> truth) {
    if (accepted.size() != truth.size()) throw InvalidArgument("confusion_metrics: length mismatch");
    std::size_t targets = 0, accepted_targets = 0, others = 0, rejected_others = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == RowLabel::target) {
            ++targets;
            if (accepted[i]) ++accepted_targets;
        } else if (truth[i] == RowLabel::non_target) {
            ++others;
            if (!accepted[i]) ++rejected_others;
        }
    }
    ConfusionMetrics out;
    if (targets > 0) out.sensitivity = static_cast<double>(accepted_targets) / static_cast<double>(targets);
    if (others > 0) out.specificity = static_cast<double>(rejected_others) / static_cast<double>(others);
    return out;
}

double trapezoid_auc(std::span<const RocPoint> points) {
    double area = 0.0;
    for (std::size_t k = 1; k < points.size(); ++k)
        area += (points[k].fpr - points[k - 1].fpr) * 0.5 * (points[k].tpr + points[k - 1].tpr);
    return area;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const RowLabel> truth) {
    if (scores.size() != truth.size()) throw InvalidArgument("roc_curve: length mismatch");
    std::vector<std::size_t> order;
    std::size_t targets = 0, others = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw InvalidArgument("roc_curve: non-finite score");
        if (truth[i] == RowLabel::unknown) throw InvalidArgument("roc_curve: row with unknown label");
        (truth[i] == RowLabel::target ? targets : others) += 1;
        order.push_back(i);
    }
    if (targets == 0 || others == 0) throw InvalidArgument("roc_curve: both classes must be present");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    constexpr double inf = std::numeric_limits<double>::infinity();
    RocCurve curve;
    curve.points.push_back({0.0, 0.0, inf});
    std::size_t tp = 0, fp = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double theta = scores[order[k]];
        while (k < order.size() && scores[order[k]] == theta) {
            (truth[order[k]] == RowLabel::target ? tp : fp) += 1;
            ++k;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(others),
                                static_cast<double>(tp) / static_cast<double>(targets), theta});
    }
    curve.points.push_back({1.0, 1.0, -inf});
    curve.auc = trapezoid_auc(curve.points);
    return curve;
}

std::string_view to_string(MethodId id) {
    switch (id) {
    case MethodId::tocc_df: return "tocc-df";
    case MethodId::tocc_db: return "tocc-db";
    case MethodId::pam_tocc_df: return "pam-tocc-df";
    case MethodId::gauss: return "gauss";
    case MethodId::mix_gauss: return "mix-gauss";
    case MethodId::kde: return "kde";
    case MethodId::kmeans: return "kmeans";
    }
    return "unknown";
}

MethodId parse_method(std::string_view name) {
    for (MethodId id : all_methods())
        if (to_string(id) == name) return id;
    throw InvalidArgument("unknown method '" + std::string(name) +
                          "' (expected tocc-df, tocc-db, pam-tocc-df, gauss, mix-gauss, kde or kmeans)");
}

std::vector<MethodId> all_methods() {
    return {MethodId::tocc_df, MethodId::tocc_db, MethodId::pam_tocc_df, MethodId::gauss,
            MethodId::mix_gauss, MethodId::kde,   MethodId::kmeans};
}

bool is_tocc(MethodId id) {
    return id == MethodId::tocc_df || id == MethodId::tocc_db || id == MethodId::pam_tocc_df;
}

FittedMethod fit_method(MethodId id, const Eigen::MatrixXd& target, double s, const MethodConfig& config,
                        RngStream& rng) {
    switch (id) {
    case MethodId::tocc_df: return fit_tocc_df(target, s);
    case MethodId::pam_tocc_df: return fit_pam_tocc_df(target, config.pam_k, s);
    case MethodId::tocc_db: {
        ToccDbConfig db = config.db;
        db.gmm_seed = rng.engine()();
        db.integrator.seed = rng.seed();
        db.integrator.stream_id = rng.stream_id();
        return fit_tocc_db(target, s, db);
    }
    case MethodId::gauss: return fit_baseline(BaselineKind::gauss, target, s, config.baseline, rng);
    case MethodId::mix_gauss: return fit_baseline(BaselineKind::mix_gauss, target, s, config.baseline, rng);
    case MethodId::kde: return fit_baseline(BaselineKind::kde, target, s, config.baseline, rng);
    case MethodId::kmeans: return fit_baseline(BaselineKind::kmeans, target, s, config.baseline, rng);
    }
    throw InvalidArgument("unknown method");
}

MethodOutput apply_method(const FittedMethod& model, const Eigen::MatrixXd& z) {
    MethodOutput out;
    if (const auto* tocc = std::get_if<ToccModel>(&model)) {
        for (const Prediction& p : predict(*tocc, z)) {
            out.accepted.push_back(p.accepted);
            out.typicality.push_back(p.score);
        }
        return out;
    }
    const auto& base = std::get<BaselineModel>(model);
    const bool flip = base.direction() == ScoreDirection::lower_is_typical;
    for (const BaselinePrediction& p : predict_baseline(base, z)) {
        out.accepted.push_back(p.accepted);
        out.typicality.push_back(flip ? -p.score : p.score);
    }
    return out;
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) throw InvalidArgument("summarize: no values");
    SummaryStats s;
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    s.q1 = interpolated_quantile(values, 0.25);
    s.median = interpolated_quantile(values, 0.5);
    s.q3 = interpolated_quantile(values, 0.75);
    s.count = values.size();
    return s;
}

std::vector<MethodSummary> aggregate(std::span<const ReplicationRecord> records, std::span<const MethodId> methods) {
    std::vector<MethodSummary> out;
    for (MethodId m : methods) {
        // Fold in replication order so the result does not depend on scheduling.
        std::vector<const ReplicationRecord*> mine;
        for (const auto& r : records)
            if (r.method == m) mine.push_back(&r);
        std::stable_sort(mine.begin(), mine.end(),
                         [](const auto* a, const auto* b) { return a->replication < b->replication; });
        MethodSummary summary{m, {}, {}, {}, 0.0, 0};
        std::vector<double> spec, sens, auc;
        for (const auto* r : mine) {
            summary.total_seconds += r->seconds;
            if (!r->error.empty()) {
                ++summary.failures;
                continue;
            }
            if (r->specificity) spec.push_back(*r->specificity);
            if (r->sensitivity) sens.push_back(*r->sensitivity);
            if (r->auc) auc.push_back(*r->auc);
        }
        if (!spec.empty()) summary.specificity = summarize(spec);
        if (!sens.empty()) summary.sensitivity = summarize(sens);
        if (!auc.empty()) summary.auc = summarize(auc);
        out.push_back(summary);
    }
    return out;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    if (config.replications < 1) throw InvalidArgument("run_benchmark: replications must be at least 1");
    if (config.methods.empty()) throw InvalidArgument("run_benchmark: no methods");
    if (!(config.s > 0.0 && config.s < 1.0)) throw InvalidArgument("run_benchmark: s must lie in (0, 1)");
    config.scenario.validate();

    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t n_methods = config.methods.size();
    std::vector<ReplicationRecord> records(reps * n_methods);
    parallel_for(reps, config.threads, [&](std::size_t rep) {
        ScenarioSpec spec = config.scenario;
        spec.seed = config.seed;
        spec.stream_id = rep;
        const Scenario data = generate(spec);
        const DataMatrix all = data.combined();
        const std::vector<RowLabel>& truth = *all.row_labels();
        const RngStream rep_stream(config.seed, rep);
        for (std::size_t k = 0; k < n_methods; ++k) {
            const MethodId id = config.methods[k];
            ReplicationRecord& rec = records[rep * n_methods + k];
            rec.method = id;
            rec.replication = static_cast<int>(rep);
            RngStream rng = rep_stream.derive(static_cast<std::uint64_t>(id) + 1);
            const auto start = std::chrono::steady_clock::now();
            try {
                const FittedMethod model = fit_method(id, data.target.values(), config.s, config.method, rng);
                const MethodOutput out = apply_method(model, all.values());
                const ConfusionMetrics cm = confusion_metrics(out.accepted, truth);
                rec.sensitivity = cm.sensitivity;
                rec.specificity = cm.specificity;
                rec.auc = roc_curve(out.typicality, truth).auc;
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
    });
    BenchmarkReport report{config, std::move(records), {}};
    report.summaries = aggregate(report.records, config.methods);
    return report;
}

} // namespace tocc
