#pragma once

#include "tocc/baselines.hpp"
#include "tocc/classifier.hpp"
#include "tocc/data_matrix.hpp"
#include "tocc/simgen.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tocc {

struct ConfusionMetrics {
    std::optional<double> sensitivity; // unset when no target rows
    std::optional<double> specificity; // unset when no non-target rows
};

/// Accepted targets / targets and rejected non-targets / non-targets.
/// Rows labelled unknown are ignored.
ConfusionMetrics confusion_metrics(const std::vector<bool>& accepted, std::span<const RowLabel> truth);

struct RocPoint {
    double fpr;
    double tpr;
    double threshold; // accept iff score >= threshold; +inf for the origin
};

struct RocCurve {
    std::vector<RocPoint> points; // fpr and tpr non-decreasing
    double auc = 0.0;
};

/// ROC of "accept iff score >= theta" over every distinct score plus the
/// +/- infinity sentinels; tied scores share one point. Higher scores must
/// mean more typical. AUC by the trapezoid rule.
RocCurve roc_curve(std::span<const double> scores, std::span<const RowLabel> truth);

double trapezoid_auc(std::span<const RocPoint> points);

/// Every classifier the benchmark can run.
enum class MethodId { tocc_df, tocc_db, pam_tocc_df, gauss, mix_gauss, kde, kmeans };

std::string_view to_string(MethodId id);
MethodId parse_method(std::string_view name);
std::vector<MethodId> all_methods();
bool is_tocc(MethodId id);

struct MethodConfig {
    Eigen::Index pam_k = 5;
    ToccDbConfig db{};
    BaselineConfig baseline{};
};

using FittedMethod = std::variant<ToccModel, BaselineModel>;

/// Fits `id` on target rows; `rng` seeds anything stochastic (mixture EM,
/// k-means, the density integrator).
FittedMethod fit_method(MethodId id, const Eigen::MatrixXd& target, double s, const MethodConfig& config,
                        RngStream& rng);

struct MethodOutput {
    std::vector<bool> accepted;
    std::vector<double> typicality; // oriented so that higher means more typical
};

MethodOutput apply_method(const FittedMethod& model, const Eigen::MatrixXd& z);

struct SummaryStats {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

/// Boxplot statistics (type-7 quartiles). Throws on empty input.
SummaryStats summarize(std::span<const double> values);

struct BenchmarkConfig {
    std::vector<MethodId> methods = all_methods();
    ScenarioSpec scenario{};
    int replications = 20;
    double s = 0.9;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    MethodConfig method{};
};

/// Outcome of one method on one replication.
struct ReplicationRecord {
    MethodId method;
    int replication;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> auc;
    double seconds = 0.0;
    std::string error; // non-empty when the fit failed
};

struct MethodSummary {
    MethodId method;
    std::optional<SummaryStats> specificity;
    std::optional<SummaryStats> sensitivity;
    std::optional<SummaryStats> auc;
    double total_seconds = 0.0;
    std::size_t failures = 0;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<ReplicationRecord> records; // replication-major, methods in config order
    std::vector<MethodSummary> summaries;   // one per method, config order
};

/// Replication r draws its scenario from stream r of `seed` and fits every
/// method on the target rows only; failures are recorded, not thrown.
/// Results are independent of `threads` and of execution order.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

std::vector<MethodSummary> aggregate(std::span<const ReplicationRecord> records, std::span<const MethodId> methods);

} // namespace tocc
