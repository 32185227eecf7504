#pragma once

#include <tocc/classifier.hpp>
#include <tocc/eval.hpp>
#include <tocc/io.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tocc::cli {

enum class Reduction { pca, rp, kvip };

std::string_view to_string(Reduction r);

struct GlassReproConfig {
    std::filesystem::path data;
    GlassSubset subset = GlassSubset::float_windows;
    std::optional<std::string> normalize_by;
    double s = 0.9;
    double kappa = 0.5;
    Eigen::Index d = 2;
    int b1 = 101;
    int b2 = 50;
    Eigen::Index k = 4;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct GlassCell {
    ToccVariant variant;
    Reduction reduction;
    std::optional<double> auc;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    double seconds = 0.0;
    std::string error;
    RocCurve roc;
    std::vector<std::size_t> cluster_sizes; // pam on a single feature space only
};

struct GlassReproResult {
    std::size_t n_target = 0;
    std::size_t n_nontarget = 0;
    std::vector<std::string> features;
    VipRanking vip;
    KappaSelection selection;
    Eigen::VectorXd pca_variances;
    std::vector<GlassCell> cells; // variant-major: df, db, pam_df x pca, rp, kvip
};

/// Fits every TOCC variant on the target rows after each reduction and
/// scores all rows.
GlassReproResult run_glass_repro(const GlassReproConfig& config);

const GlassCell& find_cell(const GlassReproResult& result, ToccVariant v, Reduction r);

} // namespace tocc::cli
