#pragma once

#include "tocc/density.hpp"
#include "tocc/transvariation.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tocc {

enum class ToccVariant { df, db, pam_df };

std::string_view to_string(ToccVariant variant);
ToccVariant parse_tocc_variant(std::string_view name);

struct ToccDbConfig {
    GmmConfig gmm{};
    OrthantIntegrator integrator{};
    std::uint64_t gmm_seed = 0;
};

/// A fitted transvariation-based one-class classifier.
///
/// Each prototype k comes with the reference sample its scores are counted
/// against (the whole target set for df/db, the k-th cluster for pam_df) and
/// a threshold: a query z is accepted iff tp(z) >= threshold. For db the
/// score is the density-based form under the fitted mixture, evaluated with
/// a fixed Monte Carlo sample, so predictions are deterministic.
class ToccModel {
public:
    ToccModel(ToccVariant variant, std::vector<double> sensitivities, double eps, Eigen::MatrixXd prototypes,
              std::vector<double> thresholds, std::vector<Eigen::MatrixXd> reference_sets,
              std::optional<MixtureDensity> density = std::nullopt,
              std::optional<OrthantIntegrator> integrator = std::nullopt);

    [[nodiscard]] ToccVariant variant() const { return variant_; }
    [[nodiscard]] Eigen::Index dimension() const { return prototypes_.cols(); }
    [[nodiscard]] Eigen::Index prototype_count() const { return prototypes_.rows(); }
    [[nodiscard]] const Eigen::MatrixXd& prototypes() const { return prototypes_; }
    [[nodiscard]] const std::vector<double>& thresholds() const { return thresholds_; }
    /// Target sensitivity per prototype.
    [[nodiscard]] const std::vector<double>& sensitivities() const { return sensitivities_; }
    [[nodiscard]] double eps() const { return eps_; }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& reference_sets() const { return reference_sets_; }
    [[nodiscard]] const std::optional<MixtureDensity>& density() const { return density_; }
    [[nodiscard]] const std::optional<OrthantIntegrator>& integrator() const { return integrator_; }

    [[nodiscard]] const std::vector<std::string>& feature_names() const { return feature_names_; }
    void set_feature_names(std::vector<std::string> names);

    /// Nearest prototype (Euclidean, ties to the lowest index).
    [[nodiscard]] Eigen::Index assign(const Eigen::VectorXd& z) const;
    /// Transvariation probability of `z` against prototype `k`.
    [[nodiscard]] TpScore score(const Eigen::VectorXd& z, Eigen::Index k) const;

private:
    ToccVariant variant_;
    std::vector<double> sensitivities_;
    double eps_;
    Eigen::MatrixXd prototypes_;
    std::vector<double> thresholds_;
    std::vector<Eigen::MatrixXd> reference_sets_;
    std::optional<MixtureDensity> density_;
    std::optional<OrthantIntegrator> integrator_;
    std::shared_ptr<const OrthantEvaluator> evaluator_;
    std::vector<std::string> feature_names_;
};

struct Prediction {
    bool accepted = false;
    double score = 0.0;
    std::optional<Eigen::Index> cluster; // set for pam_df
};

/// Density-free TOCC: prototype is the spatial median, threshold the
/// (1 - s) empirical quantile of the training scores.
ToccModel fit_tocc_df(const Eigen::MatrixXd& target, double s, double eps = kDefaultDropEps);

/// Density-based TOCC on a BIC-selected Gaussian mixture.
ToccModel fit_tocc_db(const Eigen::MatrixXd& target, double s, const ToccDbConfig& config = {},
                      double eps = kDefaultDropEps);

/// PAM-TOCC: k-medoids partition of the target, then one density-free TOCC
/// per cluster centred on its medoid. `s_per_cluster` holds one level or K.
ToccModel fit_pam_tocc_df(const Eigen::MatrixXd& target, Eigen::Index k, std::span<const double> s_per_cluster,
                          double eps = kDefaultDropEps);
ToccModel fit_pam_tocc_df(const Eigen::MatrixXd& target, Eigen::Index k, double s, double eps = kDefaultDropEps);

Prediction predict_one(const ToccModel& model, const Eigen::VectorXd& z);
std::vector<Prediction> predict(const ToccModel& model, const Eigen::MatrixXd& z);

/// Threshold for "accept iff score >= t" that keeps at least a fraction `s`
/// of `scores` accepted.
double threshold_for_sensitivity(std::span<const double> scores, double s);

} // namespace tocc
