#pragma once

#include "tocc/density.hpp"
#include "tocc/rng.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <vector>

namespace tocc {

enum class BaselineKind { gauss, mix_gauss, kde, kmeans };
enum class ScoreDirection { higher_is_typical, lower_is_typical };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view name);

struct BaselineConfig {
    /// Ridge added to the covariance diagonal (relative to its mean variance)
    /// for gauss; 0 means a singular covariance is an error.
    double gauss_ridge = 0.0;
    GmmConfig gmm{};
    Eigen::Index kmeans_k = 5;
    int kmeans_restarts = 5;
};

/// Reference one-class classifiers sharing TOCC's calibration: the
/// threshold is the empirical quantile of the training scores at level s
/// (lower-is-typical scores) or 1 - s (higher-is-typical).
class BaselineModel {
public:
    struct Gauss {
        Eigen::VectorXd mean;
        Eigen::MatrixXd precision;
    };
    struct Kde {
        Eigen::MatrixXd training;
        Eigen::VectorXd bandwidth; // per-dimension Gaussian kernel sd
    };
    struct KMeans {
        Eigen::MatrixXd centroids;
    };

    BaselineModel(BaselineKind kind, double s, double threshold, std::optional<Gauss> gauss,
                  std::optional<MixtureDensity> mixture, std::optional<Kde> kde, std::optional<KMeans> kmeans);

    [[nodiscard]] BaselineKind kind() const { return kind_; }
    [[nodiscard]] double sensitivity() const { return s_; }
    [[nodiscard]] double threshold() const { return threshold_; }
    [[nodiscard]] ScoreDirection direction() const;
    [[nodiscard]] Eigen::Index dimension() const;

    [[nodiscard]] const std::optional<Gauss>& gauss() const { return gauss_; }
    [[nodiscard]] const std::optional<MixtureDensity>& mixture() const { return mixture_; }
    [[nodiscard]] const std::optional<Kde>& kde() const { return kde_; }
    [[nodiscard]] const std::optional<KMeans>& kmeans() const { return kmeans_; }

    /// Raw score in the kind's own direction.
    [[nodiscard]] double score(const Eigen::VectorXd& z) const;
    [[nodiscard]] bool accepts(double score) const;

private:
    BaselineKind kind_;
    double s_;
    double threshold_;
    std::optional<Gauss> gauss_;
    std::optional<MixtureDensity> mixture_;
    std::optional<Kde> kde_;
    std::optional<KMeans> kmeans_;
};

struct BaselinePrediction {
    bool accepted = false;
    double score = 0.0;
};

BaselineModel fit_baseline(BaselineKind kind, const Eigen::MatrixXd& target, double s,
                           const BaselineConfig& config, RngStream& rng);

std::vector<BaselinePrediction> predict_baseline(const BaselineModel& model, const Eigen::MatrixXd& z);

/// Per-dimension Silverman bandwidth sd_j (4 / ((p + 2) n))^(1 / (p + 4)).
Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& x);

} // namespace tocc
