#include "tocc/baselines.hpp"

#include "tocc/error.hpp"
#include "tocc/kmeans.hpp"
#include "tocc/numcore.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tocc {

std::string_view to_string(BaselineKind kind) {
    switch (kind) {
    case BaselineKind::gauss: return "gauss";
    case BaselineKind::mix_gauss: return "mix-gauss";
    case BaselineKind::kde: return "kde";
    case BaselineKind::kmeans: return "kmeans";
    }
    return "unknown";
}

BaselineKind parse_baseline_kind(std::string_view name) {
    if (name == "gauss") return BaselineKind::gauss;
    if (name == "mix-gauss" || name == "mix_gauss") return BaselineKind::mix_gauss;
    if (name == "kde") return BaselineKind::kde;
    if (name == "kmeans" || name == "km") return BaselineKind::kmeans;
    throw InvalidArgument("unknown baseline '" + std::string(name) + "'");
}

BaselineModel::BaselineModel(BaselineKind kind, double s, double threshold, std::optional<Gauss> gauss,
                             std::optional<MixtureDensity> mixture, std::optional<Kde> kde,
                             std::optional<KMeans> kmeans)
    : kind_(kind),
      s_(s),
      threshold_(threshold),
      gauss_(std::move(gauss)),
      mixture_(std::move(mixture)),
      kde_(std::move(kde)),
      kmeans_(std::move(kmeans)) {
    if (!(s_ > 0.0 && s_ < 1.0)) throw InvalidArgument("baseline: sensitivity outside (0, 1)");
    if (!std::isfinite(threshold_)) throw InvalidArgument("baseline: non-finite threshold");
    const bool ok = (kind_ == BaselineKind::gauss && gauss_) || (kind_ == BaselineKind::mix_gauss && mixture_) ||
                    (kind_ == BaselineKind::kde && kde_) || (kind_ == BaselineKind::kmeans && kmeans_);
    if (!ok) throw InvalidArgument("baseline: parameters missing for kind " + std::string(to_string(kind_)));
}

ScoreDirection BaselineModel::direction() const {
    return kind_ == BaselineKind::gauss || kind_ == BaselineKind::kmeans ? ScoreDirection::lower_is_typical
                                                                          : ScoreDirection::higher_is_typical;
}

Eigen::Index BaselineModel::dimension() const {
    switch (kind_) {
    case BaselineKind::gauss: return gauss_->mean.size();
    case BaselineKind::mix_gauss: return mixture_->dimension();
    case BaselineKind::kde: return kde_->training.cols();
    case BaselineKind::kmeans: return kmeans_->centroids.cols();
    }
    return 0;
}

double BaselineModel::score(const Eigen::VectorXd& z) const {
    if (z.size() != dimension())
        throw InvalidArgument("predict: query has " + std::to_string(z.size()) + " features, model expects " +
                              std::to_string(dimension()));
    switch (kind_) {
    case BaselineKind::gauss: {
        const Eigen::VectorXd d = z - gauss_->mean;
        return std::sqrt(std::max(0.0, d.dot(gauss_->precision * d)));
    }
    case BaselineKind::mix_gauss: return mixture_->pdf(z);
    case BaselineKind::kde: {
        const auto& train = kde_->training;
        const Eigen::VectorXd& h = kde_->bandwidth;
        const double log_norm = -0.5 * static_cast<double>(h.size()) * std::log(2.0 * std::numbers::pi) -
                                h.array().log().sum();
        double total = 0.0;
        for (Eigen::Index i = 0; i < train.rows(); ++i) {
            const double q = ((train.row(i).transpose() - z).array() / h.array()).square().sum();
            total += std::exp(log_norm - 0.5 * q);
        }
        return total / static_cast<double>(train.rows());
    }
    case BaselineKind::kmeans: {
        double d = 0.0;
        nearest_row(kmeans_->centroids, z, &d);
        return d;
    }
    }
    return 0.0;
}

bool BaselineModel::accepts(double score) const {
    return direction() == ScoreDirection::lower_is_typical ? score <= threshold_ : score >= threshold_;
}

Eigen::VectorXd silverman_bandwidth(const Eigen::MatrixXd& x) {
    const auto n = static_cast<double>(x.rows());
    const auto p = static_cast<double>(x.cols());
    const double factor = std::pow(4.0 / ((p + 2.0) * n), 1.0 / (p + 4.0));
    return column_standard_deviations(x) * factor;
}

namespace {

double calibrate(const std::vector<double>& scores, double s, ScoreDirection direction) {
    return direction == ScoreDirection::lower_is_typical ? empirical_quantile(scores, s)
                                                         : empirical_quantile(scores, 1.0 - s);
}

} // namespace

BaselineModel fit_baseline(BaselineKind kind, const Eigen::MatrixXd& target, double s,
                           const BaselineConfig& config, RngStream& rng) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("sensitivity s must lie in (0, 1)");
    if (target.rows() < 2) throw InvalidArgument("baseline: need at least two target rows");

    std::optional<BaselineModel::Gauss> gauss;
    std::optional<MixtureDensity> mixture;
    std::optional<BaselineModel::Kde> kde;
    std::optional<BaselineModel::KMeans> km;
    switch (kind) {
    case BaselineKind::gauss: {
        Eigen::MatrixXd cov = sample_covariance(target);
        if (config.gauss_ridge > 0.0) cov.diagonal().array() += config.gauss_ridge * cov.trace() / cov.rows();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
        const double scale = std::max(cov.diagonal().maxCoeff(), std::numeric_limits<double>::min());
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= 1e-12 * scale)
            throw DegenerateData("gauss: covariance is singular; set a ridge (--ridge) to regularise");
        gauss = BaselineModel::Gauss{target.colwise().mean().transpose(),
                                     ldlt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()))};
        break;
    }
    case BaselineKind::mix_gauss: mixture = fit_gmm(target, config.gmm, rng).density; break;
    case BaselineKind::kde: {
        const Eigen::VectorXd h = silverman_bandwidth(target);
        if (!(h.minCoeff() > 0.0)) throw DegenerateData("kde: a feature has zero variance");
        kde = BaselineModel::Kde{target, h};
        break;
    }
    case BaselineKind::kmeans:
        if (config.kmeans_k > target.rows())
            throw InvalidArgument("kmeans: K = " + std::to_string(config.kmeans_k) + " exceeds the " +
                                  std::to_string(target.rows()) + " target rows");
        km = BaselineModel::KMeans{kmeans(target, config.kmeans_k, rng, KMeansOptions{config.kmeans_restarts, 100}).centroids};
        break;
    }
    // Provisional model (threshold 0) just to reuse the scoring code.
    BaselineModel provisional(kind, s, 0.0, gauss, mixture, kde, km);
    std::vector<double> scores(static_cast<std::size_t>(target.rows()));
    for (Eigen::Index i = 0; i < target.rows(); ++i)
        scores[static_cast<std::size_t>(i)] = provisional.score(target.row(i).transpose());
    const double threshold = calibrate(scores, s, provisional.direction());
    return BaselineModel(kind, s, threshold, std::move(gauss), std::move(mixture), std::move(kde), std::move(km));
}

std::vector<BaselinePrediction> predict_baseline(const BaselineModel& model, const Eigen::MatrixXd& z) {
    if (z.cols() != model.dimension())
        throw InvalidArgument("predict: data has " + std::to_string(z.cols()) + " features, model expects " +
                              std::to_string(model.dimension()));
    std::vector<BaselinePrediction> out(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        auto& p = out[static_cast<std::size_t>(i)];
        p.score = model.score(z.row(i).transpose());
        p.accepted = model.accepts(p.score);
    }
    return out;
}

} // namespace tocc
