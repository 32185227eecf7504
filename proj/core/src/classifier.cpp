#include "tocc/classifier.hpp"

#include "tocc/error.hpp"
#include "tocc/numcore.hpp"
#include "tocc/pam.hpp"

#include <cmath>
#include <limits>

namespace tocc {

std::string_view to_string(ToccVariant variant) {
    switch (variant) {
    case ToccVariant::df: return "tocc-df";
    case ToccVariant::db: return "tocc-db";
    case ToccVariant::pam_df: return "pam-tocc-df";
    }
    return "unknown";
}

ToccVariant parse_tocc_variant(std::string_view name) {
    if (name == "tocc-df" || name == "df") return ToccVariant::df;
    if (name == "tocc-db" || name == "db") return ToccVariant::db;
    if (name == "pam-tocc-df" || name == "pam_df") return ToccVariant::pam_df;
    throw InvalidArgument("unknown TOCC variant '" + std::string(name) + "'");
}

ToccModel::ToccModel(ToccVariant variant, std::vector<double> sensitivities, double eps, Eigen::MatrixXd prototypes,
                     std::vector<double> thresholds, std::vector<Eigen::MatrixXd> reference_sets,
                     std::optional<MixtureDensity> density, std::optional<OrthantIntegrator> integrator)
    : variant_(variant),
      sensitivities_(std::move(sensitivities)),
      eps_(eps),
      prototypes_(std::move(prototypes)),
      thresholds_(std::move(thresholds)),
      reference_sets_(std::move(reference_sets)),
      density_(std::move(density)),
      integrator_(integrator) {
    const auto k = static_cast<std::size_t>(prototypes_.rows());
    if (k < 1 || prototypes_.cols() < 1) throw InvalidArgument("TOCC model: at least one prototype required");
    if (variant_ != ToccVariant::pam_df && k != 1)
        throw InvalidArgument("TOCC model: df and db variants have exactly one prototype");
    if (thresholds_.size() != k || reference_sets_.size() != k || sensitivities_.size() != k)
        throw InvalidArgument("TOCC model: thresholds, sensitivities and reference sets must match the prototypes");
    for (double t : thresholds_)
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("TOCC model: threshold outside [0, 1]");
    for (double s : sensitivities_)
        if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("TOCC model: sensitivity outside (0, 1)");
    for (const auto& ref : reference_sets_)
        if (ref.rows() < 1 || ref.cols() != prototypes_.cols())
            throw InvalidArgument("TOCC model: reference set shape does not match the prototypes");
    if (!(eps_ >= 0.0)) throw InvalidArgument("TOCC model: eps must be non-negative");
    if (variant_ == ToccVariant::db) {
        if (!density_ || !integrator_) throw InvalidArgument("TOCC model: db variant needs a density and integrator");
        if (density_->dimension() != prototypes_.cols())
            throw InvalidArgument("TOCC model: density dimension does not match the prototypes");
        evaluator_ = std::make_shared<const OrthantEvaluator>(*density_, *integrator_);
    }
}

void ToccModel::set_feature_names(std::vector<std::string> names) {
    if (!names.empty() && static_cast<Eigen::Index>(names.size()) != dimension())
        throw InvalidArgument("TOCC model: feature name count does not match the dimension");
    feature_names_ = std::move(names);
}

Eigen::Index ToccModel::assign(const Eigen::VectorXd& z) const {
    if (z.size() != dimension())
        throw InvalidArgument("predict: query has " + std::to_string(z.size()) + " features, model expects " +
                              std::to_string(dimension()));
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < prototypes_.rows(); ++k) {
        const double d = (prototypes_.row(k).transpose() - z).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

TpScore ToccModel::score(const Eigen::VectorXd& z, Eigen::Index k) const {
    if (z.size() != dimension())
        throw InvalidArgument("predict: query has " + std::to_string(z.size()) + " features, model expects " +
                              std::to_string(dimension()));
    const Eigen::VectorXd centre = prototypes_.row(k).transpose();
    if (variant_ == ToccVariant::db) return multivariate_tp_density(*evaluator_, z, centre, eps_);
    return multivariate_tp(reference_sets_[static_cast<std::size_t>(k)], z, centre, eps_);
}

double threshold_for_sensitivity(std::span<const double> scores, double s) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("sensitivity s must lie in (0, 1)");
    return empirical_quantile(scores, 1.0 - s);
}

namespace {

void check_fit_input(const Eigen::MatrixXd& target, double s, Eigen::Index min_rows) {
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("sensitivity s must lie in (0, 1)");
    if (target.rows() < min_rows)
        throw InvalidArgument("need at least " + std::to_string(min_rows) + " target rows, got " +
                              std::to_string(target.rows()));
    if (target.cols() < 1) throw InvalidArgument("target data has no features");
    const Eigen::RowVectorXd first = target.row(0);
    if (((target.rowwise() - first).array().abs() == 0.0).all())
        throw DegenerateData("target data is constant; no transvariation structure to calibrate");
}

std::vector<double> self_scores(const Eigen::MatrixXd& ref, const Eigen::VectorXd& centre, double eps) {
    std::vector<double> scores(static_cast<std::size_t>(ref.rows()));
    for (Eigen::Index i = 0; i < ref.rows(); ++i)
        scores[static_cast<std::size_t>(i)] = multivariate_tp(ref, ref.row(i).transpose(), centre, eps).value;
    return scores;
}

} // namespace

ToccModel fit_tocc_df(const Eigen::MatrixXd& target, double s, double eps) {
    check_fit_input(target, s, 5);
    const Eigen::VectorXd centre = spatial_median(target);
    const std::vector<double> scores = self_scores(target, centre, eps);
    return ToccModel(ToccVariant::df, {s}, eps, centre.transpose(), {threshold_for_sensitivity(scores, s)},
                     {target});
}

ToccModel fit_tocc_db(const Eigen::MatrixXd& target, double s, const ToccDbConfig& config, double eps) {
    check_fit_input(target, s, 5);
    config.integrator.validate();
    RngStream rng(config.gmm_seed, 0);
    GmmFit fit = fit_gmm(target, config.gmm, rng);
    const Eigen::VectorXd centre = spatial_median(target);
    const OrthantEvaluator evaluator(fit.density, config.integrator);
    std::vector<double> scores(static_cast<std::size_t>(target.rows()));
    for (Eigen::Index i = 0; i < target.rows(); ++i)
        scores[static_cast<std::size_t>(i)] =
            multivariate_tp_density(evaluator, target.row(i).transpose(), centre, eps).value;
    return ToccModel(ToccVariant::db, {s}, eps, centre.transpose(), {threshold_for_sensitivity(scores, s)},
                     {target}, std::move(fit.density), config.integrator);
}

ToccModel fit_pam_tocc_df(const Eigen::MatrixXd& target, Eigen::Index k, std::span<const double> s_per_cluster,
                          double eps) {
    if (s_per_cluster.empty() || (s_per_cluster.size() != 1 && static_cast<Eigen::Index>(s_per_cluster.size()) != k))
        throw InvalidArgument("pam-tocc-df: give one sensitivity or one per cluster");
    for (double s : s_per_cluster) check_fit_input(target, s, 1);
    if (k < 1) throw InvalidArgument("pam-tocc-df: K must be at least 1");
    const PamResult part = pam(target, k);

    Eigen::MatrixXd prototypes(k, target.cols());
    std::vector<double> thresholds;
    std::vector<double> sensitivities;
    std::vector<Eigen::MatrixXd> references;
    for (Eigen::Index c = 0; c < k; ++c) {
        std::vector<Eigen::Index> members;
        for (std::size_t i = 0; i < part.assignment.size(); ++i)
            if (part.assignment[i] == c) members.push_back(static_cast<Eigen::Index>(i));
        if (members.size() < 3)
            throw DegenerateData("pam-tocc-df: cluster " + std::to_string(c) + " has " +
                                 std::to_string(members.size()) + " members (need 3); try a smaller K");
        Eigen::MatrixXd ref(static_cast<Eigen::Index>(members.size()), target.cols());
        for (std::size_t r = 0; r < members.size(); ++r) ref.row(static_cast<Eigen::Index>(r)) = target.row(members[r]);
        const Eigen::VectorXd medoid = target.row(part.medoids[static_cast<std::size_t>(c)]).transpose();
        const double s = s_per_cluster.size() == 1 ? s_per_cluster[0] : s_per_cluster[static_cast<std::size_t>(c)];
        prototypes.row(c) = medoid.transpose();
        thresholds.push_back(threshold_for_sensitivity(self_scores(ref, medoid, eps), s));
        sensitivities.push_back(s);
        references.push_back(std::move(ref));
    }
    return ToccModel(ToccVariant::pam_df, std::move(sensitivities), eps, std::move(prototypes), std::move(thresholds),
                     std::move(references));
}

ToccModel fit_pam_tocc_df(const Eigen::MatrixXd& target, Eigen::Index k, double s, double eps) {
    const double levels[] = {s};
    return fit_pam_tocc_df(target, k, levels, eps);
}

Prediction predict_one(const ToccModel& model, const Eigen::VectorXd& z) {
    const Eigen::Index k = model.assign(z);
    const TpScore tp = model.score(z, k);
    Prediction out;
    out.score = tp.value;
    out.accepted = tp.value >= model.thresholds()[static_cast<std::size_t>(k)];
    if (model.variant() == ToccVariant::pam_df) out.cluster = k;
    return out;
}

std::vector<Prediction> predict(const ToccModel& model, const Eigen::MatrixXd& z) {
    if (z.cols() != model.dimension())
        throw InvalidArgument("predict: data has " + std::to_string(z.cols()) + " features, model expects " +
                              std::to_string(model.dimension()));
    std::vector<Prediction> out;
    out.reserve(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index i = 0; i < z.rows(); ++i) out.push_back(predict_one(model, z.row(i).transpose()));
    return out;
}

} // namespace tocc
