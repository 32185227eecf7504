#include "tocc/featsel.hpp"

#include "tocc/error.hpp"
#include "tocc/numcore.hpp"
#include "tocc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tocc {

Eigen::MatrixXd LinearTransform::apply(const Eigen::MatrixXd& x) const {
    if (x.cols() != center.size()) throw InvalidArgument("transform: data dimension does not match");
    return (x.rowwise() - center.transpose()) * basis;
}

PcaReduction pca_reduce(const Eigen::MatrixXd& x, Eigen::Index d, ComponentEnd which) {
    const Eigen::Index p = x.cols();
    if (d < 1 || d > p) throw InvalidArgument("pca_reduce: d must lie in [1, p]");
    const Pca decomposition = pca(x);
    if (d > decomposition.rank())
        throw InvalidArgument("pca_reduce: d = " + std::to_string(d) + " exceeds the covariance rank " +
                              std::to_string(decomposition.rank()));
    PcaReduction out;
    out.transform.center = decomposition.center;
    out.transform.basis.resize(p, d);
    out.retained_variances.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const Eigen::Index src = which == ComponentEnd::first ? k : p - d + k;
        out.transform.basis.col(k) = decomposition.eigenvectors.col(src);
        out.retained_variances(k) = decomposition.eigenvalues(src);
    }
    out.reduced = out.transform.apply(x);
    return out;
}

Eigen::MatrixXd random_projection(Eigen::Index p, Eigen::Index d, RngStream& rng) {
    if (d < 1 || d > p) throw InvalidArgument("random_projection: d must lie in [1, p]");
    Eigen::MatrixXd g(p, d);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < p; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(p, d);
    // Fix column signs so that Q's diagonal relation to the draw is positive.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

double projected_mad(const Eigen::MatrixXd& x, const Eigen::MatrixXd& projection) {
    const Eigen::MatrixXd y = x * projection;
    double total = 0.0;
    std::vector<double> column(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) column[static_cast<std::size_t>(i)] = y(i, j);
        total += median_absolute_deviation(column);
    }
    return total;
}

std::vector<Eigen::MatrixXd> rp_select(const Eigen::MatrixXd& target, Eigen::Index d, int b1, int b2,
                                       const RngStream& rng, unsigned threads) {
    const Eigen::Index p = target.cols();
    if (b1 < 1 || b1 % 2 == 0) throw InvalidArgument("rp_select: B1 must be a positive odd number");
    if (b2 < 1) throw InvalidArgument("rp_select: B2 must be at least 1");
    if (d < 1 || d >= p) throw InvalidArgument("rp_select: d must lie in [1, p)");
    std::vector<Eigen::MatrixXd> chosen(static_cast<std::size_t>(b1));
    parallel_for(static_cast<std::size_t>(b1), threads, [&](std::size_t slot) {
        RngStream stream = rng.derive(slot);
        double best = std::numeric_limits<double>::infinity();
        for (int c = 0; c < b2; ++c) {
            Eigen::MatrixXd candidate = random_projection(p, d, stream);
            const double mad = projected_mad(target, candidate);
            if (mad < best) {
                best = mad;
                chosen[slot] = std::move(candidate);
            }
        }
    });
    return chosen;
}

ProjectionEnsemble::ProjectionEnsemble(Eigen::Index d, int b1, int b2, std::vector<Eigen::MatrixXd> projections,
                                       std::vector<ToccModel> sub_models)
    : d_(d), b1_(b1), b2_(b2), projections_(std::move(projections)), sub_models_(std::move(sub_models)) {
    if (b1_ < 1 || b1_ % 2 == 0) throw InvalidArgument("ensemble: B1 must be a positive odd number");
    if (projections_.size() != static_cast<std::size_t>(b1_) || sub_models_.size() != projections_.size())
        throw InvalidArgument("ensemble: need exactly B1 projections and sub-models");
    for (std::size_t i = 0; i < projections_.size(); ++i)
        if (projections_[i].cols() != d_ || sub_models_[i].dimension() != d_)
            throw InvalidArgument("ensemble: projection width does not match d");
}

ProjectionEnsemble fit_rp_ensemble(const Eigen::MatrixXd& target, Eigen::Index d, int b1, int b2,
                                   const EnsembleConfig& config, const RngStream& rng) {
    std::vector<Eigen::MatrixXd> projections = rp_select(target, d, b1, b2, rng.derive(0), config.threads);
    std::vector<std::optional<ToccModel>> fitted(projections.size());
    parallel_for(projections.size(), config.threads, [&](std::size_t i) {
        const Eigen::MatrixXd projected = target * projections[i];
        switch (config.variant) {
        case ToccVariant::df:
            fitted[i] = fit_tocc_df(projected, config.s);
            break;
        case ToccVariant::pam_df:
            fitted[i] = fit_pam_tocc_df(projected, config.pam_k, config.s);
            break;
        case ToccVariant::db: {
            ToccDbConfig db = config.db;
            db.gmm_seed = rng.derive(1).derive(i).engine()();
            db.integrator.stream_id = static_cast<std::uint64_t>(i);
            fitted[i] = fit_tocc_db(projected, config.s, db);
            break;
        }
        }
    });
    std::vector<ToccModel> models;
    models.reserve(fitted.size());
    for (auto& m : fitted) models.push_back(std::move(*m));
    return ProjectionEnsemble(d, b1, b2, std::move(projections), std::move(models));
}

std::vector<EnsembleVote> predict_ensemble(const ProjectionEnsemble& ensemble, const Eigen::MatrixXd& z,
                                           unsigned threads) {
    const auto& projections = ensemble.projections();
    if (z.cols() != projections.front().rows())
        throw InvalidArgument("predict_ensemble: data dimension does not match the projections");
    std::vector<std::vector<Prediction>> per_model(projections.size());
    parallel_for(projections.size(), threads, [&](std::size_t i) {
        per_model[i] = predict(ensemble.sub_models()[i], z * projections[i]);
    });
    std::vector<EnsembleVote> out(static_cast<std::size_t>(z.rows()));
    const int b1 = ensemble.b1();
    for (std::size_t r = 0; r < out.size(); ++r) {
        int votes = 0;
        for (const auto& preds : per_model) votes += preds[r].accepted ? 1 : 0;
        out[r].votes = votes;
        out[r].accepted = 2 * votes > b1;
        out[r].score = static_cast<double>(votes) / static_cast<double>(b1);
    }
    return out;
}

Eigen::VectorXd importance_coefficients(const Eigen::MatrixXd& projection, const Eigen::VectorXd& feature_sds) {
    const Eigen::Index p = projection.rows();
    if (feature_sds.size() != p) throw InvalidArgument("compute_vip: feature sd count does not match projection rows");
    for (Eigen::Index u = 0; u < p; ++u)
        if (!(feature_sds(u) > 0.0)) throw InvalidArgument("compute_vip: feature standard deviations must be positive");
    Eigen::VectorXd ci = Eigen::VectorXd::Zero(p);
    for (Eigen::Index q = 0; q < projection.cols(); ++q) {
        const Eigen::VectorXd scaled = projection.col(q).cwiseProduct(feature_sds);
        const double norm = scaled.norm();
        if (!(norm > 0.0)) throw InvalidArgument("compute_vip: projection column has zero norm");
        ci += scaled.cwiseAbs() / norm;
    }
    return ci;
}

VipRanking compute_vip(std::span<const Eigen::MatrixXd> projections, const Eigen::VectorXd& feature_sds) {
    if (projections.empty()) throw InvalidArgument("compute_vip: no projections");
    const Eigen::Index p = feature_sds.size();
    std::vector<std::vector<double>> per_feature(static_cast<std::size_t>(p));
    for (const auto& a : projections) {
        const Eigen::VectorXd ci = importance_coefficients(a, feature_sds);
        for (Eigen::Index u = 0; u < p; ++u) per_feature[static_cast<std::size_t>(u)].push_back(ci(u));
    }
    VipRanking out;
    out.vip.resize(p);
    for (Eigen::Index u = 0; u < p; ++u) out.vip(u) = median(per_feature[static_cast<std::size_t>(u)]);
    out.ranking.resize(static_cast<std::size_t>(p));
    std::iota(out.ranking.begin(), out.ranking.end(), Eigen::Index{0});
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return out.vip(a) > out.vip(b); });
    return out;
}

KappaSelection kappa_vip_select(const VipRanking& ranking, const Eigen::MatrixXd& corr, double kappa,
                                std::size_t n_keep) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw InvalidArgument("kappa_vip_select: kappa must lie in (0, 1]");
    const auto p = static_cast<Eigen::Index>(ranking.ranking.size());
    if (corr.rows() != p || corr.cols() != p) throw InvalidArgument("kappa_vip_select: correlation matrix shape");
    if (n_keep < 1) throw InvalidArgument("kappa_vip_select: n_keep must be at least 1");
    KappaSelection out;
    for (Eigen::Index u : ranking.ranking) {
        if (out.selected.size() == n_keep) break;
        if (out.selected.empty()) {
            out.selected.push_back(u);
            continue;
        }
        double mean_abs = 0.0;
        for (Eigen::Index v : out.selected) mean_abs += std::abs(corr(u, v));
        mean_abs /= static_cast<double>(out.selected.size());
        if (mean_abs <= kappa) out.selected.push_back(u);
    }
    out.complete = out.selected.size() == n_keep;
    return out;
}

} // namespace tocc
