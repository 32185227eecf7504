#pragma once

#include "tocc/classifier.hpp"
#include "tocc/rng.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

namespace tocc {

enum class ComponentEnd { last, first };

/// Affine map x -> basis^T (x - center) fitted on training data.
struct LinearTransform {
    Eigen::VectorXd center;
    Eigen::MatrixXd basis; // p x d, orthonormal columns

    [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

struct PcaReduction {
    LinearTransform transform;
    Eigen::MatrixXd reduced;
    Eigen::VectorXd retained_variances;
};

/// Projects centred data on the d lowest-variance (`last`) or
/// highest-variance (`first`) principal directions.
PcaReduction pca_reduce(const Eigen::MatrixXd& x, Eigen::Index d, ComponentEnd which = ComponentEnd::last);

/// Gaussian p x d matrix with orthonormalised columns.
Eigen::MatrixXd random_projection(Eigen::Index p, Eigen::Index d, RngStream& rng);

/// Sum over the projected coordinates of their median absolute deviation.
double projected_mad(const Eigen::MatrixXd& x, const Eigen::MatrixXd& projection);

/// B1 projections, each the most compact (smallest summed MAD of the
/// projected target data) of B2 independent random candidates. Slot i draws
/// its candidates from rng.derive(i), so the result is reproducible and
/// independent of `threads`.
std::vector<Eigen::MatrixXd> rp_select(const Eigen::MatrixXd& target, Eigen::Index d, int b1, int b2,
                                       const RngStream& rng, unsigned threads = 1);

struct EnsembleConfig {
    ToccVariant variant = ToccVariant::df;
    double s = 0.9;
    Eigen::Index pam_k = 4;
    ToccDbConfig db{};
    unsigned threads = 1;
};

/// Majority-vote ensemble of TOCCs fitted on selected random projections.
class ProjectionEnsemble {
public:
    ProjectionEnsemble(Eigen::Index d, int b1, int b2, std::vector<Eigen::MatrixXd> projections,
                       std::vector<ToccModel> sub_models);

    [[nodiscard]] Eigen::Index d() const { return d_; }
    [[nodiscard]] int b1() const { return b1_; }
    [[nodiscard]] int b2() const { return b2_; }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& projections() const { return projections_; }
    [[nodiscard]] const std::vector<ToccModel>& sub_models() const { return sub_models_; }

private:
    Eigen::Index d_;
    int b1_;
    int b2_;
    std::vector<Eigen::MatrixXd> projections_;
    std::vector<ToccModel> sub_models_;
};

struct EnsembleVote {
    bool accepted = false;
    int votes = 0;        // sub-models accepting
    double score = 0.0;   // votes / B1, used for ROC ranking
};

ProjectionEnsemble fit_rp_ensemble(const Eigen::MatrixXd& target, Eigen::Index d, int b1, int b2,
                                   const EnsembleConfig& config, const RngStream& rng);

/// A row is accepted iff a strict majority of the sub-models accept it.
std::vector<EnsembleVote> predict_ensemble(const ProjectionEnsemble& ensemble, const Eigen::MatrixXd& z,
                                           unsigned threads = 1);

struct VipRanking {
    Eigen::VectorXd vip;                 // per feature
    std::vector<Eigen::Index> ranking;   // descending vip, ties by ascending index
};

/// Importance coefficient of every feature in one projection:
/// CI_u = sum_q |a_uq| s_u / || (a_zq s_z)_z ||.
Eigen::VectorXd importance_coefficients(const Eigen::MatrixXd& projection, const Eigen::VectorXd& feature_sds);

/// Median importance coefficient across projections.
VipRanking compute_vip(std::span<const Eigen::MatrixXd> projections, const Eigen::VectorXd& feature_sds);

struct KappaSelection {
    std::vector<Eigen::Index> selected; // in ranking order
    bool complete = true;               // false when fewer than n_keep passed the filter
};

/// Greedy scan down the VIP ranking: keep a feature iff its mean absolute
/// correlation with the features already kept is at most kappa.
KappaSelection kappa_vip_select(const VipRanking& ranking, const Eigen::MatrixXd& corr, double kappa,
                                std::size_t n_keep);

} // namespace tocc
