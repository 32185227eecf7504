#include "glass_repro.hpp"

#include <tocc/error.hpp>
#include <tocc/featsel.hpp>
#include <tocc/numcore.hpp>

#include <chrono>

namespace tocc::cli {

std::string_view to_string(Reduction r) {
    switch (r) {
    case Reduction::pca: return "pca";
    case Reduction::rp: return "rp";
    case Reduction::kvip: return "kvip";
    }
    return "unknown";
}

namespace {

ToccDbConfig db_config(const GlassReproConfig& c) {
    ToccDbConfig db;
    db.gmm_seed = c.seed;
    db.integrator.mc_samples = c.mc_samples;
    db.integrator.seed = c.seed;
    db.integrator.stream_id = 0;
    return db;
}

ToccModel fit_variant(ToccVariant v, const Eigen::MatrixXd& target, const GlassReproConfig& c) {
    switch (v) {
    case ToccVariant::df: return fit_tocc_df(target, c.s);
    case ToccVariant::db: return fit_tocc_db(target, c.s, db_config(c));
    case ToccVariant::pam_df: return fit_pam_tocc_df(target, c.k, c.s);
    }
    throw InvalidArgument("unknown variant");
}

void finish_cell(GlassCell& cell, const std::vector<bool>& accepted, const std::vector<double>& scores,
                 const std::vector<RowLabel>& truth) {
    const ConfusionMetrics cm = confusion_metrics(accepted, truth);
    cell.sensitivity = cm.sensitivity;
    cell.specificity = cm.specificity;
    cell.roc = roc_curve(scores, truth);
    cell.auc = cell.roc.auc;
}

} // namespace

GlassReproResult run_glass_repro(const GlassReproConfig& config) {
    if (!(config.s > 0.0 && config.s < 1.0)) throw InvalidArgument("--s must lie in (0, 1)");
    if (!(config.kappa > 0.0 && config.kappa <= 1.0)) throw InvalidArgument("--kappa must lie in (0, 1]");

    DataMatrix data = load_uci_glass(config.data, config.subset);
    if (config.normalize_by) data = renormalize(data, *config.normalize_by);
    const std::vector<RowLabel>& truth = *data.row_labels();
    const Eigen::MatrixXd target = data.rows_with(RowLabel::target).values();
    const Eigen::MatrixXd& all = data.values();

    GlassReproResult result;
    result.features = data.feature_names();
    result.n_target = static_cast<std::size_t>(target.rows());
    result.n_nontarget = static_cast<std::size_t>(data.rows() - target.rows());

    // Feature spaces shared by the three variants.
    const PcaReduction pca = pca_reduce(target, config.d, ComponentEnd::last);
    result.pca_variances = pca.retained_variances;
    const Eigen::MatrixXd pca_all = pca.transform.apply(all);

    const RngStream rp_stream(config.seed, 1);
    const auto projections = rp_select(target, config.d, config.b1, config.b2, rp_stream.derive(0), config.threads);
    result.vip = compute_vip(projections, column_standard_deviations(target));
    const Eigen::MatrixXd corr = correlation_matrix(target, result.features);
    result.selection = kappa_vip_select(result.vip, corr, config.kappa, static_cast<std::size_t>(config.d));
    const DataMatrix kvip_all = data.select_features(result.selection.selected);
    const Eigen::MatrixXd kvip_target = kvip_all.rows_with(RowLabel::target).values();

    for (ToccVariant v : {ToccVariant::df, ToccVariant::db, ToccVariant::pam_df}) {
        for (Reduction r : {Reduction::pca, Reduction::rp, Reduction::kvip}) {
            GlassCell cell{v, r, {}, {}, {}, 0.0, {}, {}, {}};
            const auto start = std::chrono::steady_clock::now();
            try {
                if (r == Reduction::rp) {
                    EnsembleConfig ec;
                    ec.variant = v;
                    ec.s = config.s;
                    ec.pam_k = config.k;
                    ec.db = db_config(config);
                    ec.threads = config.threads;
                    const ProjectionEnsemble ens = fit_rp_ensemble(target, config.d, config.b1, config.b2, ec, rp_stream);
                    std::vector<bool> accepted;
                    std::vector<double> scores;
                    for (const EnsembleVote& vote : predict_ensemble(ens, all, config.threads)) {
                        accepted.push_back(vote.accepted);
                        scores.push_back(vote.score);
                    }
                    finish_cell(cell, accepted, scores, truth);
                } else {
                    const bool is_pca = r == Reduction::pca;
                    const ToccModel model = fit_variant(v, is_pca ? pca.reduced : kvip_target, config);
                    std::vector<bool> accepted;
                    std::vector<double> scores;
                    const auto preds = predict(model, is_pca ? pca_all : kvip_all.values());
                    for (std::size_t i = 0; i < preds.size(); ++i) {
                        accepted.push_back(preds[i].accepted);
                        scores.push_back(preds[i].score);
                    }
                    if (v == ToccVariant::pam_df)
                        for (const auto& ref : model.reference_sets()) cell.cluster_sizes.push_back(static_cast<std::size_t>(ref.rows()));
                    finish_cell(cell, accepted, scores, truth);
                }
            } catch (const Error& e) {
                cell.error = e.what();
            }
            cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

const GlassCell& find_cell(const GlassReproResult& result, ToccVariant v, Reduction r) {
    for (const auto& c : result.cells)
        if (c.variant == v && c.reduction == r) return c;
    throw InvalidArgument("no such glass cell");
}

} // namespace tocc::cli
