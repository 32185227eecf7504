#include "tocc/density.hpp"

#include "tocc/error.hpp"
#include "tocc/kmeans.hpp"
#include "tocc/numcore.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace tocc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(const Eigen::VectorXd& v) {
    const double top = v.maxCoeff();
    if (!std::isfinite(top)) return top;
    return top + std::log((v.array() - top).exp().sum());
}

} // namespace

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

MixtureDensity::MixtureDensity(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                               std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)), covariances_(std::move(covariances)) {
    const std::size_t g = weights_.size();
    if (g == 0) throw InvalidArgument("mixture: at least one component required");
    if (means_.size() != g || covariances_.size() != g)
        throw InvalidArgument("mixture: weights, means and covariances differ in length");
    const Eigen::Index p = means_.front().size();
    if (p < 1) throw InvalidArgument("mixture: zero-dimensional component");
    double total = 0.0;
    for (std::size_t k = 0; k < g; ++k) {
        if (!(weights_[k] >= 0.0)) throw InvalidArgument("mixture: negative weight");
        total += weights_[k];
        if (means_[k].size() != p || covariances_[k].rows() != p || covariances_[k].cols() != p)
            throw InvalidArgument("mixture: inconsistent component dimensions");
        if (!covariances_[k].isApprox(covariances_[k].transpose(), 1e-10))
            throw InvalidArgument("mixture: covariance is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(covariances_[k]);
        if (llt.info() != Eigen::Success)
            throw InvalidArgument("mixture: covariance " + std::to_string(k + 1) + " is not positive definite");
        Eigen::MatrixXd lower = llt.matrixL();
        const double log_det = 2.0 * lower.diagonal().array().log().sum();
        cholesky_.push_back(std::move(lower));
        log_normalizer_.push_back(-0.5 * (static_cast<double>(p) * kLog2Pi + log_det));
    }
    if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("mixture: weights do not sum to one");
}

MixtureDensity MixtureDensity::gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
    return MixtureDensity({1.0}, {std::move(mean)}, {std::move(covariance)});
}

MixtureDensity MixtureDensity::standard_normal(Eigen::Index p) {
    return gaussian(Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Identity(p, p));
}

Eigen::VectorXd MixtureDensity::component_log_terms(const Eigen::VectorXd& x) const {
    if (x.size() != dimension()) throw InvalidArgument("mixture: dimension mismatch");
    Eigen::VectorXd out(static_cast<Eigen::Index>(weights_.size()));
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const Eigen::VectorXd z =
            cholesky_[k].triangularView<Eigen::Lower>().solve(x - means_[k]);
        const double log_w = weights_[k] > 0.0 ? std::log(weights_[k]) : -std::numeric_limits<double>::infinity();
        out(static_cast<Eigen::Index>(k)) = log_w + log_normalizer_[k] - 0.5 * z.squaredNorm();
    }
    return out;
}

Eigen::MatrixXd MixtureDensity::row_log_terms(const Eigen::MatrixXd& x) const {
    if (x.cols() != dimension()) throw InvalidArgument("mixture: dimension mismatch");
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(weights_.size()));
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        Eigen::MatrixXd centred = (x.rowwise() - means_[k].transpose()).transpose();
        cholesky_[k].triangularView<Eigen::Lower>().solveInPlace(centred);
        const double log_w = weights_[k] > 0.0 ? std::log(weights_[k]) : -std::numeric_limits<double>::infinity();
        out.col(static_cast<Eigen::Index>(k)) =
            (log_w + log_normalizer_[k] - 0.5 * centred.colwise().squaredNorm().array()).transpose();
    }
    return out;
}

double MixtureDensity::log_pdf(const Eigen::VectorXd& x) const { return log_sum_exp(component_log_terms(x)); }

double MixtureDensity::pdf(const Eigen::VectorXd& x) const { return std::exp(log_pdf(x)); }

Eigen::MatrixXd MixtureDensity::sample(std::size_t count, RngStream& rng) const {
    const Eigen::Index p = dimension();
    Eigen::MatrixXd out(p, static_cast<Eigen::Index>(count));
    std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
    Eigen::VectorXd z(p);
    for (std::size_t s = 0; s < count; ++s) {
        const std::size_t k = weights_.size() == 1 ? 0 : pick(rng.engine());
        for (Eigen::Index u = 0; u < p; ++u) z(u) = rng.normal();
        out.col(static_cast<Eigen::Index>(s)) = means_[k] + cholesky_[k].triangularView<Eigen::Lower>() * z;
    }
    return out;
}

double MixtureDensity::marginal_interval(Eigen::Index u, double lower, double upper) const {
    double prob = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        const double mu = means_[k](u);
        const double sd = std::sqrt(covariances_[k](u, u));
        prob += weights_[k] * (standard_normal_cdf((upper - mu) / sd) - standard_normal_cdf((lower - mu) / sd));
    }
    return std::clamp(prob, 0.0, 1.0);
}

double gmm_pdf(const MixtureDensity& f, const Eigen::VectorXd& x) { return f.pdf(x); }

int gmm_parameter_count(int components, Eigen::Index p) {
    const auto pi = static_cast<int>(p);
    return (components - 1) + components * pi + components * pi * (pi + 1) / 2;
}

namespace {

struct EmState {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covariances;
};

/// Covariance checks shared by initialisation and the M-step. Returns false
/// when a component has collapsed onto a lower-dimensional set.
bool stabilise_covariance(Eigen::MatrixXd& cov, double variance_floor) {
    cov = 0.5 * (cov + cov.transpose());
    const auto p = static_cast<double>(cov.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    for (int attempt = 0; llt.info() != Eigen::Success && attempt < 8; ++attempt) {
        const double ridge = 1e-8 * std::max(cov.trace(), std::numeric_limits<double>::min()) / p *
                             std::pow(10.0, attempt);
        cov.diagonal().array() += ridge;
        llt.compute(cov);
    }
    if (llt.info() != Eigen::Success) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() > variance_floor;
}

std::optional<EmState> initial_state(const Eigen::MatrixXd& x, int g, RngStream& rng, double variance_floor) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    const KMeansResult km = kmeans(x, g, rng, KMeansOptions{1, 100});
    EmState state;
    const Eigen::MatrixXd global = sample_covariance(x);
    for (int k = 0; k < g; ++k) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < n; ++i)
            if (km.assignment[static_cast<std::size_t>(i)] == k) members.push_back(i);
        Eigen::MatrixXd cov;
        if (static_cast<Eigen::Index>(members.size()) > p) {
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(members.size()), p);
            for (std::size_t r = 0; r < members.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = x.row(members[r]);
            cov = sample_covariance(sub);
        } else {
            cov = global / static_cast<double>(g);
        }
        if (!stabilise_covariance(cov, variance_floor)) cov = global / static_cast<double>(g);
        if (!stabilise_covariance(cov, variance_floor)) return std::nullopt;
        state.weights.push_back(std::max<double>(static_cast<double>(members.size()), 1.0));
        state.means.push_back(km.centroids.row(k).transpose());
        state.covariances.push_back(std::move(cov));
    }
    double total = 0.0;
    for (double w : state.weights) total += w;
    for (double& w : state.weights) w /= total;
    return state;
}

/// E-step: fills log responsibilities and returns the log-likelihood.
double e_step(const Eigen::MatrixXd& x, const MixtureDensity& f, Eigen::MatrixXd& resp) {
    resp = f.row_log_terms(x);
    double loglik = 0.0;
    for (Eigen::Index i = 0; i < resp.rows(); ++i) {
        const double top = resp.row(i).maxCoeff();
        if (!std::isfinite(top)) return top;
        const double lse = top + std::log((resp.row(i).array() - top).exp().sum());
        loglik += lse;
        resp.row(i) = (resp.row(i).array() - lse).exp();
    }
    return loglik;
}

std::optional<EmState> m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp, double variance_floor) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    EmState state;
    for (Eigen::Index k = 0; k < resp.cols(); ++k) {
        const double nk = resp.col(k).sum();
        if (nk < static_cast<double>(p + 1)) return std::nullopt;
        const Eigen::VectorXd mean = (x.transpose() * resp.col(k)) / nk;
        const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
        Eigen::MatrixXd cov = centered.transpose() * resp.col(k).asDiagonal() * centered / nk;
        if (!stabilise_covariance(cov, variance_floor)) return std::nullopt;
        state.weights.push_back(nk / static_cast<double>(n));
        state.means.push_back(mean);
        state.covariances.push_back(std::move(cov));
    }
    double total = 0.0;
    for (double w : state.weights) total += w;
    for (double& w : state.weights) w /= total;
    return state;
}

struct EmRun {
    std::optional<MixtureDensity> density;
    double loglik = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    std::vector<double> trace;
};

EmRun run_em(const Eigen::MatrixXd& x, int g, const GmmConfig& config, RngStream& rng, double variance_floor) {
    EmRun run;
    auto state = initial_state(x, g, rng, variance_floor);
    if (!state) return run;
    MixtureDensity current(state->weights, state->means, state->covariances);
    Eigen::MatrixXd resp;
    double loglik = e_step(x, current, resp);
    run.trace.push_back(loglik);
    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        auto next = m_step(x, resp, variance_floor);
        if (!next) return EmRun{};
        MixtureDensity candidate(next->weights, next->means, next->covariances);
        Eigen::MatrixXd next_resp;
        const double next_loglik = e_step(x, candidate, next_resp);
        if (!std::isfinite(next_loglik)) return EmRun{};
        const double gain = next_loglik - loglik;
        current = std::move(candidate);
        resp = std::move(next_resp);
        loglik = next_loglik;
        run.trace.push_back(loglik);
        if (gain < config.tol) {
            ++iter;
            break;
        }
    }
    run.density = std::move(current);
    run.loglik = loglik;
    run.iterations = iter;
    return run;
}

void validate_config(const GmmConfig& config) {
    if (config.min_components < 1 || config.max_components < config.min_components)
        throw InvalidArgument("fit_gmm: invalid component range");
    if (config.restarts < 1) throw InvalidArgument("fit_gmm: restarts must be at least 1");
    if (config.max_iter < 1 || !(config.tol > 0.0)) throw InvalidArgument("fit_gmm: invalid convergence settings");
}

double variance_floor_for(const Eigen::MatrixXd& x) {
    const Eigen::MatrixXd global = sample_covariance(x);
    return 1e-6 * global.trace() / static_cast<double>(x.cols());
}

} // namespace

GmmFit fit_gmm_fixed(const Eigen::MatrixXd& x, int components, const GmmConfig& config, RngStream& rng) {
    validate_config(config);
    if (components < 1 || components > x.rows()) throw InvalidArgument("fit_gmm: invalid component count");
    if (x.rows() < 2) throw InvalidArgument("fit_gmm: need at least two rows");
    const double floor = variance_floor_for(x);
    if (!(floor > 0.0)) throw DegenerateData("fit_gmm: data has zero variance");
    EmRun best;
    for (int r = 0; r < config.restarts; ++r) {
        EmRun run = run_em(x, components, config, rng, floor);
        if (run.density && run.loglik > best.loglik) best = std::move(run);
    }
    if (!best.density)
        throw DegenerateData("fit_gmm: every EM restart degenerated for G = " + std::to_string(components));
    const double n = static_cast<double>(x.rows());
    const double bic = 2.0 * best.loglik - gmm_parameter_count(components, x.cols()) * std::log(n);
    return GmmFit{std::move(*best.density), components, best.loglik, bic, best.iterations, std::move(best.trace)};
}

GmmFit fit_gmm(const Eigen::MatrixXd& x, const GmmConfig& config, RngStream& rng) {
    validate_config(config);
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    std::optional<GmmFit> best;
    for (int g = config.min_components; g <= config.max_components; ++g) {
        if (n <= static_cast<Eigen::Index>(g) * (p + 1)) continue;
        RngStream stream = rng.derive(static_cast<std::uint64_t>(g));
        try {
            GmmFit fit = fit_gmm_fixed(x, g, config, stream);
            if (!best || fit.bic > best->bic) best = std::move(fit);
        } catch (const DegenerateData&) {
            // this G is infeasible; others may still succeed
        }
    }
    if (!best) throw DegenerateData("fit_gmm: every candidate number of components is degenerate");
    return std::move(*best);
}

void OrthantIntegrator::validate() const {
    if (method == IntegrationMethod::monte_carlo && mc_samples < 10000)
        throw InvalidArgument("orthant integrator: mc_samples must be at least 10000");
}

OrthantEvaluator::OrthantEvaluator(MixtureDensity density, OrthantIntegrator integrator)
    : density_(std::move(density)), integrator_(integrator) {
    integrator_.validate();
    if (integrator_.method == IntegrationMethod::monte_carlo && density_.dimension() >= 2) {
        RngStream rng(integrator_.seed, integrator_.stream_id);
        samples_ = density_.sample(integrator_.mc_samples, rng);
    }
}

namespace {

void check_box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, Eigen::Index p) {
    if (lower.size() != p || upper.size() != p) throw InvalidArgument("orthant box: dimension mismatch");
    for (Eigen::Index u = 0; u < p; ++u)
        if (std::isnan(lower(u)) || std::isnan(upper(u)) || lower(u) > upper(u))
            throw InvalidArgument("orthant box: lower bound exceeds upper bound");
}

int bounded_coordinates(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
    int count = 0;
    for (Eigen::Index u = 0; u < lower.size(); ++u)
        if (std::isfinite(lower(u)) || std::isfinite(upper(u))) ++count;
    return count;
}

// Counts sample columns inside [lo, hi] without per-coordinate branches.
std::size_t count_inside(const Eigen::MatrixXd& samples, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const Eigen::Index p = samples.rows();
    const double* x = samples.data();
    const double* l = lo.data();
    const double* h = hi.data();
    std::size_t hits = 0;
    for (Eigen::Index s = 0; s < samples.cols(); ++s, x += p) {
        unsigned ok = 1;
        for (Eigen::Index u = 0; u < p; ++u) ok &= static_cast<unsigned>(x[u] >= l[u]) & static_cast<unsigned>(x[u] <= h[u]);
        hits += ok;
    }
    return hits;
}

} // namespace

bool OrthantEvaluator::closed_form(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const {
    return bounded_coordinates(lower, upper) <= 1;
}

double OrthantEvaluator::closed_form_probability(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const {
    for (Eigen::Index u = 0; u < lower.size(); ++u)
        if (std::isfinite(lower(u)) || std::isfinite(upper(u)))
            return density_.marginal_interval(u, lower(u), upper(u));
    return 1.0;
}

double OrthantEvaluator::probability(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const {
    check_box(lower, upper, density_.dimension());
    if (closed_form(lower, upper)) return closed_form_probability(lower, upper);
    if (integrator_.method == IntegrationMethod::closed_form_1d)
        throw InvalidArgument("orthant box bounds several coordinates; closed_form_1d cannot integrate it");
    return static_cast<double>(count_inside(samples_, lower, upper)) / static_cast<double>(samples_.cols());
}

BoxRatio OrthantEvaluator::probabilities(const Eigen::VectorXd& num_lower, const Eigen::VectorXd& num_upper,
                                         const Eigen::VectorXd& den_lower,
                                         const Eigen::VectorXd& den_upper) const {
    check_box(num_lower, num_upper, density_.dimension());
    check_box(den_lower, den_upper, density_.dimension());
    const bool num_exact = closed_form(num_lower, num_upper);
    const bool den_exact = closed_form(den_lower, den_upper);
    if (num_exact && den_exact)
        return {closed_form_probability(num_lower, num_upper), closed_form_probability(den_lower, den_upper)};
    if (integrator_.method == IntegrationMethod::closed_form_1d)
        throw InvalidArgument("orthant box bounds several coordinates; closed_form_1d cannot integrate it");
    const std::size_t num_hits = num_exact ? 0 : count_inside(samples_, num_lower, num_upper);
    const std::size_t den_hits = den_exact ? 0 : count_inside(samples_, den_lower, den_upper);
    const auto total = static_cast<double>(samples_.cols());
    return {num_exact ? closed_form_probability(num_lower, num_upper) : static_cast<double>(num_hits) / total,
            den_exact ? closed_form_probability(den_lower, den_upper) : static_cast<double>(den_hits) / total};
}

double OrthantEvaluator::standard_error(double prob) const {
    if (samples_.cols() == 0) return 0.0;
    return std::sqrt(prob * (1.0 - prob) / static_cast<double>(samples_.cols()));
}

double orthant_probability(const MixtureDensity& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           const OrthantIntegrator& integrator) {
    return OrthantEvaluator(f, integrator).probability(lower, upper);
}

} // namespace tocc
