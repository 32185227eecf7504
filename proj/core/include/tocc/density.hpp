#pragma once

#include "tocc/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace tocc {

/// Finite Gaussian mixture with full covariances. Construction validates the
/// parameters (weights sum to one, covariances SPD) and caches Cholesky
/// factors; instances are immutable and safe to share between threads.
class MixtureDensity {
public:
    MixtureDensity(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                   std::vector<Eigen::MatrixXd> covariances);

    /// Single Gaussian component.
    static MixtureDensity gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance);
    static MixtureDensity standard_normal(Eigen::Index p);

    [[nodiscard]] Eigen::Index dimension() const { return means_.front().size(); }
    [[nodiscard]] std::size_t components() const { return weights_.size(); }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    [[nodiscard]] const std::vector<Eigen::VectorXd>& means() const { return means_; }
    [[nodiscard]] const std::vector<Eigen::MatrixXd>& covariances() const { return covariances_; }

    [[nodiscard]] double pdf(const Eigen::VectorXd& x) const;
    [[nodiscard]] double log_pdf(const Eigen::VectorXd& x) const;
    /// log(weight_g) + log N(x; mean_g, cov_g) for every component.
    [[nodiscard]] Eigen::VectorXd component_log_terms(const Eigen::VectorXd& x) const;
    /// Same for every row of `x`; returns n x G.
    [[nodiscard]] Eigen::MatrixXd row_log_terms(const Eigen::MatrixXd& x) const;

    /// Draws `count` points; returns a p x count matrix.
    [[nodiscard]] Eigen::MatrixXd sample(std::size_t count, RngStream& rng) const;

    /// Marginal probability that coordinate `u` lies in [lower, upper].
    [[nodiscard]] double marginal_interval(Eigen::Index u, double lower, double upper) const;

private:
    std::vector<double> weights_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::MatrixXd> covariances_;
    std::vector<Eigen::MatrixXd> cholesky_;  // lower factors
    std::vector<double> log_normalizer_;     // -0.5 * (p log 2pi + log det)
};

double gmm_pdf(const MixtureDensity& f, const Eigen::VectorXd& x);

double standard_normal_cdf(double z);

struct GmmConfig {
    int min_components = 1;
    int max_components = 9;
    int restarts = 5;
    double tol = 1e-6;
    int max_iter = 500;
};

struct GmmFit {
    MixtureDensity density;
    int components;
    double log_likelihood;
    double bic;                      // 2 loglik - params ln n; larger is better
    int iterations;
    std::vector<double> loglik_trace;
};

/// EM for a fixed number of components, best of `config.restarts`
/// k-means-seeded runs. Throws DegenerateData if every restart collapses.
GmmFit fit_gmm_fixed(const Eigen::MatrixXd& x, int components, const GmmConfig& config, RngStream& rng);

/// BIC-maximising mixture over [min_components, max_components]. Candidate
/// sizes with n <= G (p + 1) are skipped.
GmmFit fit_gmm(const Eigen::MatrixXd& x, const GmmConfig& config, RngStream& rng);

int gmm_parameter_count(int components, Eigen::Index p);

enum class IntegrationMethod { closed_form_1d, monte_carlo };

/// How box probabilities under a mixture are evaluated. Boxes that bound at
/// most one coordinate are always integrated exactly from the marginal
/// normal CDFs; `monte_carlo` handles the rest with a fixed sample set drawn
/// from (seed, stream_id), so repeated evaluations are deterministic.
struct OrthantIntegrator {
    IntegrationMethod method = IntegrationMethod::monte_carlo;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    void validate() const;
};

struct BoxRatio {
    double numerator;
    double denominator;
};

/// Mixture bound to an integrator. Monte Carlo samples are drawn once at
/// construction and shared by every query (common random numbers), so a
/// constructed evaluator is immutable and thread-safe.
class OrthantEvaluator {
public:
    OrthantEvaluator(MixtureDensity density, OrthantIntegrator integrator);

    [[nodiscard]] const MixtureDensity& density() const { return density_; }
    [[nodiscard]] const OrthantIntegrator& integrator() const { return integrator_; }

    /// P(lower <= X <= upper); infinite bounds allowed.
    [[nodiscard]] double probability(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const;

    /// Probabilities of two boxes from the same sample set.
    [[nodiscard]] BoxRatio probabilities(const Eigen::VectorXd& num_lower, const Eigen::VectorXd& num_upper,
                                         const Eigen::VectorXd& den_lower,
                                         const Eigen::VectorXd& den_upper) const;

    /// Monte Carlo standard error of a probability estimate `prob`
    /// (0 when evaluated in closed form).
    [[nodiscard]] double standard_error(double prob) const;

private:
    [[nodiscard]] bool closed_form(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const;
    [[nodiscard]] double closed_form_probability(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) const;

    MixtureDensity density_;
    OrthantIntegrator integrator_;
    Eigen::MatrixXd samples_; // p x mc_samples; empty unless Monte Carlo and p >= 2
};

double orthant_probability(const MixtureDensity& f, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                           const OrthantIntegrator& integrator);

} // namespace tocc
