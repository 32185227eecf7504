#pragma once

#include "tocc/density.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace tocc {

/// Coordinates with |c_u - m_u| <= this are treated as uninformative and dropped.
inline constexpr double kDefaultDropEps = 1e-12;

/// Counts behind a transvariability: units that transvariate strictly, units
/// tied with the constant on every compared coordinate, and units compared.
struct SignCounts {
    std::size_t strict = 0;
    std::size_t ties = 0;
    std::size_t compared = 0;

    [[nodiscard]] double weighted() const { return static_cast<double>(strict) + 0.5 * static_cast<double>(ties); }
};

/// A transvariation probability together with the quantities it came from.
/// For the density-based forms numerator/denominator are probabilities.
struct TpScore {
    double value = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    std::vector<Eigen::Index> dropped_coords;
    bool degenerate = false; // empty (or negligible) denominator region
};

/// Sign-count transvariation probability of the constant `c` against the
/// sample `xs` summarised by its median `m`: 2 (s + s'/2) / n.
TpScore univariate_tp(std::span<const double> xs, double c, double m);

/// Density-based univariate form: 2 F(c) when m >= c, else 2 (1 - F(c)).
TpScore univariate_tp_density(const std::function<double(double)>& cdf, double c, double m);

/// Units of `x` transvariating with `c` jointly on the coordinates in `keep`:
/// (x_iu - c_u)(m_u - c_u) < 0 for all u (strict), = 0 for all u (tie).
SignCounts count_transvariations(const Eigen::MatrixXd& x, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                 std::span<const Eigen::Index> keep);

/// Same counts on the shifted sample Y = X - (m - c): the maximum attainable
/// transvariability in the direction of `c`.
SignCounts count_max_transvariations(const Eigen::MatrixXd& x, const Eigen::VectorXd& c,
                                     const Eigen::VectorXd& m, std::span<const Eigen::Index> keep);

/// Density-free multivariate transvariation probability of `c` with respect
/// to the sample `x` and its centre `m`. Coordinates where c and m agree to
/// within `eps` are dropped; if all are dropped the score is 1, and an empty
/// denominator region gives 0.
TpScore multivariate_tp(const Eigen::MatrixXd& x, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                        double eps = kDefaultDropEps);

/// Density-based multivariate form: mass of the orthant beyond `c` over the
/// mass of the orthant beyond `m`, both in the direction of c from m.
TpScore multivariate_tp_density(const OrthantEvaluator& f, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                double eps = kDefaultDropEps);

TpScore multivariate_tp_density(const MixtureDensity& f, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                const OrthantIntegrator& integrator, double eps = kDefaultDropEps);

/// Product of marginal scores, valid when the variables are independent.
TpScore independent_product_tp(std::span<const TpScore> per_coord_scores);

} // namespace tocc
