#include "tocc/transvariation.hpp"

#include "tocc/error.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace tocc {

namespace {

constexpr double kNegligibleMass = 1e-12;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

double clamp_score(double value) {
    assert(value <= 1.0 + 1e-9 && "transvariation probability exceeded one before clamping");
    return std::clamp(value, 0.0, 1.0);
}

/// Joint sign test of (a_u - b_u) against direction_u over the kept coordinates.
template <typename RowDiff>
SignCounts joint_counts(Eigen::Index n, const Eigen::VectorXd& direction, std::span<const Eigen::Index> keep,
                        RowDiff diff) {
    SignCounts counts;
    counts.compared = static_cast<std::size_t>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        bool all_opposite = true;
        bool all_zero = true;
        for (Eigen::Index u : keep) {
            const int prod = sign(diff(i, u)) * sign(direction(u));
            if (prod >= 0) all_opposite = false;
            if (prod != 0) all_zero = false;
            if (!all_opposite && !all_zero) break;
        }
        if (all_opposite) ++counts.strict;
        else if (all_zero) ++counts.ties;
    }
    return counts;
}

std::vector<Eigen::Index> kept_coordinates(const Eigen::VectorXd& c, const Eigen::VectorXd& m, double eps,
                                           std::vector<Eigen::Index>& dropped) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index u = 0; u < c.size(); ++u) {
        if (std::abs(c(u) - m(u)) <= eps) dropped.push_back(u);
        else keep.push_back(u);
    }
    return keep;
}

} // namespace

TpScore univariate_tp(std::span<const double> xs, double c, double m) {
    if (xs.empty()) throw InvalidArgument("univariate_tp: empty sample");
    std::size_t strict = 0;
    std::size_t ties = 0;
    for (double x : xs) {
        const int prod = sign(x - c) * sign(m - c);
        if (prod < 0) ++strict;
        else if (prod == 0) ++ties;
    }
    const double numerator = static_cast<double>(strict) + 0.5 * static_cast<double>(ties);
    const double denominator = 0.5 * static_cast<double>(xs.size());
    TpScore score;
    score.numerator = numerator;
    score.denominator = denominator;
    score.value = clamp_score(numerator / denominator);
    return score;
}

TpScore univariate_tp_density(const std::function<double(double)>& cdf, double c, double m) {
    const double f = cdf(c);
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("univariate_tp_density: cdf value outside [0, 1]");
    TpScore score;
    score.numerator = m >= c ? f : 1.0 - f;
    score.denominator = 0.5;
    score.value = clamp_score(score.numerator / score.denominator);
    return score;
}

SignCounts count_transvariations(const Eigen::MatrixXd& x, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                 std::span<const Eigen::Index> keep) {
    const Eigen::VectorXd direction = m - c;
    return joint_counts(x.rows(), direction, keep, [&](Eigen::Index i, Eigen::Index u) { return x(i, u) - c(u); });
}

SignCounts count_max_transvariations(const Eigen::MatrixXd& x, const Eigen::VectorXd& c,
                                     const Eigen::VectorXd& m, std::span<const Eigen::Index> keep) {
    // (y_iu - c_u) with y = x - (m - c) is x_iu - m_u.
    const Eigen::VectorXd direction = m - c;
    return joint_counts(x.rows(), direction, keep, [&](Eigen::Index i, Eigen::Index u) { return x(i, u) - m(u); });
}

TpScore multivariate_tp(const Eigen::MatrixXd& x, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                        double eps) {
    if (c.size() != x.cols() || m.size() != x.cols())
        throw InvalidArgument("multivariate_tp: dimension mismatch (data has " + std::to_string(x.cols()) +
                              " columns, query " + std::to_string(c.size()) + ", centre " +
                              std::to_string(m.size()) + ")");
    if (x.rows() < 1) throw InvalidArgument("multivariate_tp: empty sample");
    TpScore score;
    const std::vector<Eigen::Index> keep = kept_coordinates(c, m, eps, score.dropped_coords);
    if (keep.empty()) {
        score.value = 1.0;
        score.numerator = score.denominator = static_cast<double>(x.rows());
        return score;
    }
    score.numerator = count_transvariations(x, c, m, keep).weighted();
    score.denominator = count_max_transvariations(x, c, m, keep).weighted();
    if (score.denominator == 0.0) {
        score.degenerate = true;
        score.value = 0.0;
        return score;
    }
    score.value = clamp_score(score.numerator / score.denominator);
    return score;
}

TpScore multivariate_tp_density(const OrthantEvaluator& f, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                double eps) {
    const Eigen::Index p = f.density().dimension();
    if (c.size() != p || m.size() != p) throw InvalidArgument("multivariate_tp_density: dimension mismatch");
    TpScore score;
    const std::vector<Eigen::Index> keep = kept_coordinates(c, m, eps, score.dropped_coords);
    if (keep.empty()) {
        score.value = score.numerator = score.denominator = 1.0;
        return score;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    Eigen::VectorXd num_lo = Eigen::VectorXd::Constant(p, -inf);
    Eigen::VectorXd num_hi = Eigen::VectorXd::Constant(p, inf);
    Eigen::VectorXd den_lo = num_lo;
    Eigen::VectorXd den_hi = num_hi;
    for (Eigen::Index u : keep) {
        if (c(u) >= m(u)) {
            num_lo(u) = c(u);
            den_lo(u) = m(u);
        } else {
            num_hi(u) = c(u);
            den_hi(u) = m(u);
        }
    }
    const BoxRatio mass = f.probabilities(num_lo, num_hi, den_lo, den_hi);
    score.numerator = mass.numerator;
    score.denominator = mass.denominator;
    if (mass.denominator < kNegligibleMass) {
        score.degenerate = true;
        score.value = 0.0;
        return score;
    }
    score.value = clamp_score(mass.numerator / mass.denominator);
    return score;
}

TpScore multivariate_tp_density(const MixtureDensity& f, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                                const OrthantIntegrator& integrator, double eps) {
    return multivariate_tp_density(OrthantEvaluator(f, integrator), c, m, eps);
}

TpScore independent_product_tp(std::span<const TpScore> per_coord_scores) {
    if (per_coord_scores.empty()) throw InvalidArgument("independent_product_tp: no scores");
    TpScore out;
    out.value = 1.0;
    out.numerator = 1.0;
    out.denominator = 1.0;
    for (const auto& s : per_coord_scores) {
        out.value *= s.value;
        out.degenerate = out.degenerate || s.degenerate;
    }
    out.numerator = out.value;
    return out;
}

} // namespace tocc
