#include "tocc/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tocc {

namespace {

void require_nonempty(std::span<const double> xs, const char* what) {
    if (xs.empty()) throw InvalidArgument(std::string(what) + ": empty input");
    for (double x : xs)
        if (!std::isfinite(x)) throw InvalidArgument(std::string(what) + ": non-finite input");
}

void require_level(double q, const char* what) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument(std::string(what) + ": level outside [0, 1]");
}

constexpr double kRelativeZeroEigenvalue = 1e-10;

} // namespace

double empirical_quantile(std::span<const double> xs, double q) {
    require_nonempty(xs, "empirical_quantile");
    require_level(q, "empirical_quantile");
    std::vector<double> sorted(xs.begin(), xs.end());
    const auto n = sorted.size();
    // The 1e-9 slack keeps q*n products such as 0.1*30 from rounding up a rank.
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
    return sorted[k - 1];
}

double interpolated_quantile(std::span<const double> xs, double q) {
    require_nonempty(xs, "interpolated_quantile");
    require_level(q, "interpolated_quantile");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> xs) {
    require_nonempty(xs, "median");
    std::vector<double> sorted(xs.begin(), xs.end());
    const auto n = sorted.size();
    const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(sorted.begin(), mid, sorted.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(sorted.begin(), mid);
    return 0.5 * (lower + upper);
}

double median_absolute_deviation(std::span<const double> xs) {
    const double m = median(xs);
    std::vector<double> dev(xs.size());
    std::transform(xs.begin(), xs.end(), dev.begin(), [m](double x) { return std::abs(x - m); });
    return median(dev);
}

Eigen::VectorXd coordinatewise_median(const Eigen::MatrixXd& x) {
    if (x.rows() < 1 || x.cols() < 1) throw InvalidArgument("coordinatewise_median: empty matrix");
    Eigen::VectorXd out(x.cols());
    std::vector<double> column(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) column[static_cast<std::size_t>(i)] = x(i, j);
        out(j) = median(column);
    }
    return out;
}

double sum_of_distances(const Eigen::MatrixXd& x, const Eigen::VectorXd& point) {
    return (x.rowwise() - point.transpose()).rowwise().norm().sum();
}

Eigen::VectorXd spatial_median(const Eigen::MatrixXd& x, SpatialMedianOptions options) {
    if (x.rows() < 1 || x.cols() < 1) throw InvalidArgument("spatial_median: empty matrix");
    if (!(options.tol > 0.0)) throw InvalidArgument("spatial_median: tol must be positive");
    if (options.max_iter < 1) throw InvalidArgument("spatial_median: max_iter must be positive");
    if (x.rows() == 1) return x.row(0).transpose();

    const Eigen::Index p = x.cols();
    Eigen::VectorXd y = coordinatewise_median(x);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        Eigen::VectorXd weighted_sum = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd pull = Eigen::VectorXd::Zero(p);
        double weight_total = 0.0;
        double coincident = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const Eigen::VectorXd diff = x.row(i).transpose() - y;
            const double d = diff.norm();
            if (d < options.tol) {
                coincident += 1.0;
                continue;
            }
            weighted_sum += x.row(i).transpose() / d;
            pull += diff / d;
            weight_total += 1.0 / d;
        }
        if (weight_total == 0.0) return y; // every point coincides with y

        const Eigen::VectorXd t = weighted_sum / weight_total;
        Eigen::VectorXd next;
        if (coincident == 0.0) {
            next = t;
        } else {
            const double r = pull.norm();
            if (r <= coincident) return y; // y is a data point satisfying the optimality condition
            const double gamma = coincident / r;
            next = (1.0 - gamma) * t + gamma * y;
        }
        const double step = (next - y).norm();
        y = std::move(next);
        if (step < options.tol) return y;
    }
    throw ConvergenceError("spatial_median: no convergence after " + std::to_string(options.max_iter) +
                               " iterations",
                           y);
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw InvalidArgument("sample_covariance: need at least two rows");
    const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(x.rows() - 1);
}

Eigen::Index Pca::rank() const {
    return static_cast<Eigen::Index>(std::count(zero_variance.begin(), zero_variance.end(), false));
}

Pca pca(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw InvalidArgument("pca: need at least two rows");
    const Eigen::MatrixXd cov = sample_covariance(x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("pca: eigendecomposition failed");

    const Eigen::Index p = x.cols();
    Pca out;
    out.center = x.colwise().mean().transpose();
    out.eigenvalues.resize(p);
    out.eigenvectors.resize(p, p);
    // Eigen returns ascending eigenvalues.
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index src = p - 1 - k;
        out.eigenvalues(k) = std::max(0.0, solver.eigenvalues()(src));
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) v = -v;
        out.eigenvectors.col(k) = v;
    }
    const double scale = std::max(out.eigenvalues(0), std::numeric_limits<double>::min());
    out.zero_variance.resize(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k)
        out.zero_variance[static_cast<std::size_t>(k)] =
            out.eigenvalues(k) <= kRelativeZeroEigenvalue * scale;
    return out;
}

Eigen::VectorXd column_standard_deviations(const Eigen::MatrixXd& x) {
    return sample_covariance(x).diagonal().cwiseSqrt();
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x, std::span<const std::string> names) {
    const Eigen::MatrixXd cov = sample_covariance(x);
    const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    for (Eigen::Index j = 0; j < sd.size(); ++j) {
        if (!(sd(j) > 0.0)) {
            const std::string label = j < static_cast<Eigen::Index>(names.size())
                                          ? "'" + names[static_cast<std::size_t>(j)] + "'"
                                          : std::to_string(j + 1);
            throw DegenerateData("correlation_matrix: column " + label + " has zero variance");
        }
    }
    Eigen::MatrixXd corr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        corr(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < corr.cols(); ++j) {
            const double r = std::clamp(0.5 * (corr(i, j) + corr(j, i)), -1.0, 1.0);
            corr(i, j) = r;
            corr(j, i) = r;
        }
    }
    return corr;
}

std::vector<Eigen::Index> lexicographic_row_order(const Eigen::MatrixXd& x) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&x](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (x(a, j) < x(b, j)) return true;
            if (x(b, j) < x(a, j)) return false;
        }
        return false;
    });
    return order;
}

} // namespace tocc
