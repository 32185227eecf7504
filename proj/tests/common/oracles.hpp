#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

// Reference implementations written from the definitions, kept deliberately
// naive so they share no code with the library.
namespace oracle {

// Sign of a product without forming it.
inline int product_sign(double a, double b) {
    const int sa = (a > 0) - (a < 0);
    const int sb = (b > 0) - (b < 0);
    return sa * sb;
}

struct Tp {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
};

// Row i counts fully (all kept products negative) or half (all zero).
inline double weighted_count(const Eigen::MatrixXd& x, const Eigen::VectorXd& ref, const Eigen::VectorXd& c,
                             const Eigen::VectorXd& m, const std::vector<int>& keep) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        int negative = 0;
        int zero = 0;
        for (int u : keep) {
            const int s = product_sign(x(i, u) - ref(u), m(u) - c(u));
            negative += s < 0 ? 1 : 0;
            zero += s == 0 ? 1 : 0;
        }
        const int k = static_cast<int>(keep.size());
        if (negative == k) total += 1.0;
        else if (zero == k) total += 0.5;
    }
    return total;
}

inline Tp multivariate_tp(const Eigen::MatrixXd& x, const Eigen::VectorXd& c, const Eigen::VectorXd& m,
                          double eps = 1e-12) {
    std::vector<int> keep;
    for (Eigen::Index u = 0; u < c.size(); ++u)
        if (std::abs(c(u) - m(u)) > eps) keep.push_back(static_cast<int>(u));
    Tp out;
    if (keep.empty()) {
        out.value = 1.0;
        return out;
    }
    out.numerator = weighted_count(x, c, c, m, keep);
    out.denominator = weighted_count(x, m, c, m, keep);
    out.value = out.denominator == 0.0 ? 0.0 : std::min(1.0, out.numerator / out.denominator);
    return out;
}

// 2 (s + s'/2) / n by direct enumeration.
inline double univariate_tp(const std::vector<double>& xs, double c, double m) {
    double s = 0.0;
    double ties = 0.0;
    for (double x : xs) {
        const int sign = product_sign(x - c, m - c);
        if (sign < 0) s += 1.0;
        else if (sign == 0) ties += 1.0;
    }
    return 2.0 * (s + ties / 2.0) / static_cast<double>(xs.size());
}

// Exhaustive k-medoids: minimum summed distance over every k-subset.
inline double best_medoid_cost(const Eigen::MatrixXd& x, int k) {
    const int n = static_cast<int>(x.rows());
    double best = std::numeric_limits<double>::infinity();
    std::vector<bool> mask(static_cast<std::size_t>(n), false);
    std::fill(mask.end() - k, mask.end(), true);
    do {
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = std::numeric_limits<double>::infinity();
            for (int j = 0; j < n; ++j)
                if (mask[static_cast<std::size_t>(j)]) d = std::min(d, (x.row(i) - x.row(j)).norm());
            cost += d;
        }
        best = std::min(best, cost);
    } while (std::next_permutation(mask.begin(), mask.end()));
    return best;
}

// Mann-Whitney probability that a random target outranks a random
// non-target, ties counted half. Equals the trapezoidal ROC area.
inline double rank_auc(const std::vector<double>& target, const std::vector<double>& other) {
    double wins = 0.0;
    for (double a : target)
        for (double b : other) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    return wins / (static_cast<double>(target.size()) * static_cast<double>(other.size()));
}

} // namespace oracle
