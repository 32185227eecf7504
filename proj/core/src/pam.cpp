#include "tocc/pam.hpp"

#include "tocc/error.hpp"
#include "tocc/numcore.hpp"

#include <algorithm>
#include <limits>

namespace tocc {

namespace {

struct Nearest {
    std::vector<Eigen::Index> first;   // medoid slot of nearest medoid
    std::vector<double> first_d;
    std::vector<double> second_d;
};

Nearest nearest_slots(const Eigen::MatrixXd& dist, const std::vector<Eigen::Index>& medoids) {
    const auto n = static_cast<std::size_t>(dist.rows());
    Nearest out{std::vector<Eigen::Index>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t j = 0; j < n; ++j) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        Eigen::Index slot = 0;
        for (std::size_t s = 0; s < medoids.size(); ++s) {
            const double d = dist(static_cast<Eigen::Index>(j), medoids[s]);
            if (d < best) {
                second = best;
                best = d;
                slot = static_cast<Eigen::Index>(s);
            } else if (d < second) {
                second = d;
            }
        }
        out.first[j] = slot;
        out.first_d[j] = best;
        out.second_d[j] = second;
    }
    return out;
}

double total(const std::vector<double>& v) {
    double sum = 0.0;
    for (double d : v) sum += d;
    return sum;
}

} // namespace

PamResult pam(const Eigen::MatrixXd& x_input, Eigen::Index k, PamOptions options) {
    const Eigen::Index n = x_input.rows();
    if (k < 1) throw InvalidArgument("pam: K must be at least 1");
    if (k > n) throw InvalidArgument("pam: K = " + std::to_string(k) + " exceeds the " + std::to_string(n) + " rows");

    // Canonical row order makes the scan order independent of input order.
    const std::vector<Eigen::Index> order = lexicographic_row_order(x_input);
    Eigen::MatrixXd x(n, x_input.cols());
    for (Eigen::Index i = 0; i < n; ++i) x.row(i) = x_input.row(order[static_cast<std::size_t>(i)]);

    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = dist(j, i) = (x.row(i) - x.row(j)).norm();
    }

    // BUILD
    std::vector<Eigen::Index> medoids;
    std::vector<bool> is_medoid(static_cast<std::size_t>(n), false);
    std::vector<double> current(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    while (static_cast<Eigen::Index>(medoids.size()) < k) {
        Eigen::Index best = -1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (Eigen::Index h = 0; h < n; ++h) {
            if (is_medoid[static_cast<std::size_t>(h)]) continue;
            double cost = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) cost += std::min(current[static_cast<std::size_t>(j)], dist(j, h));
            if (cost < best_cost) {
                best_cost = cost;
                best = h;
            }
        }
        medoids.push_back(best);
        is_medoid[static_cast<std::size_t>(best)] = true;
        for (Eigen::Index j = 0; j < n; ++j)
            current[static_cast<std::size_t>(j)] = std::min(current[static_cast<std::size_t>(j)], dist(j, best));
    }

    PamResult result;
    Nearest near = nearest_slots(dist, medoids);
    double cost = total(near.first_d);
    result.cost_trace.push_back(cost);

    // SWAP: first improvement over ascending (medoid slot, candidate) pairs,
    // rescanning from the start after every accepted swap.
    bool improved = true;
    while (improved && result.swaps < options.max_swaps) {
        improved = false;
        for (std::size_t slot = 0; slot < medoids.size() && !improved; ++slot) {
            for (Eigen::Index h = 0; h < n && !improved; ++h) {
                if (is_medoid[static_cast<std::size_t>(h)]) continue;
                double delta = 0.0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    const auto jj = static_cast<std::size_t>(j);
                    const double via_h = dist(j, h);
                    const double replaced = near.first[jj] == static_cast<Eigen::Index>(slot)
                                                ? std::min(via_h, near.second_d[jj])
                                                : std::min(via_h, near.first_d[jj]);
                    delta += replaced - near.first_d[jj];
                }
                if (delta < -1e-10 * std::max(1.0, cost)) {
                    is_medoid[static_cast<std::size_t>(medoids[slot])] = false;
                    is_medoid[static_cast<std::size_t>(h)] = true;
                    medoids[slot] = h;
                    near = nearest_slots(dist, medoids);
                    const double next_cost = total(near.first_d);
                    if (next_cost > cost) throw Error("pam: swap increased the total cost");
                    cost = next_cost;
                    result.cost_trace.push_back(cost);
                    ++result.swaps;
                    improved = true;
                }
            }
        }
    }

    std::vector<Eigen::Index> slots(medoids.size());
    for (std::size_t s = 0; s < slots.size(); ++s) slots[s] = static_cast<Eigen::Index>(s);
    // Canonical cluster order: ascending medoid position in lexicographic order.
    std::sort(slots.begin(), slots.end(), [&](Eigen::Index a, Eigen::Index b) {
        return medoids[static_cast<std::size_t>(a)] < medoids[static_cast<std::size_t>(b)];
    });
    std::vector<Eigen::Index> sorted_medoids;
    for (Eigen::Index s : slots) sorted_medoids.push_back(medoids[static_cast<std::size_t>(s)]);
    near = nearest_slots(dist, sorted_medoids);

    result.medoids.resize(sorted_medoids.size());
    for (std::size_t s = 0; s < sorted_medoids.size(); ++s)
        result.medoids[s] = order[static_cast<std::size_t>(sorted_medoids[s])];
    result.assignment.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index j = 0; j < n; ++j)
        result.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] =
            near.first[static_cast<std::size_t>(j)];
    result.total_cost = total(near.first_d);
    return result;
}

} // namespace tocc
