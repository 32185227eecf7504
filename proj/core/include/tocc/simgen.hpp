#pragma once

#include "tocc/data_matrix.hpp"
#include "tocc/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>

namespace tocc {

/// Synthetic bivariate settings:
///   a-d  correlated Gaussian target (identity, square, sqrt|.|, log|.|),
///        non-target from the same pipeline with the Gaussian mean shifted by lambda (1, 1);
///   e-h  the a-d targets with non-targets uniform in a box around the target;
///   i    banana-shaped (arc) target and non-target with different widths.
enum class ScenarioId { a, b, c, d, e, f, g, h, i };

std::string_view to_string(ScenarioId id);
ScenarioId parse_scenario(std::string_view name);

struct BananaParams {
    double radius = 5.0;
    double sigma = 0.8;
    double target_angle_width = 0.9 * std::numbers::pi;
    double nontarget_angle_width = 0.6 * std::numbers::pi;
    Eigen::Vector2d nontarget_offset{0.0, -1.0};
};

struct ScenarioSpec {
    ScenarioId id = ScenarioId::a;
    std::size_t n_target = 500;
    std::optional<std::size_t> n_nontarget; // defaults to n_target / 2
    double lambda = 1.0;                     // a-d
    double box_scale = 3.0;                  // e-h, box side in IQR units
    double correlation = 0.35;
    BananaParams banana{};
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] std::size_t nontarget_count() const;
    void validate() const;
};

struct Scenario {
    DataMatrix target;
    DataMatrix nontarget;
    std::optional<Eigen::Vector2d> box_lower; // e-h only
    std::optional<Eigen::Vector2d> box_upper;

    /// Target rows followed by non-target rows, labelled.
    [[nodiscard]] DataMatrix combined() const;
};

Scenario generate(const ScenarioSpec& spec);

} // namespace tocc
