#include "tocc/simgen.hpp"

#include "tocc/error.hpp"
#include "tocc/numcore.hpp"

#include <cmath>
#include <string>

namespace tocc {

std::string_view to_string(ScenarioId id) {
    static constexpr std::string_view names[] = {"a", "b", "c", "d", "e", "f", "g", "h", "i"};
    return names[static_cast<int>(id)];
}

ScenarioId parse_scenario(std::string_view name) {
    if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'i') return static_cast<ScenarioId>(name[0] - 'a');
    throw InvalidArgument("unknown scenario '" + std::string(name) + "' (expected a-i)");
}

std::size_t ScenarioSpec::nontarget_count() const { return n_nontarget.value_or(n_target / 2); }

void ScenarioSpec::validate() const {
    if (n_target < 2) throw InvalidArgument("scenario: n_target must be at least 2");
    if (nontarget_count() < 1) throw InvalidArgument("scenario: n_nontarget must be at least 1");
    if (!(correlation > -1.0 && correlation < 1.0)) throw InvalidArgument("scenario: correlation outside (-1, 1)");
    if (!std::isfinite(lambda)) throw InvalidArgument("scenario: lambda must be finite");
    if (!(box_scale > 0.0)) throw InvalidArgument("scenario: box_scale must be positive");
    if (!(banana.radius > 0.0) || !(banana.sigma >= 0.0) || !(banana.target_angle_width > 0.0) ||
        !(banana.nontarget_angle_width > 0.0))
        throw InvalidArgument("scenario: invalid banana parameters");
}

namespace {

enum class Transform { identity, square, sqrt_abs, log_abs };

Transform transform_for(ScenarioId id) {
    switch (id) {
    case ScenarioId::a:
    case ScenarioId::e: return Transform::identity;
    case ScenarioId::b:
    case ScenarioId::f: return Transform::square;
    case ScenarioId::c:
    case ScenarioId::g: return Transform::sqrt_abs;
    default: return Transform::log_abs;
    }
}

double apply(Transform t, double v) {
    switch (t) {
    case Transform::identity: return v;
    case Transform::square: return v * v;
    case Transform::sqrt_abs: return std::sqrt(std::abs(v));
    case Transform::log_abs: return std::log(std::abs(v));
    }
    return v;
}

/// Correlated unit-variance Gaussian pair shifted by `shift`, transformed
/// componentwise. log|.| redraws coordinates within 1e-12 of zero.
Eigen::MatrixXd gaussian_pipeline(std::size_t n, double rho, double shift, Transform t, RngStream& rng) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), 2);
    const double tail = std::sqrt(1.0 - rho * rho);
    for (std::size_t r = 0; r < n; ++r) {
        double b1 = 0.0;
        double b2 = 0.0;
        do {
            const double z1 = rng.normal();
            const double z2 = rng.normal();
            b1 = z1 + shift;
            b2 = rho * z1 + tail * z2 + shift;
        } while (t == Transform::log_abs && (std::abs(b1) < 1e-12 || std::abs(b2) < 1e-12));
        out(static_cast<Eigen::Index>(r), 0) = apply(t, b1);
        out(static_cast<Eigen::Index>(r), 1) = apply(t, b2);
    }
    return out;
}

Eigen::MatrixXd arc(std::size_t n, double radius, double width, double sigma, const Eigen::Vector2d& center,
                    RngStream& rng) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), 2);
    for (std::size_t r = 0; r < n; ++r) {
        const double u = rng.uniform(-0.5 * width, 0.5 * width);
        const double nx = rng.normal();
        const double ny = rng.normal();
        out(static_cast<Eigen::Index>(r), 0) = center.x() + radius * std::sin(u) + sigma * nx;
        out(static_cast<Eigen::Index>(r), 1) = center.y() + radius * std::cos(u) + sigma * ny;
    }
    return out;
}

bool is_box_scenario(ScenarioId id) { return id >= ScenarioId::e && id <= ScenarioId::h; }

} // namespace

DataMatrix Scenario::combined() const {
    const Eigen::Index nt = target.rows();
    const Eigen::Index nn = nontarget.rows();
    Eigen::MatrixXd values(nt + nn, target.cols());
    values.topRows(nt) = target.values();
    values.bottomRows(nn) = nontarget.values();
    std::vector<RowLabel> labels(static_cast<std::size_t>(nt), RowLabel::target);
    labels.resize(static_cast<std::size_t>(nt + nn), RowLabel::non_target);
    return DataMatrix(std::move(values), target.feature_names(), std::move(labels));
}

Scenario generate(const ScenarioSpec& spec) {
    spec.validate();
    RngStream rng(spec.seed, spec.stream_id);
    const std::vector<std::string> names{"x1", "x2"};
    const std::size_t n_nt = spec.nontarget_count();

    if (spec.id == ScenarioId::i) {
        const auto& b = spec.banana;
        Eigen::MatrixXd target = arc(spec.n_target, b.radius, b.target_angle_width, b.sigma, Eigen::Vector2d::Zero(), rng);
        Eigen::MatrixXd nontarget = arc(n_nt, b.radius, b.nontarget_angle_width, b.sigma, b.nontarget_offset, rng);
        return Scenario{DataMatrix(std::move(target), names), DataMatrix(std::move(nontarget), names), {}, {}};
    }

    const Transform t = transform_for(spec.id);
    Eigen::MatrixXd target = gaussian_pipeline(spec.n_target, spec.correlation, 0.0, t, rng);
    if (!is_box_scenario(spec.id)) {
        Eigen::MatrixXd nontarget = gaussian_pipeline(n_nt, spec.correlation, spec.lambda, t, rng);
        return Scenario{DataMatrix(std::move(target), names), DataMatrix(std::move(nontarget), names), {}, {}};
    }

    const Eigen::VectorXd centre = coordinatewise_median(target);
    Eigen::Vector2d lower;
    Eigen::Vector2d upper;
    for (Eigen::Index j = 0; j < 2; ++j) {
        std::vector<double> column(target.col(j).data(), target.col(j).data() + target.rows());
        const double iqr = interpolated_quantile(column, 0.75) - interpolated_quantile(column, 0.25);
        const double half = 0.5 * spec.box_scale * iqr;
        lower(j) = centre(j) - half;
        upper(j) = centre(j) + half;
    }
    Eigen::MatrixXd nontarget(static_cast<Eigen::Index>(n_nt), 2);
    for (Eigen::Index r = 0; r < nontarget.rows(); ++r)
        for (Eigen::Index j = 0; j < 2; ++j) nontarget(r, j) = rng.uniform(lower(j), upper(j));
    return Scenario{DataMatrix(std::move(target), names), DataMatrix(std::move(nontarget), names), lower, upper};
}

} // namespace tocc
