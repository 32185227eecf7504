#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace tocc {

enum class RowLabel { target, non_target, unknown };

/// n x p table of finite feature values with unique feature names and
/// optional per-row target / non-target tags.
class DataMatrix {
public:
    DataMatrix() = default;

    /// Feature names default to x1..xp.
    explicit DataMatrix(Eigen::MatrixXd values);
    DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names);
    DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names,
               std::vector<RowLabel> row_labels);

    [[nodiscard]] Eigen::Index rows() const { return values_.rows(); }
    [[nodiscard]] Eigen::Index cols() const { return values_.cols(); }
    [[nodiscard]] const Eigen::MatrixXd& values() const { return values_; }
    [[nodiscard]] const std::vector<std::string>& feature_names() const { return names_; }
    [[nodiscard]] const std::optional<std::vector<RowLabel>>& row_labels() const { return labels_; }
    [[nodiscard]] bool has_labels() const { return labels_.has_value(); }

    /// Index of the named feature; throws InvalidArgument if absent.
    [[nodiscard]] Eigen::Index feature_index(const std::string& name) const;

    /// Rows carrying the given label. Requires labels.
    [[nodiscard]] DataMatrix rows_with(RowLabel label) const;
    [[nodiscard]] DataMatrix select_rows(const std::vector<Eigen::Index>& rows) const;
    [[nodiscard]] DataMatrix select_features(const std::vector<Eigen::Index>& cols) const;
    [[nodiscard]] DataMatrix select_features(const std::vector<std::string>& names) const;

private:
    void validate() const;

    Eigen::MatrixXd values_;
    std::vector<std::string> names_;
    std::optional<std::vector<RowLabel>> labels_;
};

std::vector<std::string> default_feature_names(Eigen::Index p);

} // namespace tocc
