#include "tocc/data_matrix.hpp"

#include "tocc/error.hpp"

#include <cmath>
#include <set>

namespace tocc {

std::vector<std::string> default_feature_names(Eigen::Index p) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    return names;
}

DataMatrix::DataMatrix(Eigen::MatrixXd values)
    : values_(std::move(values)), names_(default_feature_names(values_.cols())) {
    validate();
}

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names)
    : values_(std::move(values)), names_(std::move(feature_names)) {
    validate();
}

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names,
                       std::vector<RowLabel> row_labels)
    : values_(std::move(values)), names_(std::move(feature_names)), labels_(std::move(row_labels)) {
    validate();
}

void DataMatrix::validate() const {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw InvalidArgument("data matrix must have at least one row and one column");
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols())
        throw InvalidArgument("feature name count does not match column count");
    std::set<std::string> seen;
    for (const auto& name : names_)
        if (!seen.insert(name).second) throw InvalidArgument("duplicate feature name '" + name + "'");
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        for (Eigen::Index j = 0; j < values_.cols(); ++j)
            if (!std::isfinite(values_(i, j)))
                throw InvalidArgument("non-finite value at row " + std::to_string(i + 1) +
                                      ", column '" + names_[static_cast<std::size_t>(j)] + "'");
    if (labels_ && static_cast<Eigen::Index>(labels_->size()) != values_.rows())
        throw InvalidArgument("row label count does not match row count");
}

Eigen::Index DataMatrix::feature_index(const std::string& name) const {
    for (std::size_t j = 0; j < names_.size(); ++j)
        if (names_[j] == name) return static_cast<Eigen::Index>(j);
    throw InvalidArgument("unknown feature '" + name + "'");
}

DataMatrix DataMatrix::rows_with(RowLabel label) const {
    if (!labels_) throw InvalidArgument("data matrix has no row labels");
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < labels_->size(); ++i)
        if ((*labels_)[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
    if (rows.empty()) throw InvalidArgument("no rows carry the requested label");
    return select_rows(rows);
}

DataMatrix DataMatrix::select_rows(const std::vector<Eigen::Index>& rows) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
    std::vector<RowLabel> labels;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] < 0 || rows[r] >= values_.rows()) throw InvalidArgument("row index out of range");
        out.row(static_cast<Eigen::Index>(r)) = values_.row(rows[r]);
        if (labels_) labels.push_back((*labels_)[static_cast<std::size_t>(rows[r])]);
    }
    if (labels_) return DataMatrix(std::move(out), names_, std::move(labels));
    return DataMatrix(std::move(out), names_);
}

DataMatrix DataMatrix::select_features(const std::vector<Eigen::Index>& cols) const {
    Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(cols.size()));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] < 0 || cols[c] >= values_.cols()) throw InvalidArgument("feature index out of range");
        out.col(static_cast<Eigen::Index>(c)) = values_.col(cols[c]);
        names.push_back(names_[static_cast<std::size_t>(cols[c])]);
    }
    if (labels_) return DataMatrix(std::move(out), std::move(names), *labels_);
    return DataMatrix(std::move(out), std::move(names));
}

DataMatrix DataMatrix::select_features(const std::vector<std::string>& names) const {
    std::vector<Eigen::Index> cols;
    cols.reserve(names.size());
    for (const auto& name : names) cols.push_back(feature_index(name));
    return select_features(cols);
}

} // namespace tocc
