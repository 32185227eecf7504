#pragma once

#include "tocc/data_matrix.hpp"
#include "tocc/eval.hpp"
#include "tocc/featsel.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tocc {

std::string_view library_version();

/// Header plus rows of raw cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 reader: comma separated, double-quoted fields may hold commas,
/// quotes ("") and line breaks; CRLF or LF line ends. Every row must have
/// as many cells as the header. `source` names the input in error messages.
CsvTable parse_csv(std::istream& in, std::string_view source = "<input>");
CsvTable read_csv_file(const std::filesystem::path& path);

/// Quotes a cell only when needed.
std::string csv_escape(std::string_view cell);
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

/// Shortest decimal that reads back to the same double.
std::string format_double(double x);

struct CsvIngestOptions {
    std::optional<std::string> label_column;
    std::vector<std::string> target_labels;
    /// When non-empty, labels in neither set are an error; otherwise every
    /// label outside `target_labels` is non-target.
    std::vector<std::string> nontarget_labels;
    /// Columns ignored entirely (row ids and the like).
    std::vector<std::string> drop_columns;
};

/// Numeric feature matrix from a headed CSV. Errors name the row (1-based,
/// header excluded) and column.
DataMatrix ingest_csv(const std::filesystem::path& path, const CsvIngestOptions& options = {});
DataMatrix ingest_csv(std::istream& in, const CsvIngestOptions& options = {}, std::string_view source = "<input>");

/// Divides every other column by `reference` row-wise and drops it.
DataMatrix renormalize(const DataMatrix& data, const std::string& reference);

enum class GlassSubset {
    float_windows, // types 1 and 3 against 5, 6, 7
    all_windows,   // types 1-4 against 5, 6, 7
};

std::string_view to_string(GlassSubset subset);
GlassSubset parse_glass_subset(std::string_view name);

inline const std::vector<std::string>& glass_feature_names() {
    static const std::vector<std::string> names{"RI", "Na", "Mg", "Al", "Si", "K", "Ca", "Ba", "Fe"};
    return names;
}

/// Reads the headerless UCI glass file (id, 9 features, type); rows whose
/// type is outside the subset are skipped.
DataMatrix load_uci_glass(const std::filesystem::path& path, GlassSubset subset = GlassSubset::float_windows);

/// Labelled CSV with a trailing "label" column (target / non_target).
void write_data_csv(std::ostream& out, const DataMatrix& data);

/// Structured-text model file. `meta_json` must be a JSON object and is
/// stored verbatim under "meta".
std::string serialize_model(const FittedMethod& model, std::string_view meta_json = "{}");
FittedMethod deserialize_model(std::string_view text);
void save_model(const std::filesystem::path& path, const FittedMethod& model, std::string_view meta_json = "{}");
FittedMethod load_model(const std::filesystem::path& path);

inline constexpr int kModelSchemaVersion = 1;

/// One row per method x replication. Seconds only when `timing` is set.
void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report, bool timing = false);
/// Per-method boxplot statistics as a JSON document.
std::string benchmark_summary_json(const BenchmarkReport& report, std::string_view meta_json = "{}",
                                   bool timing = false);

void write_vip_csv(std::ostream& out, const VipRanking& vip, const std::vector<std::string>& names,
                   const std::vector<Eigen::Index>& selected);

void write_roc_csv(std::ostream& out, const RocCurve& roc);

} // namespace tocc
