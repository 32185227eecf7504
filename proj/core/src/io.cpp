#include "tocc/io.hpp"

#include "tocc/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tocc {

using Json = nlohmann::ordered_json;

std::string_view library_version() { return TOCC_VERSION_STRING; }

namespace {

std::string location(std::string_view source, std::size_t line) {
    return std::string(source) + ":" + std::to_string(line);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path.string() + "'");
    return in;
}

} // namespace

CsvTable parse_csv(std::istream& in, std::string_view source) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> record_lines;
    std::vector<std::string> record;
    std::string cell;
    bool quoted = false;
    bool cell_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_record = [&] {
        record.push_back(std::move(cell));
        cell.clear();
        const bool blank = record.size() == 1 && record.front().empty() && !cell_started;
        if (!blank) {
            records.push_back(std::move(record));
            record_lines.push_back(record_line);
        }
        record.clear();
        cell_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line;
                cell.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (!trim(cell).empty())
                throw InvalidArgument(location(source, line) + ": stray quote inside unquoted field");
            cell.clear();
            quoted = true;
            cell_started = true;
            break;
        case ',':
            record.push_back(std::move(cell));
            cell.clear();
            cell_started = true;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            [[fallthrough]];
        case '\n':
            end_record();
            ++line;
            record_line = line;
            break;
        default:
            cell.push_back(ch);
            if (ch != ' ' && ch != '\t') cell_started = true;
        }
    }
    if (quoted) throw InvalidArgument(location(source, line) + ": unterminated quoted field");
    if (!record.empty() || !cell.empty() || cell_started) end_record();

    if (records.empty()) throw InvalidArgument(std::string(source) + ": empty file (a header row is required)");
    CsvTable table;
    table.header = std::move(records.front());
    for (auto& name : table.header) name = std::string(trim(name));
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            throw InvalidArgument(location(source, record_lines[r]) + ": expected " +
                                  std::to_string(table.header.size()) + " fields, found " +
                                  std::to_string(records[r].size()));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_csv(in, path.string());
}

std::string csv_escape(std::string_view cell) {
    if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_escape(cells[i]);
    }
    out << '\n';
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

DataMatrix ingest_csv(std::istream& in, const CsvIngestOptions& options, std::string_view source) {
    const CsvTable table = parse_csv(in, source);
    const auto& header = table.header;

    auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InvalidArgument(std::string(source) + ": no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    std::optional<std::size_t> label_col;
    if (options.label_column) label_col = column_of(*options.label_column);
    std::set<std::size_t> skip;
    for (const auto& name : options.drop_columns) skip.insert(column_of(name));
    if (label_col) skip.insert(*label_col);

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (skip.count(c)) continue;
        feature_cols.push_back(c);
        names.push_back(header[c]);
    }
    if (feature_cols.empty()) throw InvalidArgument(std::string(source) + ": no feature columns");
    if (table.rows.empty()) throw InvalidArgument(std::string(source) + ": no data rows");

    const std::set<std::string> targets(options.target_labels.begin(), options.target_labels.end());
    const std::set<std::string> others(options.nontarget_labels.begin(), options.nontarget_labels.end());
    if (label_col && targets.empty())
        throw InvalidArgument("a label column needs at least one target label");

    Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(feature_cols.size()));
    std::vector<RowLabel> labels;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            const auto v = parse_number(row[feature_cols[j]]);
            if (!v)
                throw InvalidArgument(std::string(source) + ": row " + std::to_string(r + 1) + ", column '" +
                                      header[feature_cols[j]] + "': non-numeric value '" + row[feature_cols[j]] +
                                      "'");
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = *v;
        }
        if (label_col) {
            const std::string label(trim(row[*label_col]));
            if (targets.count(label)) {
                labels.push_back(RowLabel::target);
            } else if (others.empty() ? !label.empty() : others.count(label) > 0) {
                labels.push_back(RowLabel::non_target);
            } else {
                throw InvalidArgument(std::string(source) + ": row " + std::to_string(r + 1) + ", column '" +
                                      header[*label_col] + "': unknown label '" + label + "'");
            }
        }
    }
    if (label_col) return DataMatrix(std::move(values), std::move(names), std::move(labels));
    return DataMatrix(std::move(values), std::move(names));
}

DataMatrix ingest_csv(const std::filesystem::path& path, const CsvIngestOptions& options) {
    auto in = open_input(path);
    return ingest_csv(in, options, path.string());
}

DataMatrix renormalize(const DataMatrix& data, const std::string& reference) {
    const Eigen::Index ref = data.feature_index(reference);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < data.cols(); ++j)
        if (j != ref) keep.push_back(j);
    if (keep.empty()) throw InvalidArgument("renormalize: no columns besides the reference");
    const Eigen::VectorXd denom = data.values().col(ref);
    for (Eigen::Index i = 0; i < denom.size(); ++i)
        if (denom(i) == 0.0)
            throw InvalidArgument("renormalize: row " + std::to_string(i + 1) + " has zero in column '" + reference +
                                  "'");
    DataMatrix out = data.select_features(keep);
    Eigen::MatrixXd values = out.values();
    for (Eigen::Index j = 0; j < values.cols(); ++j) values.col(j).array() /= denom.array();
    if (out.has_labels()) return DataMatrix(std::move(values), out.feature_names(), *out.row_labels());
    return DataMatrix(std::move(values), out.feature_names());
}

std::string_view to_string(GlassSubset subset) {
    return subset == GlassSubset::float_windows ? "float-windows" : "all-windows";
}

GlassSubset parse_glass_subset(std::string_view name) {
    if (name == "float-windows") return GlassSubset::float_windows;
    if (name == "all-windows") return GlassSubset::all_windows;
    throw InvalidArgument("unknown glass subset '" + std::string(name) + "' (expected float-windows or all-windows)");
}

DataMatrix load_uci_glass(const std::filesystem::path& path, GlassSubset subset) {
    auto in = open_input(path);
    std::vector<std::array<double, 9>> rows;
    std::vector<RowLabel> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 11)
            throw InvalidArgument(location(path.string(), line_no) + ": expected 11 fields, found " +
                                  std::to_string(fields.size()));
        std::array<double, 9> x{};
        for (std::size_t j = 0; j < 9; ++j) {
            const auto v = parse_number(fields[j + 1]);
            if (!v)
                throw InvalidArgument(location(path.string(), line_no) + ", column '" + glass_feature_names()[j] +
                                      "': non-numeric value '" + std::string(fields[j + 1]) + "'");
            x[j] = *v;
        }
        const auto type = parse_number(fields[10]);
        if (!type || *type != std::floor(*type) || *type < 1 || *type > 7)
            throw InvalidArgument(location(path.string(), line_no) + ": glass type must be an integer in 1..7");
        const int t = static_cast<int>(*type);
        RowLabel label;
        if (t >= 5) label = RowLabel::non_target;
        else if (subset == GlassSubset::all_windows || t == 1 || t == 3) label = RowLabel::target;
        else continue;
        rows.push_back(x);
        labels.push_back(label);
    }
    if (rows.empty()) throw InvalidArgument(path.string() + ": no glass rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), 9);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < 9; ++j) values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return DataMatrix(std::move(values), glass_feature_names(), std::move(labels));
}

void write_data_csv(std::ostream& out, const DataMatrix& data) {
    std::vector<std::string> header = data.feature_names();
    if (data.has_labels()) header.emplace_back("label");
    write_csv_row(out, header);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        std::vector<std::string> cells;
        for (Eigen::Index j = 0; j < data.cols(); ++j) cells.push_back(format_double(data.values()(i, j)));
        if (data.has_labels()) {
            const RowLabel l = (*data.row_labels())[static_cast<std::size_t>(i)];
            cells.emplace_back(l == RowLabel::target ? "target" : l == RowLabel::non_target ? "non_target" : "");
        }
        write_csv_row(out, cells);
    }
}

// Model files

namespace {

Json to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json_vec(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw InvalidArgument(std::string("model file: '") + what + "' must be a non-empty array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw InvalidArgument(std::string("model file: ragged matrix '") + what + "'");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from(const Json& j, const char* what) {
    if (!j.is_array()) throw InvalidArgument(std::string("model file: '") + what + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Json to_json(const MixtureDensity& f) {
    Json comps = Json::array();
    for (std::size_t g = 0; g < f.components(); ++g)
        comps.push_back({{"weight", f.weights()[g]},
                         {"mean", to_json_vec(f.means()[g])},
                         {"covariance", to_json(f.covariances()[g])}});
    return comps;
}

MixtureDensity mixture_from(const Json& j) {
    std::vector<double> weights;
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (const Json& c : j) {
        weights.push_back(c.at("weight").get<double>());
        means.push_back(vector_from(c.at("mean"), "mean"));
        covs.push_back(matrix_from(c.at("covariance"), "covariance"));
    }
    return MixtureDensity(std::move(weights), std::move(means), std::move(covs));
}

Json tocc_json(const ToccModel& m) {
    Json j;
    j["kind"] = std::string(to_string(m.variant()));
    j["feature_names"] = m.feature_names();
    j["eps"] = m.eps();
    j["sensitivities"] = m.sensitivities();
    j["thresholds"] = m.thresholds();
    j["prototypes"] = to_json(m.prototypes());
    Json refs = Json::array();
    for (const auto& r : m.reference_sets()) refs.push_back(to_json(r));
    j["reference_sets"] = std::move(refs);
    if (m.density()) j["mixture"] = to_json(*m.density());
    if (m.integrator()) {
        const auto& in = *m.integrator();
        j["integrator"] = {{"method", in.method == IntegrationMethod::monte_carlo ? "monte-carlo" : "closed-form-1d"},
                           {"mc_samples", in.mc_samples},
                           {"seed", in.seed},
                           {"stream_id", in.stream_id}};
    }
    return j;
}

ToccModel tocc_from(const Json& j) {
    const ToccVariant variant = parse_tocc_variant(j.at("kind").get<std::string>());
    std::vector<Eigen::MatrixXd> refs;
    for (const Json& r : j.at("reference_sets")) refs.push_back(matrix_from(r, "reference_sets"));
    std::optional<MixtureDensity> density;
    if (j.contains("mixture")) density = mixture_from(j.at("mixture"));
    std::optional<OrthantIntegrator> integrator;
    if (j.contains("integrator")) {
        const Json& in = j.at("integrator");
        OrthantIntegrator oi;
        const auto method = in.at("method").get<std::string>();
        if (method == "monte-carlo") oi.method = IntegrationMethod::monte_carlo;
        else if (method == "closed-form-1d") oi.method = IntegrationMethod::closed_form_1d;
        else throw InvalidArgument("model file: unknown integrator method '" + method + "'");
        oi.mc_samples = in.at("mc_samples").get<std::size_t>();
        oi.seed = in.at("seed").get<std::uint64_t>();
        oi.stream_id = in.at("stream_id").get<std::uint64_t>();
        integrator = oi;
    }
    ToccModel model(variant, j.at("sensitivities").get<std::vector<double>>(), j.at("eps").get<double>(),
                    matrix_from(j.at("prototypes"), "prototypes"), j.at("thresholds").get<std::vector<double>>(),
                    std::move(refs), std::move(density), integrator);
    const auto names = j.at("feature_names").get<std::vector<std::string>>();
    if (!names.empty()) model.set_feature_names(names);
    return model;
}

Json baseline_json(const BaselineModel& m) {
    Json j;
    j["kind"] = std::string(to_string(m.kind()));
    j["s"] = m.sensitivity();
    j["threshold"] = m.threshold();
    if (m.gauss()) j["gauss"] = {{"mean", to_json_vec(m.gauss()->mean)}, {"precision", to_json(m.gauss()->precision)}};
    if (m.mixture()) j["mixture"] = to_json(*m.mixture());
    if (m.kde()) j["kde"] = {{"training", to_json(m.kde()->training)}, {"bandwidth", to_json_vec(m.kde()->bandwidth)}};
    if (m.kmeans()) j["kmeans"] = {{"centroids", to_json(m.kmeans()->centroids)}};
    return j;
}

BaselineModel baseline_from(const Json& j) {
    const BaselineKind kind = parse_baseline_kind(j.at("kind").get<std::string>());
    std::optional<BaselineModel::Gauss> gauss;
    std::optional<MixtureDensity> mixture;
    std::optional<BaselineModel::Kde> kde;
    std::optional<BaselineModel::KMeans> km;
    if (j.contains("gauss"))
        gauss = BaselineModel::Gauss{vector_from(j["gauss"].at("mean"), "mean"),
                                     matrix_from(j["gauss"].at("precision"), "precision")};
    if (j.contains("mixture")) mixture = mixture_from(j.at("mixture"));
    if (j.contains("kde"))
        kde = BaselineModel::Kde{matrix_from(j["kde"].at("training"), "training"),
                                 vector_from(j["kde"].at("bandwidth"), "bandwidth")};
    if (j.contains("kmeans")) km = BaselineModel::KMeans{matrix_from(j["kmeans"].at("centroids"), "centroids")};
    return BaselineModel(kind, j.at("s").get<double>(), j.at("threshold").get<double>(), std::move(gauss),
                         std::move(mixture), std::move(kde), std::move(km));
}

Json parse_meta(std::string_view meta_json) {
    Json meta = Json::parse(meta_json.begin(), meta_json.end(), nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) throw InvalidArgument("metadata must be a JSON object");
    return meta;
}

} // namespace

std::string serialize_model(const FittedMethod& model, std::string_view meta_json) {
    Json doc;
    doc["schema_version"] = kModelSchemaVersion;
    doc["library_version"] = std::string(library_version());
    doc["meta"] = parse_meta(meta_json);
    if (const auto* t = std::get_if<ToccModel>(&model)) {
        doc["family"] = "tocc";
        doc["model"] = tocc_json(*t);
    } else {
        doc["family"] = "baseline";
        doc["model"] = baseline_json(std::get<BaselineModel>(model));
    }
    return doc.dump(2) + "\n";
}

FittedMethod deserialize_model(std::string_view text) {
    const Json doc = Json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw InvalidArgument("model file is not valid JSON");
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != kModelSchemaVersion)
            throw InvalidArgument("unsupported model schema_version " + std::to_string(version));
        const auto family = doc.at("family").get<std::string>();
        if (family == "tocc") return tocc_from(doc.at("model"));
        if (family == "baseline") return baseline_from(doc.at("model"));
        throw InvalidArgument("model file: unknown family '" + family + "'");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const FittedMethod& model, std::string_view meta_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << serialize_model(model, meta_json);
}

FittedMethod load_model(const std::filesystem::path& path) {
    auto in = open_input(path);
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_model(text);
}

// Reports

namespace {

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

Json stats_json(const std::optional<SummaryStats>& s) {
    if (!s) return nullptr;
    return {{"min", s->min}, {"q1", s->q1}, {"median", s->median}, {"q3", s->q3}, {"max", s->max}, {"count", s->count}};
}

} // namespace

void write_benchmark_csv(std::ostream& out, const BenchmarkReport& report, bool timing) {
    std::vector<std::string> header{"method", "scenario", "replication", "sensitivity", "specificity", "auc"};
    if (timing) header.emplace_back("seconds");
    header.emplace_back("error");
    write_csv_row(out, header);
    const std::string scenario(to_string(report.config.scenario.id));
    for (const auto& r : report.records) {
        std::vector<std::string> cells{std::string(to_string(r.method)), scenario, std::to_string(r.replication),
                                       opt_cell(r.sensitivity), opt_cell(r.specificity), opt_cell(r.auc)};
        if (timing) cells.push_back(format_double(r.seconds));
        cells.push_back(r.error);
        write_csv_row(out, cells);
    }
}

std::string benchmark_summary_json(const BenchmarkReport& report, std::string_view meta_json, bool timing) {
    const auto& c = report.config;
    Json doc;
    doc["meta"] = parse_meta(meta_json);
    doc["library_version"] = std::string(library_version());
    Json methods = Json::array();
    for (MethodId m : c.methods) methods.push_back(std::string(to_string(m)));
    doc["config"] = {{"scenario", std::string(to_string(c.scenario.id))},
                     {"n_target", c.scenario.n_target},
                     {"n_nontarget", c.scenario.nontarget_count()},
                     {"lambda", c.scenario.lambda},
                     {"box_scale", c.scenario.box_scale},
                     {"replications", c.replications},
                     {"s", c.s},
                     {"seed", c.seed},
                     {"pam_k", c.method.pam_k},
                     {"mc_samples", c.method.db.integrator.mc_samples},
                     {"methods", std::move(methods)}};
    Json summaries = Json::array();
    for (const auto& s : report.summaries) {
        Json j{{"method", std::string(to_string(s.method))},
               {"failures", s.failures},
               {"specificity", stats_json(s.specificity)},
               {"sensitivity", stats_json(s.sensitivity)},
               {"auc", stats_json(s.auc)}};
        if (timing) j["total_seconds"] = s.total_seconds;
        summaries.push_back(std::move(j));
    }
    doc["summaries"] = std::move(summaries);
    return doc.dump(2) + "\n";
}

void write_vip_csv(std::ostream& out, const VipRanking& vip, const std::vector<std::string>& names,
                   const std::vector<Eigen::Index>& selected) {
    if (static_cast<Eigen::Index>(names.size()) != vip.vip.size())
        throw InvalidArgument("write_vip_csv: one name per feature required");
    write_csv_row(out, {"feature", "vip", "rank", "selected"});
    for (std::size_t r = 0; r < vip.ranking.size(); ++r) {
        const Eigen::Index u = vip.ranking[r];
        const bool sel = std::find(selected.begin(), selected.end(), u) != selected.end();
        write_csv_row(out, {names[static_cast<std::size_t>(u)], format_double(vip.vip(u)), std::to_string(r + 1),
                            sel ? "true" : "false"});
    }
}

void write_roc_csv(std::ostream& out, const RocCurve& roc) {
    write_csv_row(out, {"fpr", "tpr", "threshold"});
    for (const auto& p : roc.points)
        write_csv_row(out, {format_double(p.fpr), format_double(p.tpr),
                            std::isinf(p.threshold) ? (p.threshold > 0 ? "inf" : "-inf") : format_double(p.threshold)});
}

} // namespace tocc
