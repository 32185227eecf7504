#include "cli.hpp"

#include "glass_repro.hpp"

#include <tocc/error.hpp>
#include <tocc/eval.hpp>
#include <tocc/featsel.hpp>
#include <tocc/io.hpp>
#include <tocc/numcore.hpp>
#include <tocc/simgen.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#ifndef TOCC_DATA_DIR
#define TOCC_DATA_DIR "data"
#endif

namespace tocc::cli {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TOCC_SEED"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != nullptr && *end == '\0') return v;
        throw InvalidArgument(std::string("TOCC_SEED must be a non-negative integer, got '") + env + "'");
    }
    return 1;
}

namespace {

class UsageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct DataOptions {
    std::string data;
    std::string format = "csv";
    std::string label_column;
    std::vector<std::string> target_labels;
    std::vector<std::string> nontarget_labels;
    std::vector<std::string> drop_columns;
    std::vector<std::string> features;
    std::string glass_subset = "float-windows";
    std::string normalize_by;
};

void add_data_options(CLI::App* sub, DataOptions& o, bool required = true) {
    auto* data = sub->add_option("--data", o.data, "Input file");
    if (required) data->required();
    sub->add_option("--format", o.format, "Input format")->check(CLI::IsMember({"csv", "uci-glass"}));
    sub->add_option("--label-column", o.label_column, "CSV column holding class labels");
    sub->add_option("--target-labels", o.target_labels, "Labels marking target rows")->delimiter(',');
    sub->add_option("--nontarget-labels", o.nontarget_labels,
                    "Labels marking non-target rows (others become errors)")
        ->delimiter(',');
    sub->add_option("--drop-columns", o.drop_columns, "CSV columns to ignore")->delimiter(',');
    sub->add_option("--features", o.features, "Feature subset, by name")->delimiter(',');
    sub->add_option("--glass-subset", o.glass_subset, "Row subset for --format uci-glass")
        ->check(CLI::IsMember({"float-windows", "all-windows"}));
    sub->add_option("--normalize-by", o.normalize_by, "Divide every feature by this column and drop it");
}

DataMatrix load_data(const DataOptions& o) {
    DataMatrix d;
    if (o.format == "uci-glass") {
        d = load_uci_glass(o.data, parse_glass_subset(o.glass_subset));
    } else {
        CsvIngestOptions opts;
        if (!o.label_column.empty()) opts.label_column = o.label_column;
        opts.target_labels = o.target_labels;
        opts.nontarget_labels = o.nontarget_labels;
        opts.drop_columns = o.drop_columns;
        d = ingest_csv(fs::path(o.data), opts);
    }
    if (!o.normalize_by.empty()) d = renormalize(d, o.normalize_by);
    if (!o.features.empty()) d = d.select_features(o.features);
    return d;
}

Json data_json(const DataOptions& o) {
    Json j{{"data", o.data}, {"format", o.format}};
    if (o.format == "uci-glass") j["glass_subset"] = o.glass_subset;
    if (!o.label_column.empty()) j["label_column"] = o.label_column;
    if (!o.target_labels.empty()) j["target_labels"] = o.target_labels;
    if (!o.nontarget_labels.empty()) j["nontarget_labels"] = o.nontarget_labels;
    if (!o.drop_columns.empty()) j["drop_columns"] = o.drop_columns;
    if (!o.features.empty()) j["features"] = o.features;
    if (!o.normalize_by.empty()) j["normalize_by"] = o.normalize_by;
    return j;
}

DataMatrix training_rows(const DataMatrix& d) {
    if (!d.has_labels()) return d;
    return d.rows_with(RowLabel::target);
}

Json make_meta(std::string_view command, Json config, std::uint64_t seed) {
    return Json{{"command", std::string(command)},
                {"seed", seed},
                {"library_version", std::string(library_version())},
                {"config", std::move(config)}};
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

/// CSV plus a "<path>.meta.json" sidecar.
void write_csv_output(const fs::path& path, const std::string& csv, const Json& meta) {
    write_file(path, csv);
    write_file(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
}

std::string fixed(double x, int digits = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << x;
    return os.str();
}

std::string opt_fixed(const std::optional<double>& x) { return x ? fixed(*x) : "NA"; }

std::string label_name(RowLabel l) {
    switch (l) {
    case RowLabel::target: return "target";
    case RowLabel::non_target: return "non_target";
    case RowLabel::unknown: return "";
    }
    return "";
}

struct LoadedModel {
    FittedMethod model;
    std::vector<std::string> features;
    std::string method;
};

LoadedModel read_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    LoadedModel lm{deserialize_model(text), {}, {}};
    const Json doc = Json::parse(text, nullptr, false);
    if (doc.contains("meta") && doc["meta"].contains("features"))
        lm.features = doc["meta"]["features"].get<std::vector<std::string>>();
    if (doc.contains("meta") && doc["meta"].contains("method")) lm.method = doc["meta"]["method"].get<std::string>();
    return lm;
}

Eigen::Index model_dimension(const FittedMethod& m) {
    if (const auto* t = std::get_if<ToccModel>(&m)) return t->dimension();
    return std::get<BaselineModel>(m).dimension();
}

/// Columns of `data` in the model's feature order.
Eigen::MatrixXd align_features(const LoadedModel& lm, const DataMatrix& data) {
    if (!lm.features.empty()) {
        bool all_present = true;
        for (const auto& f : lm.features)
            all_present = all_present && std::find(data.feature_names().begin(), data.feature_names().end(), f) !=
                                             data.feature_names().end();
        if (all_present) return data.select_features(lm.features).values();
    }
    if (data.cols() != model_dimension(lm.model))
        throw InvalidArgument("data has " + std::to_string(data.cols()) + " features, the model expects " +
                              std::to_string(model_dimension(lm.model)));
    return data.values();
}

// fit

struct FitOptions {
    DataOptions data;
    std::string method = "tocc-df";
    double s = 0.9;
    Eigen::Index k = 4;
    Eigen::Index kmeans_k = 5;
    double ridge = 0.0;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_fit(const FitOptions& o, std::ostream& out) {
    const MethodId id = parse_method(o.method);
    const DataMatrix data = load_data(o.data);
    const DataMatrix target = training_rows(data);
    MethodConfig mc;
    mc.pam_k = o.k;
    mc.db.integrator.mc_samples = o.mc_samples;
    mc.baseline.gauss_ridge = o.ridge;
    mc.baseline.kmeans_k = o.kmeans_k;
    RngStream rng(o.seed, 0);
    FittedMethod model = fit_method(id, target.values(), o.s, mc, rng);
    if (auto* t = std::get_if<ToccModel>(&model)) t->set_feature_names(target.feature_names());

    Json config = data_json(o.data);
    config["s"] = o.s;
    if (id == MethodId::pam_tocc_df) config["k"] = o.k;
    if (id == MethodId::tocc_db) config["mc_samples"] = o.mc_samples;
    if (id == MethodId::gauss) config["ridge"] = o.ridge;
    if (id == MethodId::kmeans) config["kmeans_k"] = o.kmeans_k;
    Json meta = make_meta("fit", std::move(config), o.seed);
    meta["method"] = o.method;
    meta["features"] = target.feature_names();
    meta["n_train"] = target.rows();
    save_model(o.out, model, meta.dump());

    out << "fitted " << o.method << " on " << target.rows() << " rows x " << target.cols() << " features";
    if (const auto* t = std::get_if<ToccModel>(&model)) {
        out << "; thresholds:";
        for (double th : t->thresholds()) out << ' ' << format_double(th);
    } else {
        out << "; threshold: " << format_double(std::get<BaselineModel>(model).threshold());
    }
    out << "\nwrote " << o.out << '\n';
    return 0;
}

// predict / score / roc

struct ApplyOptions {
    DataOptions data;
    std::string model;
    std::string out;
};

int cmd_predict(const ApplyOptions& o, std::ostream& out) {
    const LoadedModel lm = read_model(o.model);
    const DataMatrix data = load_data(o.data);
    const Eigen::MatrixXd z = align_features(lm, data);
    const bool labelled = data.has_labels();
    std::ostringstream csv;
    std::vector<std::string> header{"row"};
    if (labelled) header.emplace_back("label");
    const auto* tocc = std::get_if<ToccModel>(&lm.model);
    const bool clustered = tocc != nullptr && tocc->variant() == ToccVariant::pam_df;
    if (clustered) header.emplace_back("cluster");
    header.emplace_back("score");
    header.emplace_back("accepted");
    write_csv_row(csv, header);

    std::vector<bool> accepted;
    std::vector<double> scores;
    std::vector<std::optional<Eigen::Index>> clusters;
    if (tocc != nullptr) {
        for (const Prediction& p : predict(*tocc, z)) {
            accepted.push_back(p.accepted);
            scores.push_back(p.score);
            clusters.push_back(p.cluster);
        }
    } else {
        for (const BaselinePrediction& p : predict_baseline(std::get<BaselineModel>(lm.model), z)) {
            accepted.push_back(p.accepted);
            scores.push_back(p.score);
            clusters.emplace_back();
        }
    }
    std::size_t n_accepted = 0;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1)};
        if (labelled) row.push_back(label_name((*data.row_labels())[i]));
        if (clustered) row.push_back(std::to_string(*clusters[i]));
        row.push_back(format_double(scores[i]));
        row.emplace_back(accepted[i] ? "true" : "false");
        write_csv_row(csv, row);
        n_accepted += accepted[i] ? 1 : 0;
    }
    Json config = data_json(o.data);
    config["model"] = o.model;
    Json meta = make_meta("predict", std::move(config), 0);
    meta.erase("seed");
    out << "accepted " << n_accepted << " of " << accepted.size() << " rows\n";
    if (labelled) {
        const ConfusionMetrics cm = confusion_metrics(accepted, *data.row_labels());
        out << "sensitivity " << opt_fixed(cm.sensitivity) << "\nspecificity " << opt_fixed(cm.specificity) << '\n';
        meta["sensitivity"] = cm.sensitivity ? Json(*cm.sensitivity) : Json(nullptr);
        meta["specificity"] = cm.specificity ? Json(*cm.specificity) : Json(nullptr);
    }
    write_csv_output(o.out, csv.str(), meta);
    out << "wrote " << o.out << '\n';
    return 0;
}

int cmd_score(const ApplyOptions& o, std::ostream& out) {
    const LoadedModel lm = read_model(o.model);
    const DataMatrix data = load_data(o.data);
    const Eigen::MatrixXd z = align_features(lm, data);
    std::ostringstream csv;
    std::vector<std::string> header{"row"};
    const auto* tocc = std::get_if<ToccModel>(&lm.model);
    if (tocc != nullptr) {
        for (Eigen::Index k = 0; k < tocc->prototype_count(); ++k) header.push_back("tp_" + std::to_string(k));
    } else {
        header.emplace_back("score");
    }
    write_csv_row(csv, header);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        std::vector<std::string> row{std::to_string(i + 1)};
        const Eigen::VectorXd zi = z.row(i).transpose();
        if (tocc != nullptr) {
            for (Eigen::Index k = 0; k < tocc->prototype_count(); ++k)
                row.push_back(format_double(tocc->score(zi, k).value));
        } else {
            row.push_back(format_double(std::get<BaselineModel>(lm.model).score(zi)));
        }
        write_csv_row(csv, row);
    }
    Json config = data_json(o.data);
    config["model"] = o.model;
    Json meta = make_meta("score", std::move(config), 0);
    meta.erase("seed");
    write_csv_output(o.out, csv.str(), meta);
    out << "scored " << z.rows() << " rows\nwrote " << o.out << '\n';
    return 0;
}

int cmd_roc(const ApplyOptions& o, std::ostream& out) {
    const LoadedModel lm = read_model(o.model);
    const DataMatrix data = load_data(o.data);
    if (!data.has_labels()) throw InvalidArgument("roc needs labelled data (--label-column and --target-labels)");
    const Eigen::MatrixXd z = align_features(lm, data);
    const MethodOutput mo = apply_method(lm.model, z);
    const RocCurve roc = roc_curve(mo.typicality, *data.row_labels());
    std::ostringstream csv;
    write_roc_csv(csv, roc);
    Json config = data_json(o.data);
    config["model"] = o.model;
    Json meta = make_meta("roc", std::move(config), 0);
    meta.erase("seed");
    meta["auc"] = roc.auc;
    write_csv_output(o.out, csv.str(), meta);
    out << "auc " << fixed(roc.auc, 4) << "\nwrote " << o.out << '\n';
    return 0;
}

// reduce / vip

struct ReduceOptions {
    DataOptions data;
    std::string method = "pca";
    Eigen::Index d = 2;
    std::string components = "last";
    int b1 = 101;
    int b2 = 50;
    double kappa = 0.5;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
};

struct VipResult {
    std::vector<Eigen::MatrixXd> projections;
    VipRanking vip;
    KappaSelection selection;
};

VipResult run_vip(const DataMatrix& target, Eigen::Index d, int b1, int b2, double kappa, std::size_t n_keep,
                  std::uint64_t seed, unsigned threads) {
    VipResult r;
    r.projections = rp_select(target.values(), d, b1, b2, RngStream(seed, 1).derive(0), threads);
    r.vip = compute_vip(r.projections, column_standard_deviations(target.values()));
    const Eigen::MatrixXd corr = correlation_matrix(target.values(), target.feature_names());
    r.selection = kappa_vip_select(r.vip, corr, kappa, n_keep);
    return r;
}

int cmd_reduce(const ReduceOptions& o, std::ostream& out) {
    const DataMatrix data = load_data(o.data);
    const DataMatrix target = training_rows(data);
    Json config = data_json(o.data);
    config["method"] = o.method;
    config["d"] = o.d;
    std::ostringstream csv;
    std::uint64_t seed = 0;
    if (o.method == "pca") {
        config["components"] = o.components;
        const PcaReduction red = pca_reduce(target.values(), o.d,
                                            o.components == "first" ? ComponentEnd::first : ComponentEnd::last);
        const Eigen::MatrixXd projected = red.transform.apply(data.values());
        std::vector<std::string> names;
        for (Eigen::Index j = 0; j < o.d; ++j) names.push_back("pc" + std::to_string(j + 1));
        const DataMatrix reduced = data.has_labels() ? DataMatrix(projected, names, *data.row_labels())
                                                     : DataMatrix(projected, names);
        write_data_csv(csv, reduced);
        out << "retained variances:";
        for (Eigen::Index j = 0; j < red.retained_variances.size(); ++j)
            out << ' ' << format_double(red.retained_variances(j));
        out << '\n';
    } else if (o.method == "kvip") {
        seed = o.seed;
        config["b1"] = o.b1;
        config["b2"] = o.b2;
        config["kappa"] = o.kappa;
        const VipResult v = run_vip(target, o.d, o.b1, o.b2, o.kappa, static_cast<std::size_t>(o.d), o.seed, o.threads);
        const DataMatrix reduced = data.select_features(v.selection.selected);
        write_data_csv(csv, reduced);
        out << "selected:";
        for (const auto& n : reduced.feature_names()) out << ' ' << n;
        out << (v.selection.complete ? "\n" : " (fewer than d features passed the correlation filter)\n");
    } else {
        seed = o.seed;
        config["b1"] = o.b1;
        config["b2"] = o.b2;
        const auto projections = rp_select(target.values(), o.d, o.b1, o.b2, RngStream(o.seed, 1).derive(0), o.threads);
        std::vector<std::string> header{"projection", "feature"};
        for (Eigen::Index q = 0; q < o.d; ++q) header.push_back("a" + std::to_string(q + 1));
        write_csv_row(csv, header);
        for (std::size_t i = 0; i < projections.size(); ++i)
            for (Eigen::Index u = 0; u < projections[i].rows(); ++u) {
                std::vector<std::string> row{std::to_string(i + 1), target.feature_names()[static_cast<std::size_t>(u)]};
                for (Eigen::Index q = 0; q < o.d; ++q) row.push_back(format_double(projections[i](u, q)));
                write_csv_row(csv, row);
            }
        out << "selected " << projections.size() << " projections\n";
    }
    Json meta = make_meta("reduce", std::move(config), seed);
    if (o.method == "pca") meta.erase("seed");
    write_csv_output(o.out, csv.str(), meta);
    out << "wrote " << o.out << '\n';
    return 0;
}

struct VipOptions {
    DataOptions data;
    Eigen::Index d = 2;
    int b1 = 101;
    int b2 = 50;
    double kappa = 0.5;
    std::size_t n_keep = 2;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
};

int cmd_vip(const VipOptions& o, std::ostream& out) {
    const DataMatrix data = load_data(o.data);
    const DataMatrix target = training_rows(data);
    const VipResult v = run_vip(target, o.d, o.b1, o.b2, o.kappa, o.n_keep, o.seed, o.threads);
    std::ostringstream csv;
    write_vip_csv(csv, v.vip, target.feature_names(), v.selection.selected);
    Json config = data_json(o.data);
    config["d"] = o.d;
    config["b1"] = o.b1;
    config["b2"] = o.b2;
    config["kappa"] = o.kappa;
    config["n_keep"] = o.n_keep;
    Json meta = make_meta("vip", std::move(config), o.seed);
    std::vector<std::string> selected;
    for (Eigen::Index u : v.selection.selected) selected.push_back(target.feature_names()[static_cast<std::size_t>(u)]);
    meta["selected"] = selected;
    meta["complete"] = v.selection.complete;
    write_csv_output(o.out, csv.str(), meta);
    out << "ranking:";
    for (Eigen::Index u : v.vip.ranking)
        out << ' ' << target.feature_names()[static_cast<std::size_t>(u)] << '=' << fixed(v.vip.vip(u));
    out << "\nselected:";
    for (const auto& n : selected) out << ' ' << n;
    if (!v.selection.complete) out << " (incomplete)";
    out << "\nwrote " << o.out << '\n';
    return 0;
}

// simulate / bench

struct ScenarioOptions {
    std::string scenario = "a";
    double lambda = 1.0;
    std::size_t n_target = 500;
    std::size_t n_nontarget = 0; // 0: half of n_target
    double box_scale = 3.0;
};

void add_scenario_options(CLI::App* sub, ScenarioOptions& o) {
    sub->add_option("--scenario", o.scenario, "Scenario a-i")
        ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f", "g", "h", "i"}));
    sub->add_option("--lambda", o.lambda, "Non-target mean shift (scenarios a-d)");
    sub->add_option("--n-target", o.n_target, "Target sample size")->check(CLI::PositiveNumber);
    sub->add_option("--n-nontarget", o.n_nontarget, "Non-target sample size (0: n-target / 2)");
    sub->add_option("--box-scale", o.box_scale, "Box side in IQR units (scenarios e-h)");
}

ScenarioSpec scenario_spec(const ScenarioOptions& o) {
    ScenarioSpec spec;
    spec.id = parse_scenario(o.scenario);
    spec.lambda = o.lambda;
    spec.n_target = o.n_target;
    if (o.n_nontarget > 0) spec.n_nontarget = o.n_nontarget;
    spec.box_scale = o.box_scale;
    return spec;
}

Json scenario_json(const ScenarioSpec& s) {
    return Json{{"scenario", std::string(to_string(s.id))}, {"n_target", s.n_target},
                {"n_nontarget", s.nontarget_count()},        {"lambda", s.lambda},
                {"box_scale", s.box_scale},                  {"correlation", s.correlation}};
}

struct SimulateOptions {
    ScenarioOptions scenario;
    std::uint64_t seed = 1;
    std::uint64_t replication = 0;
    std::string out;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    ScenarioSpec spec = scenario_spec(o.scenario);
    spec.seed = o.seed;
    spec.stream_id = o.replication;
    const Scenario sc = generate(spec);
    std::ostringstream csv;
    write_data_csv(csv, sc.combined());
    Json config = scenario_json(spec);
    config["replication"] = o.replication;
    Json meta = make_meta("simulate", std::move(config), o.seed);
    if (sc.box_lower) {
        meta["box_lower"] = {(*sc.box_lower)(0), (*sc.box_lower)(1)};
        meta["box_upper"] = {(*sc.box_upper)(0), (*sc.box_upper)(1)};
    }
    write_csv_output(o.out, csv.str(), meta);
    out << "generated scenario " << o.scenario.scenario << ": " << sc.target.rows() << " target, "
        << sc.nontarget.rows() << " non-target rows\nwrote " << o.out << '\n';
    return 0;
}

struct BenchOptions {
    ScenarioOptions scenario;
    std::vector<std::string> methods;
    int reps = 20;
    double s = 0.9;
    Eigen::Index k = 5;
    std::size_t mc_samples = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool timing = false;
    std::string out;
    std::string summary;
};

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    BenchmarkConfig cfg;
    cfg.scenario = scenario_spec(o.scenario);
    if (!o.methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : o.methods) cfg.methods.push_back(parse_method(m));
    }
    cfg.replications = o.reps;
    cfg.s = o.s;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.method.pam_k = o.k;
    cfg.method.db.integrator.mc_samples = o.mc_samples;
    const BenchmarkReport report = run_benchmark(cfg);

    Json config = scenario_json(cfg.scenario);
    config["replications"] = o.reps;
    config["s"] = o.s;
    config["k"] = o.k;
    config["mc_samples"] = o.mc_samples;
    Json methods = Json::array();
    for (MethodId m : cfg.methods) methods.push_back(std::string(to_string(m)));
    config["methods"] = methods;
    const Json meta = make_meta("bench", config, o.seed);

    std::ostringstream csv;
    write_benchmark_csv(csv, report, o.timing);
    write_csv_output(o.out, csv.str(), meta);
    const std::string summary_path = o.summary.empty() ? o.out + ".summary.json" : o.summary;
    write_file(summary_path, benchmark_summary_json(report, meta.dump(), o.timing));

    out << "method        spec.median  spec.q1  spec.q3  auc.median  failures";
    if (o.timing) out << "  seconds";
    out << '\n';
    for (const auto& s : report.summaries) {
        std::string name(to_string(s.method));
        name.resize(std::max<std::size_t>(name.size(), 13), ' ');
        out << name << ' ' << std::setw(11) << (s.specificity ? fixed(s.specificity->median) : "NA") << "  "
            << std::setw(7) << (s.specificity ? fixed(s.specificity->q1) : "NA") << "  " << std::setw(7)
            << (s.specificity ? fixed(s.specificity->q3) : "NA") << "  " << std::setw(10)
            << (s.auc ? fixed(s.auc->median) : "NA") << "  " << std::setw(8) << s.failures;
        if (o.timing) out << "  " << fixed(s.total_seconds, 2);
        out << '\n';
    }
    out << "wrote " << o.out << " and " << summary_path << '\n';
    return 0;
}

// glass-repro

struct GlassOptions {
    GlassReproConfig config;
    std::string data = std::string(TOCC_DATA_DIR) + "/glass.data";
    std::string subset = "float-windows";
    std::string normalize_by;
    bool timing = false;
    std::string out_dir = "glass-repro";
};

int cmd_glass(GlassOptions o, std::ostream& out) {
    o.config.data = o.data;
    o.config.subset = parse_glass_subset(o.subset);
    if (!o.normalize_by.empty()) o.config.normalize_by = o.normalize_by;
    const GlassReproResult r = run_glass_repro(o.config);
    const auto& c = o.config;

    Json config{{"data", o.data},   {"glass_subset", o.subset}, {"s", c.s},   {"kappa", c.kappa},
                {"d", c.d},         {"b1", c.b1},               {"b2", c.b2}, {"k", c.k},
                {"mc_samples", c.mc_samples}};
    if (!o.normalize_by.empty()) config["normalize_by"] = o.normalize_by;
    const Json meta = make_meta("glass-repro", config, c.seed);
    const fs::path dir(o.out_dir);

    const std::vector<ToccVariant> variants{ToccVariant::df, ToccVariant::db, ToccVariant::pam_df};
    const std::vector<Reduction> reductions{Reduction::pca, Reduction::rp, Reduction::kvip};
    auto table = [&](auto value) {
        std::ostringstream csv;
        write_csv_row(csv, {"method", "pca", "rp", "kvip", "varsel"});
        for (ToccVariant v : variants) {
            std::vector<std::string> row{std::string(to_string(v))};
            for (Reduction red : reductions) row.push_back(value(find_cell(r, v, red)));
            row.emplace_back("n/a");
            write_csv_row(csv, row);
        }
        return csv.str();
    };
    const std::string auc = table([](const GlassCell& cell) { return cell.auc ? format_double(*cell.auc) : "NA"; });
    const std::string spec =
        table([](const GlassCell& cell) { return cell.specificity ? format_double(*cell.specificity) : "NA"; });
    write_csv_output(dir / "auc.csv", auc, meta);
    write_csv_output(dir / "specificity.csv", spec, meta);
    if (o.timing)
        write_csv_output(dir / "seconds.csv", table([](const GlassCell& cell) { return format_double(cell.seconds); }),
                         meta);

    std::ostringstream vip;
    write_vip_csv(vip, r.vip, r.features, r.selection.selected);
    write_csv_output(dir / "vip.csv", vip.str(), meta);

    std::ostringstream roc;
    write_csv_row(roc, {"method", "reduction", "fpr", "tpr"});
    for (const auto& cell : r.cells)
        for (const auto& p : cell.roc.points)
            write_csv_row(roc, {std::string(to_string(cell.variant)), std::string(to_string(cell.reduction)),
                                format_double(p.fpr), format_double(p.tpr)});
    write_csv_output(dir / "roc.csv", roc.str(), meta);

    Json report = meta;
    report["n_target"] = r.n_target;
    report["n_nontarget"] = r.n_nontarget;
    std::vector<std::string> selected;
    for (Eigen::Index u : r.selection.selected) selected.push_back(r.features[static_cast<std::size_t>(u)]);
    report["selected_features"] = selected;
    report["selection_complete"] = r.selection.complete;
    Json cells = Json::array();
    for (const auto& cell : r.cells) {
        Json j{{"method", std::string(to_string(cell.variant))},
               {"reduction", std::string(to_string(cell.reduction))},
               {"auc", cell.auc ? Json(*cell.auc) : Json(nullptr)},
               {"sensitivity", cell.sensitivity ? Json(*cell.sensitivity) : Json(nullptr)},
               {"specificity", cell.specificity ? Json(*cell.specificity) : Json(nullptr)}};
        if (!cell.cluster_sizes.empty()) j["cluster_sizes"] = cell.cluster_sizes;
        if (!cell.error.empty()) j["error"] = cell.error;
        if (o.timing) j["seconds"] = cell.seconds;
        cells.push_back(std::move(j));
    }
    report["results"] = std::move(cells);
    report["varsel"] = "not implemented; reported as n/a";
    write_file(dir / "report.json", report.dump(2) + "\n");

    out << "glass: " << r.n_target << " target rows, " << r.n_nontarget << " non-target rows\n";
    out << "kappa-VIP selected:";
    for (const auto& n : selected) out << ' ' << n;
    out << "\n\nAUC\n";
    auto print = [&](const char* title, auto value) {
        out << title << "\nmethod        pca     rp      kvip    varsel\n";
        for (ToccVariant v : variants) {
            std::string name(to_string(v));
            name.resize(13, ' ');
            out << name << ' ';
            for (Reduction red : reductions) {
                std::string cell = value(find_cell(r, v, red));
                cell.resize(std::max<std::size_t>(cell.size(), 7), ' ');
                out << cell << ' ';
            }
            out << "n/a\n";
        }
    };
    print("", [](const GlassCell& cell) { return cell.auc ? fixed(*cell.auc) : std::string("NA"); });
    out << '\n';
    print("specificity at s = 0.9",
          [](const GlassCell& cell) { return cell.specificity ? fixed(*cell.specificity) : std::string("NA"); });
    if (o.timing) {
        out << '\n';
        print("seconds (fit + score)", [](const GlassCell& cell) { return fixed(cell.seconds, 3); });
    }
    for (const auto& cell : r.cells)
        if (!cell.error.empty())
            out << "warning: " << to_string(cell.variant) << '/' << to_string(cell.reduction) << ": " << cell.error
                << '\n';
    out << "wrote " << dir.string() << '\n';
    return 0;
}

std::string error_code(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e) != nullptr) return "usage";
    if (dynamic_cast<const ConvergenceError*>(&e) != nullptr) return "convergence";
    if (dynamic_cast<const DegenerateData*>(&e) != nullptr) return "degenerate-data";
    if (dynamic_cast<const InvalidArgument*>(&e) != nullptr) return "invalid-argument";
    if (dynamic_cast<const Error*>(&e) != nullptr) return "error";
    if (dynamic_cast<const fs::filesystem_error*>(&e) != nullptr) return "io";
    return "internal";
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transvariation-based one-class classification", "tocc"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", std::string(library_version()));

    std::uint64_t seed = 1;
    try {
        seed = default_seed();
    } catch (const std::exception& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    FitOptions fit;
    fit.seed = seed;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a classifier on the target rows and save it");
    add_data_options(fit_cmd, fit.data);
    fit_cmd->add_option("--method", fit.method, "tocc-df, tocc-db, pam-tocc-df, gauss, mix-gauss, kde or kmeans");
    fit_cmd->add_option("--s", fit.s, "Target sensitivity");
    fit_cmd->add_option("--k", fit.k, "Clusters for pam-tocc-df");
    fit_cmd->add_option("--kmeans-k", fit.kmeans_k, "Centroids for kmeans");
    fit_cmd->add_option("--ridge", fit.ridge, "Relative covariance ridge for gauss");
    fit_cmd->add_option("--mc-samples", fit.mc_samples, "Monte Carlo sample size for tocc-db");
    fit_cmd->add_option("--seed", fit.seed, "Random seed");
    fit_cmd->add_option("--out", fit.out, "Model file")->required();

    ApplyOptions predict_o, score_o, roc_o;
    auto* predict_cmd = app.add_subcommand("predict", "Accept or reject every row with a saved model");
    auto* score_cmd = app.add_subcommand("score", "Transvariation scores of every row against every prototype");
    auto* roc_cmd = app.add_subcommand("roc", "ROC curve and AUC of a saved model on labelled data");
    for (auto [cmd, o] : {std::pair{predict_cmd, &predict_o}, std::pair{score_cmd, &score_o}, std::pair{roc_cmd, &roc_o}}) {
        cmd->add_option("--model", o->model, "Model file")->required();
        add_data_options(cmd, o->data);
        cmd->add_option("--out", o->out, "Output CSV")->required();
    }

    ReduceOptions reduce;
    reduce.seed = seed;
    auto* reduce_cmd = app.add_subcommand("reduce", "Dimension reduction fitted on the target rows");
    add_data_options(reduce_cmd, reduce.data);
    reduce_cmd->add_option("--method", reduce.method, "pca, kvip or rp")->check(CLI::IsMember({"pca", "kvip", "rp"}));
    reduce_cmd->add_option("--d", reduce.d, "Output dimension")->check(CLI::PositiveNumber);
    reduce_cmd->add_option("--components", reduce.components, "Principal components kept (pca)")
        ->check(CLI::IsMember({"last", "first"}));
    reduce_cmd->add_option("--b1", reduce.b1, "Projections kept (odd)");
    reduce_cmd->add_option("--b2", reduce.b2, "Candidates per projection");
    reduce_cmd->add_option("--kappa", reduce.kappa, "Correlation cap for kvip");
    reduce_cmd->add_option("--seed", reduce.seed, "Random seed");
    reduce_cmd->add_option("--threads", reduce.threads, "Worker threads");
    reduce_cmd->add_option("--out", reduce.out, "Output CSV")->required();

    VipOptions vip;
    vip.seed = seed;
    auto* vip_cmd = app.add_subcommand("vip", "Variable importance from selected random projections");
    add_data_options(vip_cmd, vip.data);
    vip_cmd->add_option("--d", vip.d, "Projection dimension")->check(CLI::PositiveNumber);
    vip_cmd->add_option("--b1", vip.b1, "Projections kept (odd)");
    vip_cmd->add_option("--b2", vip.b2, "Candidates per projection");
    vip_cmd->add_option("--kappa", vip.kappa, "Mean absolute correlation cap");
    vip_cmd->add_option("--n-keep", vip.n_keep, "Features to select")->check(CLI::PositiveNumber);
    vip_cmd->add_option("--seed", vip.seed, "Random seed");
    vip_cmd->add_option("--threads", vip.threads, "Worker threads");
    vip_cmd->add_option("--out", vip.out, "Output CSV")->required();

    SimulateOptions sim;
    sim.seed = seed;
    auto* sim_cmd = app.add_subcommand("simulate", "Write one synthetic scenario draw as labelled CSV");
    add_scenario_options(sim_cmd, sim.scenario);
    sim_cmd->add_option("--seed", sim.seed, "Random seed");
    sim_cmd->add_option("--replication", sim.replication, "Replication index (stream)");
    sim_cmd->add_option("--out", sim.out, "Output CSV")->required();

    BenchOptions bench;
    bench.seed = seed;
    auto* bench_cmd = app.add_subcommand("bench", "Replicated comparison of classifiers on a scenario");
    add_scenario_options(bench_cmd, bench.scenario);
    bench_cmd->add_option("--methods", bench.methods, "Methods to run (default: all)")->delimiter(',');
    bench_cmd->add_option("--reps", bench.reps, "Replications")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--s", bench.s, "Target sensitivity");
    bench_cmd->add_option("--k", bench.k, "Clusters for pam-tocc-df");
    bench_cmd->add_option("--mc-samples", bench.mc_samples, "Monte Carlo sample size for tocc-db");
    bench_cmd->add_option("--seed", bench.seed, "Random seed");
    bench_cmd->add_option("--threads", bench.threads, "Worker threads");
    bench_cmd->add_flag("--timing", bench.timing, "Include wall-clock seconds in the outputs");
    bench_cmd->add_option("--out", bench.out, "Per-replication CSV")->required();
    bench_cmd->add_option("--summary", bench.summary, "Summary JSON (default: <out>.summary.json)");

    GlassOptions glass;
    glass.config.seed = seed;
    auto* glass_cmd = app.add_subcommand("glass-repro", "Glass fragment study: 3 classifiers x 3 reductions");
    glass_cmd->add_option("--data", glass.data, "UCI glass file");
    glass_cmd->add_option("--glass-subset", glass.subset, "Target rows")
        ->check(CLI::IsMember({"float-windows", "all-windows"}));
    glass_cmd->add_option("--normalize-by", glass.normalize_by, "Divide every feature by this column and drop it");
    glass_cmd->add_option("--s", glass.config.s, "Target sensitivity");
    glass_cmd->add_option("--kappa", glass.config.kappa, "Correlation cap for kappa-VIP");
    glass_cmd->add_option("--d", glass.config.d, "Reduced dimension")->check(CLI::PositiveNumber);
    glass_cmd->add_option("--b1", glass.config.b1, "Projections kept (odd)");
    glass_cmd->add_option("--b2", glass.config.b2, "Candidates per projection");
    glass_cmd->add_option("--k", glass.config.k, "Clusters for pam-tocc-df");
    glass_cmd->add_option("--mc-samples", glass.config.mc_samples, "Monte Carlo sample size for tocc-db");
    glass_cmd->add_option("--seed", glass.config.seed, "Random seed");
    glass_cmd->add_option("--threads", glass.config.threads, "Worker threads");
    glass_cmd->add_flag("--timing", glass.timing, "Report wall-clock seconds");
    glass_cmd->add_option("--out-dir", glass.out_dir, "Output directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << library_version() << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit, out);
        if (predict_cmd->parsed()) return cmd_predict(predict_o, out);
        if (score_cmd->parsed()) return cmd_score(score_o, out);
        if (roc_cmd->parsed()) return cmd_roc(roc_o, out);
        if (reduce_cmd->parsed()) return cmd_reduce(reduce, out);
        if (vip_cmd->parsed()) return cmd_vip(vip, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        if (bench_cmd->parsed()) return cmd_bench(bench, out);
        if (glass_cmd->parsed()) return cmd_glass(glass, out);
    } catch (const std::exception& e) {
        const std::string code = error_code(e);
        err << "error: " << code << ": " << one_line(e.what()) << '\n';
        return code == "usage" || code == "invalid-argument" ? 2 : 1;
    }
    err << "error: usage: no subcommand\n";
    return 2;
}

} // namespace tocc::cli
