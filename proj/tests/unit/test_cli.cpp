#include <doctest.h>

#include "cli.hpp"

#include <tocc/classifier.hpp>
#include <tocc/io.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run tool(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = tocc::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tocc-cli-tests";
    fs::create_directories(dir);
    return dir / name;
}

const std::string glass = TOCC_DATA_DIR "/glass.data";

} // namespace

TEST_CASE("fit, predict, score and roc on glass") {
    const std::string model = scratch("pam.json").string();
    const Run fit = tool({"fit", "--data", glass, "--format", "uci-glass", "--features", "Si,Mg", "--method",
                          "pam-tocc-df", "--k", "4", "--out", model});
    REQUIRE_MESSAGE(fit.code == 0, fit.err);
    const auto loaded = tocc::load_model(model);
    const auto& m = std::get<tocc::ToccModel>(loaded);
    CHECK(m.thresholds().size() == 4);

    const std::string pred = scratch("pred.csv").string();
    REQUIRE(tool({"predict", "--model", model, "--data", glass, "--format", "uci-glass", "--out", pred}).code == 0);
    std::ifstream in(pred);
    const tocc::CsvTable table = tocc::parse_csv(in);
    CHECK(table.header == std::vector<std::string>{"row", "label", "cluster", "score", "accepted"});
    REQUIRE(table.rows.size() == 138);

    const tocc::DataMatrix data =
        tocc::load_uci_glass(glass).select_features(std::vector<std::string>{"Si", "Mg"});
    const auto direct = tocc::predict(m, data.values());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        CHECK(std::stod(table.rows[i][3]) == direct[i].score);
        CHECK((table.rows[i][4] == "true") == direct[i].accepted);
        CHECK(std::stoll(table.rows[i][2]) == *direct[i].cluster);
    }
    CHECK(fs::exists(pred + ".meta.json"));

    const std::string scores = scratch("scores.csv").string();
    CHECK(tool({"score", "--model", model, "--data", glass, "--format", "uci-glass", "--out", scores}).code == 0);
    const std::string roc = scratch("roc.csv").string();
    const Run r = tool({"roc", "--model", model, "--data", glass, "--format", "uci-glass", "--out", roc});
    CHECK(r.code == 0);
    CHECK(r.out.find("auc") != std::string::npos);
}

TEST_CASE("bench output is byte-identical across runs") {
    const std::string a = scratch("bench-a.csv").string();
    const std::string b = scratch("bench-b.csv").string();
    const std::vector<std::string> common{"bench", "--scenario", "a", "--lambda", "2", "--reps", "20", "--seed", "7",
                                          "--methods", "tocc-df,pam-tocc-df,gauss,kde,kmeans"};
    auto args_a = common;
    args_a.insert(args_a.end(), {"--out", a});
    auto args_b = common;
    args_b.insert(args_b.end(), {"--out", b, "--threads", "3"});
    const Run ra = tool(args_a);
    const Run rb = tool(args_b);
    REQUIRE_MESSAGE(ra.code == 0, ra.err);
    REQUIRE(rb.code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a + ".summary.json") == slurp(b + ".summary.json"));
}

TEST_CASE("simulate, vip and reduce are deterministic") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"simulate", "--scenario", "e", "--seed", "3"},
             {"vip", "--data", glass, "--format", "uci-glass", "--b1", "21", "--b2", "10", "--seed", "3"},
             {"reduce", "--data", glass, "--format", "uci-glass", "--method", "pca", "--d", "2"},
             {"reduce", "--data", glass, "--format", "uci-glass", "--method", "rp", "--b1", "11", "--seed", "3"}}) {
        const std::string a = scratch("det-a.csv").string();
        const std::string b = scratch("det-b.csv").string();
        auto x = args;
        x.insert(x.end(), {"--out", a});
        auto y = args;
        y.insert(y.end(), {"--out", b});
        const Run rx = tool(x);
        REQUIRE_MESSAGE(rx.code == 0, rx.err);
        REQUIRE(tool(y).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK_FALSE(slurp(a).empty());
    }
}

TEST_CASE("errors print one coded line") {
    const Run missing = tool({"fit", "--data", "/nonexistent.csv", "--out", scratch("x.json").string()});
    CHECK(missing.code == 2);
    CHECK(missing.err.rfind("error: invalid-argument: ", 0) == 0);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const Run usage = tool({"fit", "--bogus"});
    CHECK(usage.code == 2);
    CHECK(usage.err.rfind("error: usage: ", 0) == 0);

    const Run none = tool({});
    CHECK(none.code == 2);

    const Run degenerate = tool({"fit", "--data", glass, "--format", "uci-glass", "--features", "Si,Mg", "--method",
                                 "pam-tocc-df", "--k", "40", "--out", scratch("y.json").string()});
    CHECK(degenerate.code == 1);
    CHECK(degenerate.err.rfind("error: degenerate-data: ", 0) == 0);
}

TEST_CASE("seed comes from the environment when not given") {
    ::unsetenv("TOCC_SEED");
    CHECK(tocc::cli::default_seed() == 1);
    ::setenv("TOCC_SEED", "99", 1);
    CHECK(tocc::cli::default_seed() == 99);
    const std::string a = scratch("env-a.csv").string();
    const std::string b = scratch("env-b.csv").string();
    REQUIRE(tool({"simulate", "--scenario", "a", "--out", a}).code == 0);
    REQUIRE(tool({"simulate", "--scenario", "a", "--seed", "99", "--out", b}).code == 0);
    ::unsetenv("TOCC_SEED");
    CHECK(slurp(a) == slurp(b));
}
