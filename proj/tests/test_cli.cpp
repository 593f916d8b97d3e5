#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rieszlab/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using rieszlab::run_cli;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> meta;
};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') csv.meta.push_back(line);
        else if (csv.header.empty()) csv.header = split(line, ',');
        else csv.rows.push_back(split(line, ','));
    }
    return csv;
}

bool has_meta(const Csv& csv, const std::string& prefix) {
    for (const auto& m : csv.meta)
        if (m.rfind(prefix, 0) == 0) return true;
    return false;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    return path;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
    Run h = cli({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("riesz-norm") != std::string::npos);
    CHECK(h.out.find("witness") != std::string::npos);

    Run v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("rieszlab") != std::string::npos);

    Run bad = cli({"frobnicate"});
    CHECK(bad.code == 2);
    CHECK(bad.out.empty());
}

TEST_CASE("classify reports the radial verdict as JSON") {
    Run star = cli({"classify", "--symbol", "expr:exp(-(x*x+y*y))"});
    REQUIRE(star.code == 0);
    json js = json::parse(star.out);
    CHECK(js.at("verdict") == "StarCondition");
    CHECK(js.at("config").at("command") == "classify");
    CHECK(js.contains("config_hash"));
    CHECK(js.at("version") == rieszlab::version_string());

    Run osc = cli({"classify", "--symbol", "dyadic_cos"});
    REQUIRE(osc.code == 0);
    CHECK(json::parse(osc.out).at("verdict") == "IIa");

    Run step = cli({"classify", "--symbol", "dyadic_step"});
    REQUIRE(step.code == 0);
    CHECK(json::parse(step.out).at("verdict") == "IIb");
}

TEST_CASE("riesz-norm: unit product mass, bounded tail, metadata block") {
    Run r = cli({"riesz-norm", "--s-min", "1", "--s-max", "4"});
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    CHECK(csv.header ==
          std::vector<std::string>{"s", "product_norm", "product_err", "tail_norm", "tail_err"});
    REQUIRE(csv.rows.size() == 4);
    for (const auto& row : csv.rows) {
        CHECK(std::fabs(std::stod(row[1]) - 1.0) <= 1e-6);
        CHECK(std::stod(row[3]) <= 2.0 + 1e-6);
    }
    CHECK(has_meta(csv, "# config:"));
    CHECK(has_meta(csv, "# config_hash:"));
    CHECK(has_meta(csv, "# seed:"));
    CHECK(has_meta(csv, "# version:"));
}

TEST_CASE("malformed configs exit 2 without partial output") {
    const auto bad_type = temp_file("rieszlab_bad_type.json", "{\"s_min\": \"banana\"}");
    Run r1 = cli({"riesz-norm", "--config", bad_type.string()});
    CHECK(r1.code == 2);
    CHECK(r1.out.empty());
    CHECK(r1.err.find("[config]") != std::string::npos);

    const auto unknown = temp_file("rieszlab_unknown_key.json", "{\"frobnicate\": 1}");
    Run r2 = cli({"witness", "--config", unknown.string()});
    CHECK(r2.code == 2);
    CHECK(r2.out.empty());

    Run r3 = cli({"z-growth", "--config", "/nonexistent/rieszlab.json"});
    CHECK(r3.code == 2);
    CHECK(r3.out.empty());

    const auto syntax = temp_file("rieszlab_syntax.json", "{not json");
    Run r4 = cli({"riesz-norm", "--config", syntax.string()});
    CHECK(r4.code == 2);
    CHECK(r4.out.empty());
}

TEST_CASE("flags override config-file values") {
    const auto cfg = temp_file("rieszlab_override.json", "{\"s_min\": 1, \"s_max\": 3}");
    Run r = cli({"riesz-norm", "--config", cfg.string(), "--s-max", "1"});
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    CHECK(csv.rows.size() == 1);
    // The echoed config reflects the effective values.
    CHECK(csv.meta[0].find("\"s_max\":1") != std::string::npos);
}

TEST_CASE("z-growth emits the ladder profile") {
    Run r = cli({"z-growth", "--s-min", "2", "--s-max", "3", "--ratio", "16", "--mode", "mc",
                 "--samples", "60000"});
    REQUIRE(r.code == 0);
    Csv csv = parse_csv(r.out);
    REQUIRE(csv.rows.size() == 2);
    const double n2 = std::stod(csv.rows[0][1]);
    const double n3 = std::stod(csv.rows[1][1]);
    CHECK(n2 == doctest::Approx(0.928).epsilon(0.05));
    CHECK(n3 == doctest::Approx(1.255).epsilon(0.05));
    CHECK(std::stod(csv.rows[0][3]) == doctest::Approx(n2 / 2.0));
    CHECK(std::stod(csv.rows[1][3]) == doctest::Approx(n3 / 3.0));

    Run bad = cli({"z-growth", "--variant", "sideways"});
    CHECK(bad.code == 2);
}

TEST_CASE("scheme: construct, verify, and validate parameters") {
    Run r = cli({"scheme", "--symbol", "dyadic_cos", "--case", "IIa", "--s", "2"});
    REQUIRE(r.code == 0);
    json js = json::parse(r.out);
    CHECK(js.at("all_pass") == true);
    CHECK(js.at("scheme").at("format") == "rieszlab-scheme/1");
    CHECK(js.at("verification").at("A").at("pass") == true);

    Run nzero = cli({"scheme", "--n", "0"});
    CHECK(nzero.code == 2);
    CHECK(nzero.out.empty());

    // The even symbol cannot meet the one-sided targets: math-stage failure.
    Run impossible = cli({"scheme", "--symbol", "dyadic_cos", "--case", "IIb", "--s", "2"});
    CHECK(impossible.code == 1);
    CHECK(impossible.out.empty());
    CHECK(impossible.err.find("[stage:construct]") != std::string::npos);
}

TEST_CASE("transfer-check: exact identity and bounded inverse-transform norms") {
    Run r = cli({"transfer-check", "--s", "2", "--theta", "2", "--points", "40", "--samples",
                 "40000"});
    REQUIRE(r.code == 0);
    json js = json::parse(r.out);
    CHECK(js.at("theta") == 2);
    CHECK(js.at("theta_searched") == false);
    CHECK(js.at("max_residual").get<double>() <= 1e-9);
    CHECK(js.at("h_inv_ft").at("value").get<double>() <= 2.1);
    CHECK(js.at("ratio_inv_ft").at("value").get<double>() > 0.0);

    Run searched = cli({"transfer-check", "--s", "2", "--points", "20", "--samples", "30000"});
    REQUIRE(searched.code == 0);
    json sj = json::parse(searched.out);
    CHECK(sj.at("theta_searched") == true);
    CHECK_FALSE(sj.at("theta_trace").empty());
}

TEST_CASE("witness: reruns are byte-identical and JSON matches the CSV") {
    const std::vector<std::string> args = {"witness", "--s-min", "1",       "--s-max", "2",
                                           "--c-hat", "0.346",  "--samples", "40000"};
    Run a = cli(args);
    Run b = cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    Csv csv = parse_csv(a.out);
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[0][0] == "1");
    CHECK(csv.rows[1][0] == "2");
    CHECK(has_meta(csv, "# note:"));
    CHECK(has_meta(csv, "# config_hash:"));
}

TEST_CASE("out-dir writes the same bytes as standard output") {
    const auto dir = std::filesystem::temp_directory_path() / "rieszlab_cli_out";
    std::filesystem::remove_all(dir);
    Run r = cli({"witness", "--s-min", "1", "--s-max", "1", "--c-hat", "0.346", "--samples",
                 "30000", "--out-dir", dir.string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "witness.csv") == r.out);
    json js = json::parse(slurp(dir / "witness.json"));
    CHECK(js.at("reports").size() == 1);
    CHECK(js.at("config").at("command") == "witness");

    Run s = cli({"scheme", "--s", "2", "--out-dir", dir.string()});
    REQUIRE(s.code == 0);
    CHECK(slurp(dir / "scheme.json") == s.out);
}

TEST_CASE("seed flag feeds the estimators and the echo") {
    Run a = cli({"z-growth", "--s-min", "2", "--s-max", "2", "--mode", "mc", "--samples",
                 "30000"});
    Run b = cli({"z-growth", "--s-min", "2", "--s-max", "2", "--mode", "mc", "--samples",
                 "30000", "--seed", "7"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out != b.out);
    // Same protocol, different stream: estimates agree within both error bars.
    Csv ca = parse_csv(a.out), cb = parse_csv(b.out);
    const double da = std::stod(ca.rows[0][1]), db = std::stod(cb.rows[0][1]);
    const double ea = std::stod(ca.rows[0][2]), eb = std::stod(cb.rows[0][2]);
    CHECK(std::fabs(da - db) <= ea + eb);
}

TEST_CASE("thread-count override does not change the bytes") {
    const std::vector<std::string> base = {"witness", "--s-min", "1", "--s-max", "1",
                                           "--c-hat", "0.346",  "--samples", "30000"};
    std::vector<std::string> one = base;
    one.push_back("--threads");
    one.push_back("1");
    Run a = cli(base);
    Run b = cli(one);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    // The echoed config differs (threads), but every data row must match.
    Csv ca = parse_csv(a.out), cb = parse_csv(b.out);
    CHECK(ca.rows == cb.rows);
}
