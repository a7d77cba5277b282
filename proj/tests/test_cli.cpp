#include "doctest.h"

#include "qpr/cli.hpp"
#include "qpr/report.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "qpr_cli_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    fs::path p = scratch_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qpr");
    std::vector<char*> argv;
    argv.reserve(args.size());
    for (auto& a : args) argv.push_back(a.data());
    return qpr::run_cli(static_cast<int>(argv.size()), argv.data());
}

// numeric cells render non-finite values as strings ("inf", "-inf", "nan")
double as_num(const json& cell) {
    if (cell.is_string()) return std::stod(cell.get<std::string>());
    return cell.get<double>();
}

const char* kTwoCyclePerturb = R"({
    "order_terms": [
        {"order": 1, "entries": [
            {"i": 1, "j": 1, "value": 0.1},
            {"i": 1, "j": 2, "value": -0.1}
        ]}
    ]
})";

} // namespace

TEST_CASE("rank-classical: exact scores, deterministic bytes, same numbers in csv") {
    fs::path graph = write_file("dangling.tsv", "1\t2\n");
    fs::path out1 = scratch_dir() / "classical1.json";
    fs::path out2 = scratch_dir() / "classical2.json";
    fs::path outc = scratch_dir() / "classical.csv";

    REQUIRE(run({"rank-classical", "--graph", graph.string(), "--out", out1.string()}) == 0);
    REQUIRE(run({"rank-classical", "--graph", graph.string(), "--out", out2.string()}) == 0);
    CHECK(read_file(out1) == read_file(out2));

    json doc = json::parse(read_file(out1));
    CHECK(doc["run"]["command"] == "rank-classical");
    CHECK(doc["run"]["n"] == 2);
    REQUIRE(doc["scores"].size() == 2);
    CHECK(doc["scores"][0]["node"] == 1);
    const double s1 = doc["scores"][0]["score"].get<double>();
    const double s2 = doc["scores"][1]["score"].get<double>();
    CHECK(s1 == doctest::Approx(20.0 / 57.0).epsilon(1e-10));
    CHECK(s2 == doctest::Approx(37.0 / 57.0).epsilon(1e-10));

    REQUIRE(run({"rank-classical", "--graph", graph.string(), "--format", "csv", "--out",
                 outc.string()}) == 0);
    const std::string csv = read_file(outc);
    CHECK(csv.find(qpr::report::fmt17(s1)) != std::string::npos);
    CHECK(csv.find(qpr::report::fmt17(s2)) != std::string::npos);
}

TEST_CASE("rank-quantum: summed variant carries limits and conserves mass") {
    fs::path graph = write_file("two_cycle.tsv", "1\t2\n2\t1\n");
    fs::path out = scratch_dir() / "quantum.json";
    REQUIRE(run({"rank-quantum", "--graph", graph.string(), "--variant", "summed", "--m", "0",
                 "--m", "3", "--t", "100", "--out", out.string()}) == 0);
    json doc = json::parse(read_file(out));
    CHECK(doc["run"]["variant"] == "summed");
    CHECK(doc["run"]["walk_dim"] == 4);

    double mass = 0.0;
    for (const auto& row : doc["instantaneous"]) {
        if (row["m"] != 0) continue;
        mass += row["value"].get<double>();
        CHECK(row["limit"].is_number());
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

    REQUIRE(doc["averaged"].size() == 2);
    for (const auto& row : doc["averaged"]) {
        CHECK(row["t"] == 100);
        const double gap = std::abs(row["average"].get<double>() - row["limit"].get<double>());
        CHECK(gap <= row["mixing_bound"].get<double>() + 1e-12);
    }
}

TEST_CASE("rank-quantum: coherent variant leaves the limit columns empty") {
    fs::path graph = write_file("two_cycle.tsv", "1\t2\n2\t1\n");
    fs::path out = scratch_dir() / "quantum_coherent.json";
    REQUIRE(run({"rank-quantum", "--graph", graph.string(), "--node", "1", "--out",
                 out.string()}) == 0);
    json doc = json::parse(read_file(out));
    REQUIRE(doc["instantaneous"].size() == 1);
    CHECK(doc["instantaneous"][0]["limit"].is_null());
    CHECK(doc.count("averaged") == 0); // no --t given
}

TEST_CASE("perturb: first-order core coefficient and certified truncation rows") {
    fs::path graph = write_file("two_cycle.tsv", "1\t2\n2\t1\n");
    fs::path pert = write_file("two_cycle_perturb.json", kTwoCyclePerturb);
    fs::path out = scratch_dir() / "perturb.json";

    REQUIRE(run({"perturb", "--graph", graph.string(), "--perturbation", pert.string(), "--out",
                 out.string()}) == 0);
    json doc = json::parse(read_file(out));
    CHECK(doc["run"]["command"] == "perturb");
    CHECK(doc["run"]["variant"] == "coherent");
    CHECK(doc["run"]["order"] == 4);
    CHECK(doc["run"]["phases_resolved"] == true);

    // t^(1): d/dchi sqrt(g_12 g_21) = -0.05 on this perturbation
    bool found = false;
    for (const auto& row : doc["t_series"]) {
        if (row["i"] == 1 && row["j"] == 2 && row["n"] == 1) {
            CHECK(row["value"].get<double>() == doctest::Approx(-0.05).epsilon(1e-12));
            found = true;
        }
    }
    CHECK(found);

    CHECK(doc["radius"]["r0"].get<double>() > 0.0);
    CHECK(doc["radius"]["resolved"] == true);
    CHECK(doc["ledger"]["bstar"].get<double>() >= 1.0);
    CHECK(doc["branches"].size() == 2);
    CHECK(doc["iq_series"].size() >= 5); // orders 0..4 for at least one node

    REQUIRE(doc["truncation"].size() > 0);
    for (const auto& row : doc["truncation"]) {
        CHECK(row["within_bound"] == true);
        CHECK(as_num(row["abs_error"]) <= as_num(row["tail_bound"]));
    }
}

TEST_CASE("perturb: zero perturbation reports infinite radii and a flat series") {
    fs::path graph = write_file("two_cycle.tsv", "1\t2\n2\t1\n");
    fs::path pert = write_file("zero_perturb.json", R"({"order_terms": [{"order": 1, "entries": []}]})");
    fs::path out = scratch_dir() / "perturb_zero.json";

    REQUIRE(run({"perturb", "--graph", graph.string(), "--perturbation", pert.string(),
                 "--no-rank", "--out", out.string()}) == 0);
    json doc = json::parse(read_file(out));
    CHECK(doc["radius"]["r0"] == "inf");
    CHECK(doc["radius"]["r1"] == "inf");
    for (const auto& row : doc["t_series"])
        if (row["n"] != 0) CHECK(row["value"].get<double>() == 0.0);
    CHECK(doc.count("iq_series") == 0);
}

TEST_CASE("exit codes follow the documented taxonomy") {
    fs::path graph = write_file("three.tsv", "1\t2\n2\t3\n3\t1\n");
    fs::path chain = write_file("chain.tsv", "1\t2\n2\t1\n2\t3\n");
    fs::path pert_bad = write_file("bad_perturb.json", R"({
        "order_terms": [{"order": 1, "entries": [{"i": 1, "j": 2, "value": 0.1}]}]
    })");
    fs::path pert_ok = write_file("ok_perturb.json", R"({
        "order_terms": [{"order": 1, "entries": [
            {"i": 1, "j": 1, "value": 0.02}, {"i": 1, "j": 2, "value": -0.02}
        ]}]
    })");

    // 2: parse-level problems (missing file, unknown flag, bad order)
    CHECK(run({"rank-classical", "--graph", "/nonexistent/graph.tsv"}) == 2);
    CHECK(run({"rank-classical", "--graph", graph.string(), "--bogus"}) == 2);
    CHECK(run({"perturb", "--graph", graph.string(), "--perturbation", pert_ok.string(),
               "--order", "0"}) == 2);
    CHECK(run({"rank-quantum", "--graph", graph.string(), "--format", "yaml"}) == 2);

    // 4: graph larger than the dense-walk cap
    CHECK(run({"rank-quantum", "--graph", graph.string(), "--cap", "2"}) == 4);

    // 5: perturbation violating row-sum admissibility
    CHECK(run({"perturb", "--graph", graph.string(), "--perturbation", pert_bad.string()}) == 5);

    // 3: rank series requested although the degenerate cluster of the
    // directed 3-cycle splits under this perturbation
    CHECK(run({"perturb", "--graph", graph.string(), "--perturbation", pert_ok.string()}) == 3);

    // 6: chi outside the certified domain (simple-spectrum chain graph)
    CHECK(run({"perturb", "--graph", chain.string(), "--perturbation", pert_ok.string(),
               "--chi", "50.0"}) == 6);

    // no subcommand at all is a parse error
    CHECK(run({}) == 2);
}
