#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bilap/errors.hpp"
#include "bilap/io.hpp"
#include "bilap/numerics.hpp"

using namespace bilap;

namespace {

std::string kind_of(const std::function<void()>& call) {
    try {
        call();
    } catch (const Error& err) {
        return err.kind();
    }
    return "";
}

}  // namespace

TEST_CASE("graph json parsing") {
    const Json plain = Json::parse(
        R"({"vertices":3,"edges":[{"source":0,"target":1},{"source":1,"target":2}]})");
    const ParsedGraph g = graph_from_json(plain);
    CHECK(std::holds_alternative<Graph>(g));
    CHECK(combinatorial(g).edge_count() == 2);
    CHECK(kind_of([&] { metric(g); }) == "SchemaError");

    const Json with_lengths = Json::parse(
        R"({"vertices":3,"edges":[{"source":0,"target":1,"length":1.0},
            {"source":1,"target":2,"length":1.0}]})");
    const ParsedGraph m = graph_from_json(with_lengths);
    CHECK(std::holds_alternative<MetricGraph>(m));
    CHECK(metric(m).total_length() == doctest::Approx(2.0));

    const Json mixed = Json::parse(
        R"({"vertices":3,"edges":[{"source":0,"target":1,"length":1.0},
            {"source":1,"target":2}]})");
    CHECK(kind_of([&] { graph_from_json(mixed); }) == "MixedLengths");

    CHECK(kind_of([] { graph_from_json(Json::parse(R"({"edges":[]})")); }) ==
          "SchemaError");
    CHECK(kind_of([] {
              graph_from_json(Json::parse(R"({"vertices":2,"edges":[{"source":0}]})"));
          }) == "SchemaError");

    // graph validation errors surface with edge context
    const Json dup = Json::parse(
        R"({"vertices":3,"edges":[{"source":0,"target":1},{"source":1,"target":0}]})");
    CHECK(kind_of([&] { graph_from_json(dup); }) == "DuplicateEdge");
}

TEST_CASE("graph json roundtrip") {
    const MetricGraph star(preset_graph(GraphKind::star, 3), {1.0, 2.0, 0.5});
    const ParsedGraph back = graph_from_json(graph_to_json(star));
    CHECK(metric(back).lengths() == star.lengths());
    CHECK(metric(back).graph().edge_count() == 3);
}

TEST_CASE("condition specs") {
    const MetricGraph g = equilateral(preset_graph(GraphKind::path, 2));

    const ConditionYR preset =
        condition_from_json(Json::parse(R"({"preset":"friedrichs"})"), g);
    CHECK(preset.name() == "friedrichs");
    CHECK(preset.dim_y() == 2);

    CHECK(kind_of([&] {
              condition_from_json(Json::parse(R"({"preset":"unknown"})"), g);
          }) == "SchemaError");

    // explicit yr spec with [re, im] entries
    const ConditionYR explicit_yr = condition_from_json(Json::parse(R"({
        "yr": {"Y_basis": [[[1,0],[0,0]],[[0,0],[1,0]],[[0,0],[0,0]],[[0,0],[0,0]]],
                "R": [[0,0],[0,0]]}})"),
                                                        g);
    CHECK(explicit_yr.dim_y() == 2);

    // cb spec goes through the conversion and validation
    const ConditionCB cb = yr_to_cb(preset_conditions(g, ConditionPreset::krein));
    Json spec;
    spec["cb"] = {{"C", complex_matrix_to_json(cb.c)}, {"B", complex_matrix_to_json(cb.b)}};
    const ConditionYR back = condition_from_json(spec, g);
    CHECK(conditions_equal(back, preset_conditions(g, ConditionPreset::krein)));
}

TEST_CASE("complex matrix json roundtrip") {
    Eigen::MatrixXcd m(2, 2);
    m << Complex(1.0, -2.0), Complex(0.0, 0.5), Complex(3.25, 0.0), Complex(-1.0, 1.0);
    const Eigen::MatrixXcd back = complex_matrix_from_json(complex_matrix_to_json(m));
    CHECK(max_abs(Eigen::MatrixXcd(m - back)) == 0.0);
}

TEST_CASE("grids") {
    const std::vector<double> geo = parse_geometric_grid("1e-4:1:5");
    CHECK(geo.size() == 5);
    CHECK(geo.front() == doctest::Approx(1e-4));
    CHECK(geo.back() == doctest::Approx(1.0));
    CHECK(geo[1] / geo[0] == doctest::Approx(geo[2] / geo[1]).epsilon(1e-12));

    const std::vector<double> lin = parse_linear_grid("2:4:3");
    CHECK(lin == std::vector<double>{2.0, 3.0, 4.0});

    CHECK(kind_of([] { parse_geometric_grid("nope"); }) == "SchemaError");
    CHECK(kind_of([] { parse_geometric_grid("-1:2:4"); }) == "SchemaError");
}

TEST_CASE("outputs embed the configuration") {
    const std::string dir = std::filesystem::temp_directory_path() / "bilap_io_test";
    std::filesystem::create_directories(dir);
    RunConfig config;
    config.command = "unit";
    config.seed = 7;
    config.tol_overrides["sign"] = 1e-5;

    Json body;
    body["value"] = 42;
    const std::string jpath = write_report(dir + "/report.json", body, config);
    Json parsed;
    std::ifstream(jpath) >> parsed;
    CHECK(parsed["schema_version"] == 1);
    CHECK(parsed["config"]["command"] == "unit");
    CHECK(parsed["config"]["seed"] == 7);
    CHECK(parsed["config"]["tol"]["sign"] == 1e-5);
    CHECK(parsed["report"]["value"] == 42);

    const std::string cpath =
        write_csv(dir + "/table.csv", "a,b", {{1.0, 2.5}, {3.0, -4.0}}, config);
    std::ifstream in(cpath);
    std::string line1, line2, line3, line4;
    std::getline(in, line1);
    std::getline(in, line2);
    std::getline(in, line3);
    std::getline(in, line4);
    CHECK(line1.rfind("# bilap", 0) == 0);
    CHECK(line2.rfind("# config", 0) == 0);
    CHECK(line2.find("\"command\":\"unit\"") != std::string::npos);
    CHECK(line3 == "a,b");
    CHECK(line4 == "1,2.5");

    CHECK(config.tol("sign", 1e-6) == 1e-5);
    CHECK(config.tol("absent", 1e-6) == 1e-6);

    std::filesystem::remove_all(dir);
}
