#include <doctest.h>

#include "udm/errors.hpp"
#include "udm/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

using namespace udm;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir() {
    auto p = std::filesystem::temp_directory_path() / "udm_report_tests";
    std::filesystem::create_directories(p);
    return p;
}

Heatmap tiny_map(std::initializer_list<double> diag) {
    Heatmap hm;
    hm.item = 0;
    hm.axis_row = 0;
    hm.axis_col = 1;
    int k = int(diag.size());
    for (int i = 0; i < k; ++i) {
        hm.row_values.push_back((i + 0.5) / k);
        hm.col_values.push_back((i + 0.5) / k);
    }
    hm.values = Eigen::MatrixXd::Zero(k, k);
    int i = 0;
    for (double v : diag) hm.values(i, i) = v, ++i;
    return hm;
}

} // namespace

TEST_CASE("format_double: shortest round-tripping representation") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-2.25) == "-2.25");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    for (double v : {0.1, 1e-9, 3.141592653589793, -7.25e17, 0.38490017945975046}) {
        CHECK(std::stod(format_double(v)) == v);
    }
}

TEST_CASE("canonical_json: sorted keys, fixed indent, trailing newline") {
    json j;
    j["beta"] = 2;
    j["alpha"] = 1;
    std::string s = canonical_json(j);
    CHECK(s == "{\n  \"alpha\": 1,\n  \"beta\": 2\n}\n");
    CHECK(canonical_json(j) == s);  // byte-stable on repeat
}

TEST_CASE("load_config: file handling and top-level shape") {
    auto dir = scratch_dir();
    auto good = (dir / "good.json").string();
    write_text_file(good, "{\"schema_version\": 1, \"n\": 2}\n");
    json j = load_config(good);
    CHECK(j["n"] == 2);

    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), schema_error);

    auto bad = (dir / "bad.json").string();
    write_text_file(bad, "{not json");
    CHECK_THROWS_AS(load_config(bad), schema_error);

    auto arr = (dir / "arr.json").string();
    write_text_file(arr, "[1, 2]\n");
    CHECK_THROWS_AS(load_config(arr), schema_error);
}

TEST_CASE("validate_config: minimal accepted configs per command") {
    CHECK_NOTHROW(validate_config(json{{"schema_version", 1}, {"n", 2}}, "price"));
    CHECK_NOTHROW(validate_config(
        json{{"schema_version", 1}, {"n", 2}, {"c", 1}, {"tol", 1e-10}}, "price"));
    CHECK_NOTHROW(validate_config(json{{"schema_version", 1}, {"n", 3}}, "threshold"));
    CHECK_NOTHROW(
        validate_config(json{{"schema_version", 1}, {"n_max", 10}}, "threshold-table"));
    CHECK_NOTHROW(validate_config(
        json{{"schema_version", 1}, {"dist", json::object()}}, "check-cdf"));
    CHECK_NOTHROW(
        validate_config(json{{"schema_version", 1}, {"resolution", 11}}, "solve-lp"));
    CHECK_NOTHROW(
        validate_config(json{{"schema_version", 1}, {"menu_size", 4}}, "solve-menu"));
    CHECK_NOTHROW(
        validate_config(json{{"schema_version", 1}, {"n", 2}, {"c", 0.5}}, "verify"));
    CHECK_NOTHROW(validate_config(
        json{{"schema_version", 1}, {"which", "fig2"}}, "reproduce-figures"));
}

TEST_CASE("validate_config: rejections") {
    json ok{{"schema_version", 1}, {"n", 2}};
    CHECK_THROWS_AS(validate_config(json{{"n", 2}}, "price"), schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", 2}, {"n", 2}}, "price"),
                    schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", "1"}, {"n", 2}}, "price"),
                    schema_error);
    CHECK_THROWS_AS(
        validate_config(json{{"schema_version", 1}, {"n", 2}, {"shift", 1.0}}, "price"),
        schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", 1}, {"n", "2"}}, "price"),
                    schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", 1}, {"n", 2.5}}, "price"),
                    schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", 1}}, "price"), schema_error);
    CHECK_THROWS_AS(validate_config(json{{"schema_version", 1}, {"c", 0.5}}, "verify"),
                    schema_error);
    CHECK_THROWS_AS(validate_config(ok, "not-a-command"), schema_error);
    CHECK_THROWS_AS(validate_config(json::array(), "price"), schema_error);
}

TEST_CASE("distribution_from_config: builds and propagates value errors") {
    auto d = distribution_from_config(json{{"kind", "uniform_shift"}, {"c", 0.5}});
    REQUIRE(d != nullptr);
    CHECK(d->support_lo() == 0.5);
    CHECK_THROWS_AS(distribution_from_config(json::array()), schema_error);
    CHECK_THROWS_AS(distribution_from_config(json{{"kind", "uniform_shift"}, {"c", -1.0}}),
                    invalid_distribution);
}

TEST_CASE("to_json: bundle price omits the shift unless known") {
    BundlePriceResult r;
    r.n = 2;
    r.c = std::numeric_limits<double>::quiet_NaN();
    r.price = 0.6;
    r.revenue = 0.3;
    r.residual = 1e-13;
    r.iterations = 40;
    r.method = "golden-newton";
    json j = to_json(r);
    CHECK(!j.contains("c"));
    CHECK(j["method"] == "golden-newton");
    r.c = 0.75;
    json j2 = to_json(r);
    CHECK(j2["c"] == 0.75);
    CHECK(j2["n"] == 2);
    CHECK(j2["price"] == 0.6);
}

TEST_CASE("to_json: structured results carry their full field sets") {
    ThresholdResult th{2, 1.0, 1e-12, 0.9, 1.1};
    json jt = to_json(th);
    for (const char* k : {"n", "c_star", "residual", "bracket_lo", "bracket_hi"})
        CHECK(jt.contains(k));

    OptimalityVerdict v{2, 0.5, true, 0.25, OptimalityRule::threshold_compare};
    json jv = to_json(v);
    CHECK(jv["rule"] == "threshold_compare");
    CHECK(jv["uniform_pricing_optimal"] == true);
    v.rule = OptimalityRule::polynomial_sign;
    CHECK(to_json(v)["rule"] == "polynomial_sign");

    WitnessGap wg{0.3, 0.4, -0.1};
    json jw = to_json(wg);
    CHECK(jw["int_mu_plus"] == 0.3);
    CHECK(jw["int_gamma1"] == 0.4);
    CHECK(jw["gap"] == -0.1);

    CertificateReport rep;
    rep.n = 2;
    rep.c = 0.5;
    rep.p = 0.9;
    rep.checks.push_back({"margin", 0.25, true});
    rep.verdict = Verdict::optimal;
    json jr = to_json(rep);
    CHECK(jr["verdict"] == "optimal");
    REQUIRE(jr["checks"].size() == 1);
    CHECK(jr["checks"][0]["name"] == "margin");
    CHECK(jr["checks"][0]["pass"] == true);

    MenuMechanism menu;
    menu.n = 2;
    MenuOption opt;
    opt.q = Eigen::Vector2d(1.0, 0.0);
    opt.price = 0.5;
    menu.options.push_back(opt);
    json jm = to_json(menu);
    CHECK(jm["n"] == 2);
    REQUIRE(jm["options"].size() == 1);
    CHECK(jm["options"][0]["q"][0] == 1.0);
    CHECK(jm["options"][0]["price"] == 0.5);
}

TEST_CASE("heatmap_csv: golden output for a two-by-two map") {
    Heatmap hm;
    hm.item = 0;
    hm.axis_row = 0;
    hm.axis_col = 1;
    hm.row_values = {0.25, 0.75};
    hm.col_values = {0.25, 0.75};
    hm.values = Eigen::MatrixXd(2, 2);
    hm.values << 0.0, 0.5, 1.0, 0.25;
    CHECK(heatmap_csv(hm) ==
          "x1\\x2,0.25,0.75\n"
          "0.25,0,0.5\n"
          "0.75,1,0.25\n");
}

TEST_CASE("heatmap_svg: well-formed standalone image") {
    auto hm = tiny_map({0.0, 0.5, 1.0});
    std::string svg = heatmap_svg(hm);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("item 1") != std::string::npos);
    // one rect per cell plus the background
    size_t rects = 0, pos = 0;
    while ((pos = svg.find("<rect", pos)) != std::string::npos) ++rects, pos += 5;
    CHECK(rects == 9 + 1);
}

TEST_CASE("diagonal_boundary: first crossing of the summed allocations") {
    auto a = tiny_map({0.0, 0.1, 0.3, 0.6, 1.0});
    auto b = tiny_map({0.0, 0.1, 0.3, 0.6, 1.0});
    auto scan = diagonal_boundary({a, b});
    CHECK(scan.crossed);
    CHECK(scan.index == 2);  // 0.3 + 0.3 >= 0.5
    CHECK(scan.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(scan.cell == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(scan.threshold == 0.5);

    auto low = tiny_map({0.0, 0.0, 0.1});
    auto none = diagonal_boundary({low});
    CHECK(!none.crossed);
    CHECK(none.index == -1);

    auto other = tiny_map({0.0, 1.0});
    CHECK_THROWS_AS(diagonal_boundary({a, other}), std::invalid_argument);
    CHECK_THROWS_AS(diagonal_boundary({}), std::invalid_argument);
}

TEST_CASE("combined_certificate: merges all certificate families") {
    auto rep = combined_certificate(2, 0.5);
    CHECK(rep.verdict == Verdict::optimal);
    bool has_closed = false, has_upper = false, has_witness = false;
    for (const auto& ch : rep.checks) {
        CHECK(ch.pass);
        if (ch.name.rfind("closed_form.", 0) == 0) has_closed = true;
        if (ch.name.rfind("upper_set.", 0) == 0) has_upper = true;
        if (ch.name == "witness.gap") has_witness = true;
    }
    CHECK(has_closed);
    CHECK(has_upper);
    CHECK(has_witness);

    auto bad = combined_certificate(2, 1.5);
    CHECK(bad.verdict == Verdict::not_optimal);
    for (const auto& ch : bad.checks)
        if (ch.name == "witness.gap") CHECK(ch.value > 0.0);
}

TEST_CASE("combined_certificate: beyond three items only the closed form runs") {
    auto rep = combined_certificate(4, 1.0);
    CHECK(rep.verdict == Verdict::optimal);
    for (const auto& ch : rep.checks) CHECK(ch.name.rfind("closed_form.", 0) == 0);
    auto far = combined_certificate(4, 2.0);
    CHECK(far.verdict == Verdict::not_optimal);
}

TEST_CASE("reproduce_figure: two-item uniform panel is complete and self-consistent") {
    auto fb = reproduce_figure("fig2");
    CHECK(fb.figure == "fig2");
    REQUIRE(fb.maps.size() == 2);
    REQUIRE(fb.boundaries.size() == 1);
    CHECK(fb.summary["grid_resolution"] == 21);
    CHECK(fb.summary["lp"]["status"] == "optimal");
    CHECK(fb.summary["boundary"]["within_one_cell"] == true);

    // csv + svg per item plus the summary json
    REQUIRE(fb.files.size() == 5);
    bool saw_summary = false;
    for (const auto& f : fb.files) {
        CHECK(!f.content.empty());
        if (f.name == "fig2_summary.json") {
            saw_summary = true;
            CHECK(f.content == canonical_json(fb.summary));
        }
    }
    CHECK(saw_summary);

    // the scanned sell boundary sits within one cell of the analytic price
    double oracle = fb.summary["boundary"]["oracle_price"].get<double>();
    CHECK(oracle == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
    CHECK(std::abs(fb.boundaries[0].value - oracle) <= fb.boundaries[0].cell);

    CHECK_THROWS_AS(reproduce_figure("fig9"), schema_error);
}

TEST_CASE("reproduce_figure: identical bytes across runs") {
    auto a = reproduce_figure("fig2");
    auto b = reproduce_figure("fig2");
    REQUIRE(a.files.size() == b.files.size());
    for (size_t i = 0; i < a.files.size(); ++i) {
        CHECK(a.files[i].name == b.files[i].name);
        CHECK(a.files[i].content == b.files[i].content);
    }
}

TEST_CASE("write_text_file: creates directories and reports failures") {
    auto dir = scratch_dir() / "nested" / "deeper";
    auto path = (dir / "out.txt").string();
    write_text_file(path, "alpha\n");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "alpha\n");

    write_text_file(path, "beta\n");  // overwrite
    std::ifstream in2(path);
    std::stringstream ss2;
    ss2 << in2.rdbuf();
    CHECK(ss2.str() == "beta\n");

    // a regular file in the directory position must fail
    auto blocker = (scratch_dir() / "blocker").string();
    write_text_file(blocker, "x");
    CHECK_THROWS_AS(write_text_file(blocker + "/child.txt", "y"), std::runtime_error);
}
