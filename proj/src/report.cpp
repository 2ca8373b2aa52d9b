#include "udm/report.hpp"

#include "udm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace udm {

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string canonical_json(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw schema_error(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw schema_error("config: top level must be an object");
    return j;
}

namespace {

enum class FieldType { Int, Num, Str, Bool, Obj, Arr };

struct FieldSpec {
    const char* key;
    FieldType type;
    bool required;
};

const std::vector<FieldSpec>* schema_for(const std::string& command) {
    static const std::vector<std::pair<std::string, std::vector<FieldSpec>>> table = {
        {"price",
         {{"n", FieldType::Int, true},
          {"c", FieldType::Num, false},
          {"tol", FieldType::Num, false}}},
        {"threshold",
         {{"n", FieldType::Int, true}, {"tol", FieldType::Num, false}}},
        {"threshold-table",
         {{"n_max", FieldType::Int, true}, {"outdir", FieldType::Str, false}}},
        {"check-cdf",
         {{"dist", FieldType::Obj, true},
          {"grid", FieldType::Int, false},
          {"q_grid", FieldType::Int, false},
          {"alphas", FieldType::Arr, false}}},
        {"solve-lp",
         {{"dist", FieldType::Obj, false},
          {"n", FieldType::Int, false},
          {"dists", FieldType::Arr, false},
          {"resolution", FieldType::Int, true},
          {"tol", FieldType::Num, false},
          {"outdir", FieldType::Str, false}}},
        {"solve-menu",
         {{"dist", FieldType::Obj, false},
          {"n", FieldType::Int, false},
          {"dists", FieldType::Arr, false},
          {"menu_size", FieldType::Int, true},
          {"seed", FieldType::Int, false},
          {"steps", FieldType::Int, false},
          {"restarts", FieldType::Int, false},
          {"resolution", FieldType::Int, false},
          {"outdir", FieldType::Str, false}}},
        {"verify",
         {{"n", FieldType::Int, true},
          {"c", FieldType::Num, true},
          {"samples", FieldType::Int, false},
          {"seed", FieldType::Int, false},
          {"trace", FieldType::Bool, false},
          {"outdir", FieldType::Str, false}}},
        {"reproduce-figures",
         {{"which", FieldType::Str, true},
          {"outdir", FieldType::Str, false},
          {"resolution", FieldType::Int, false}}},
    };
    for (const auto& [cmd, fields] : table)
        if (cmd == command) return &fields;
    return nullptr;
}

bool type_matches(const nlohmann::json& v, FieldType t) {
    switch (t) {
        case FieldType::Int: return v.is_number_integer() || v.is_number_unsigned();
        case FieldType::Num: return v.is_number();
        case FieldType::Str: return v.is_string();
        case FieldType::Bool: return v.is_boolean();
        case FieldType::Obj: return v.is_object();
        case FieldType::Arr: return v.is_array();
    }
    return false;
}

const char* type_name(FieldType t) {
    switch (t) {
        case FieldType::Int: return "integer";
        case FieldType::Num: return "number";
        case FieldType::Str: return "string";
        case FieldType::Bool: return "boolean";
        case FieldType::Obj: return "object";
        case FieldType::Arr: return "array";
    }
    return "?";
}

} // namespace

void validate_config(const nlohmann::json& cfg, const std::string& command) {
    if (!cfg.is_object()) throw schema_error("config: top level must be an object");
    const auto* fields = schema_for(command);
    if (!fields) throw schema_error("config: unknown command '" + command + "'");

    if (!cfg.contains("schema_version"))
        throw schema_error("config: missing 'schema_version'");
    if (!cfg["schema_version"].is_number_integer() ||
        cfg["schema_version"].get<int>() != kConfigSchemaVersion)
        throw schema_error("config: unsupported schema_version");

    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.key() == "schema_version") continue;
        const FieldSpec* found = nullptr;
        for (const auto& f : *fields)
            if (it.key() == f.key) { found = &f; break; }
        if (!found)
            throw schema_error("config: unknown field '" + it.key() + "' for " + command);
        if (!type_matches(it.value(), found->type))
            throw schema_error("config: field '" + it.key() + "' must be " +
                               type_name(found->type));
    }
    for (const auto& f : *fields)
        if (f.required && !cfg.contains(f.key))
            throw schema_error(std::string("config: missing field '") + f.key +
                               "' for " + command);
}

std::shared_ptr<const Cdf> distribution_from_config(const nlohmann::json& spec) {
    if (!spec.is_object()) throw schema_error("distribution spec: must be an object");
    return cdf_from_json(spec.dump());
}

nlohmann::json to_json(const BundlePriceResult& r) {
    nlohmann::json j;
    j["n"] = r.n;
    if (std::isfinite(r.c)) j["c"] = r.c;
    j["price"] = r.price;
    j["revenue"] = r.revenue;
    j["residual"] = r.residual;
    j["iterations"] = r.iterations;
    j["method"] = r.method;
    return j;
}

nlohmann::json to_json(const ThresholdResult& r) {
    return nlohmann::json{{"n", r.n},
                          {"c_star", r.c_star},
                          {"residual", r.residual},
                          {"bracket_lo", r.bracket_lo},
                          {"bracket_hi", r.bracket_hi}};
}

nlohmann::json to_json(const OptimalityVerdict& v) {
    return nlohmann::json{
        {"n", v.n},
        {"c", v.c},
        {"uniform_pricing_optimal", v.uniform_pricing_optimal},
        {"margin", v.margin},
        {"rule", v.rule == OptimalityRule::threshold_compare ? "threshold_compare"
                                                             : "polynomial_sign"}};
}

nlohmann::json to_json(const MonotonicityReport& rep) {
    return nlohmann::json::parse(rep.to_json());
}

nlohmann::json to_json(const CertificateReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& ch : rep.checks)
        checks.push_back({{"name", ch.name}, {"value", ch.value}, {"pass", ch.pass}});
    return nlohmann::json{{"n", rep.n},
                          {"c", rep.c},
                          {"p", rep.p},
                          {"checks", checks},
                          {"verdict", verdict_name(rep.verdict)}};
}

nlohmann::json to_json(const WitnessGap& wg) {
    return nlohmann::json{{"int_mu_plus", wg.int_mu_plus},
                          {"int_gamma1", wg.int_gamma1},
                          {"gap", wg.gap}};
}

nlohmann::json lp_summary(const LpSolution& sol) {
    return nlohmann::json{{"objective", sol.objective},
                          {"status", sol.status},
                          {"ic_rounds", sol.ic_rounds},
                          {"max_ic_violation", sol.max_ic_violation},
                          {"max_ir_violation", sol.max_ir_violation},
                          {"types", int(sol.pay.size())}};
}

nlohmann::json to_json(const MenuMechanism& menu) {
    nlohmann::json opts = nlohmann::json::array();
    for (const auto& opt : menu.options) {
        nlohmann::json q = nlohmann::json::array();
        for (int i = 0; i < opt.q.size(); ++i) q.push_back(opt.q[i]);
        opts.push_back({{"q", q}, {"price", opt.price}});
    }
    return nlohmann::json{{"n", menu.n}, {"options", opts}};
}

std::string heatmap_csv(const Heatmap& hm) {
    std::ostringstream out;
    out << "x" << (hm.axis_row + 1) << "\\x" << (hm.axis_col + 1);
    for (double cv : hm.col_values) out << "," << format_double(cv);
    out << "\n";
    for (int r = 0; r < int(hm.row_values.size()); ++r) {
        out << format_double(hm.row_values[size_t(r)]);
        for (int c = 0; c < int(hm.col_values.size()); ++c)
            out << "," << format_double(hm.values(r, c));
        out << "\n";
    }
    return out.str();
}

namespace {

void colormap(double v, int& r, int& g, int& b) {
    v = std::clamp(v, 0.0, 1.0);
    // dark violet -> teal -> yellow
    const int stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
    int lo = v < 0.5 ? 0 : 1;
    double t = v < 0.5 ? 2.0 * v : 2.0 * v - 1.0;
    r = int(std::lround(stops[lo][0] + t * (stops[lo + 1][0] - stops[lo][0])));
    g = int(std::lround(stops[lo][1] + t * (stops[lo + 1][1] - stops[lo][1])));
    b = int(std::lround(stops[lo][2] + t * (stops[lo + 1][2] - stops[lo][2])));
}

} // namespace

std::string heatmap_svg(const Heatmap& hm) {
    const int R = int(hm.row_values.size());
    const int C = int(hm.col_values.size());
    const int cell = 14, mleft = 58, mtop = 26, mbot = 40, mright = 16;
    const int W = mleft + C * cell + mright;
    const int H = mtop + R * cell + mbot;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
      << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    s << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << mleft << "\" y=\"16\" font-family=\"sans-serif\" font-size=\"12\">"
      << "item " << (hm.item + 1);
    for (const auto& [ax, val] : hm.slice)
        s << ", x" << (ax + 1) << "=" << format_double(val);
    s << "</text>\n";
    for (int r = 0; r < R; ++r) {
        for (int c = 0; c < C; ++c) {
            int cr, cg, cb;
            colormap(hm.values(r, c), cr, cg, cb);
            // row 0 sits at the bottom: value axes increase upward
            int x = mleft + c * cell;
            int y = mtop + (R - 1 - r) * cell;
            s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell
              << "\" height=\"" << cell << "\" fill=\"rgb(" << cr << "," << cg << ","
              << cb << ")\"/>\n";
        }
    }
    s << "<text x=\"4\" y=\"" << (mtop + 10)
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(hm.row_values.back()) << "</text>\n";
    s << "<text x=\"4\" y=\"" << (mtop + R * cell)
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(hm.row_values.front()) << "</text>\n";
    s << "<text x=\"" << mleft << "\" y=\"" << (mtop + R * cell + 14)
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(hm.col_values.front()) << "</text>\n";
    s << "<text x=\"" << (mleft + (C - 1) * cell) << "\" y=\"" << (mtop + R * cell + 14)
      << "\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(hm.col_values.back()) << "</text>\n";
    s << "<text x=\"" << (mleft + C * cell / 2) << "\" y=\"" << (mtop + R * cell + 30)
      << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">x"
      << (hm.axis_col + 1) << "</text>\n";
    s << "</svg>\n";
    return s.str();
}

BoundaryScan diagonal_boundary(const std::vector<Heatmap>& item_maps, double threshold) {
    if (item_maps.empty())
        throw std::invalid_argument("diagonal_boundary: no maps");
    const auto& first = item_maps.front();
    for (const auto& hm : item_maps)
        if (hm.row_values != first.row_values || hm.col_values != first.col_values)
            throw std::invalid_argument("diagonal_boundary: maps must share axes");

    BoundaryScan scan;
    scan.threshold = threshold;
    scan.cell = first.row_values.size() > 1
                    ? first.row_values[1] - first.row_values[0]
                    : 0.0;
    const int D = int(std::min(first.row_values.size(), first.col_values.size()));
    for (int r = 0; r < D; ++r) {
        double total = 0.0;
        for (const auto& hm : item_maps) total += hm.values(r, r);
        if (total >= threshold) {
            scan.crossed = true;
            scan.index = r;
            scan.value = first.row_values[size_t(r)];
            return scan;
        }
    }
    return scan;
}

namespace {

nlohmann::json boundary_json(const BoundaryScan& b, double oracle) {
    return nlohmann::json{{"crossed", b.crossed},
                          {"index", b.index},
                          {"value", b.value},
                          {"cell", b.cell},
                          {"threshold", b.threshold},
                          {"oracle_price", oracle},
                          {"within_one_cell",
                           b.crossed && std::abs(b.value - oracle) <= b.cell}};
}

void add_map_files(FigureBundle& fb, const Heatmap& hm, const std::string& stem) {
    fb.files.push_back({stem + ".csv", heatmap_csv(hm)});
    fb.files.push_back({stem + ".svg", heatmap_svg(hm)});
    fb.maps.push_back(hm);
}

} // namespace

FigureBundle reproduce_figure(const std::string& which, int resolution) {
    FigureBundle fb;
    fb.figure = which;
    nlohmann::json summary;
    summary["figure"] = which;
    summary["provenance"] = {{"tool", "udm"}, {"version", kToolVersion}};

    if (which == "fig2" || which == "fig3") {
        const int R = resolution > 0 ? resolution : 21;
        std::vector<std::shared_ptr<const Cdf>> dists;
        nlohmann::json echo = nlohmann::json::array();
        double oracle = 0.0;
        if (which == "fig2") {
            dists = {std::make_shared<UniformShiftCdf>(0.0),
                     std::make_shared<UniformShiftCdf>(0.0)};
            echo.push_back({{"kind", "uniform_shift"}, {"c", 0.0}});
            echo.push_back({{"kind", "uniform_shift"}, {"c", 0.0}});
            oracle = bundle_price(UniformShiftCdf(0.0), 2).price;
        } else {
            dists = {std::make_shared<PowerCdf>(0.5), std::make_shared<PowerCdf>(2.0)};
            echo.push_back({{"kind", "power"}, {"alpha", 0.5}});
            echo.push_back({{"kind", "power"}, {"alpha", 2.0}});
            // max of the two values has CDF x^2.5; same law as the max of two
            // i.i.d. draws from x^1.25
            oracle = bundle_price(PowerCdf(1.25), 2).price;
        }
        auto grid = build_grid(dists, R);
        auto sol = solve_lp_exact(grid, 1e-9);
        std::vector<Heatmap> maps{allocation_heatmap(sol, grid, 0),
                                  allocation_heatmap(sol, grid, 1)};
        for (int i = 0; i < 2; ++i)
            add_map_files(fb, maps[size_t(i)], which + "_item" + std::to_string(i + 1));
        auto b = diagonal_boundary(maps);
        fb.boundaries.push_back(b);
        summary["distributions"] = echo;
        summary["grid_resolution"] = R;
        summary["lp"] = lp_summary(sol);
        summary["boundary"] = boundary_json(b, oracle);
    } else if (which == "fig4") {
        const int R = resolution > 0 ? resolution : 12;
        std::vector<std::shared_ptr<const Cdf>> dists(
            3, std::make_shared<UniformShiftCdf>(1.0));
        nlohmann::json echo = nlohmann::json::array();
        for (int i = 0; i < 3; ++i) echo.push_back({{"kind", "uniform_shift"}, {"c", 1.0}});
        const double oracle = bundle_price(UniformShiftCdf(1.0), 3).price;
        auto grid = build_grid(dists, R);
        auto sol = solve_lp_exact(grid, 1e-9);
        nlohmann::json slices = nlohmann::json::array();
        for (double v : {1.2, 1.5, 1.8}) {
            std::vector<Heatmap> maps;
            for (int item = 0; item < 3; ++item)
                maps.push_back(allocation_heatmap(sol, grid, item, {{2, v}}));
            const std::string tag = "fig4_x3_" + format_double(v);
            for (int item = 0; item < 3; ++item)
                add_map_files(fb, maps[size_t(item)], tag + "_item" + std::to_string(item + 1));
            auto b = diagonal_boundary(maps);
            fb.boundaries.push_back(b);
            nlohmann::json sj;
            sj["x3"] = v;
            sj["snapped_x3"] = maps[0].slice.at(2);
            sj["boundary"] = boundary_json(b, oracle);
            sj["all_sell"] = b.crossed && b.index == 0;
            slices.push_back(sj);
        }
        summary["distributions"] = echo;
        summary["grid_resolution"] = R;
        summary["lp"] = lp_summary(sol);
        summary["oracle_price"] = oracle;
        summary["slices"] = slices;
    } else {
        throw schema_error("reproduce-figures: unknown figure '" + which + "'");
    }

    fb.summary = summary;
    fb.files.push_back({which + "_summary.json", canonical_json(summary)});
    return fb;
}

CertificateReport combined_certificate(int n, double c, int samples, std::uint64_t seed) {
    CertificateReport closed = convex_dominance_closed_form(n, c);
    CertificateReport rep;
    rep.n = n;
    rep.c = c;
    rep.p = closed.p;
    double margin = 0.0;
    for (auto& ch : closed.checks) {
        if (ch.name == "margin") margin = ch.value;
        rep.checks.push_back({"closed_form." + ch.name, ch.value, ch.pass});
    }
    rep.verdict = closed.verdict;

    if (n == 2 || n == 3) {
        CertificateReport ups = upper_set_dominance_test(n, c, samples, seed);
        for (auto& ch : ups.checks)
            rep.checks.push_back({"upper_set." + ch.name, ch.value, ch.pass});
        WitnessGap wg = necessity_witness_gap(n, c);
        const double tol = 1e-8;
        bool gap_consistent = (wg.gap > tol) == (margin < 0.0) ||
                              std::abs(margin) <= 1e-6;
        rep.checks.push_back({"witness.gap", wg.gap, gap_consistent});
        Verdict wv = wg.gap > tol ? Verdict::not_optimal : Verdict::optimal;
        if (ups.verdict != closed.verdict || wv != closed.verdict)
            rep.verdict = Verdict::inconclusive;
    }
    return rep;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory '" +
                                     p.parent_path().string() + "': " + ec.message());
    }
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace udm
