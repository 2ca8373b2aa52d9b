#include "udm/errors.hpp"
#include "udm/numerics.hpp"
#include "udm/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

json base_cfg(const std::string& path) {
    if (!path.empty()) return udm::load_config(path);
    json cfg = json::object();
    cfg["schema_version"] = udm::kConfigSchemaVersion;
    return cfg;
}

json parse_inline_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw udm::schema_error(std::string(what) + ": " + e.what());
    }
}

void emit(const json& out) { std::cout << udm::canonical_json(out); }

std::vector<std::shared_ptr<const udm::Cdf>> dists_from_cfg(const json& cfg) {
    const bool have_many = cfg.contains("dists");
    const bool have_one = cfg.contains("dist");
    if (have_many == have_one)
        throw udm::schema_error("config: provide exactly one of 'dists' or 'dist' + 'n'");
    std::vector<std::shared_ptr<const udm::Cdf>> out;
    if (have_many) {
        for (const auto& spec : cfg["dists"])
            out.push_back(udm::distribution_from_config(spec));
    } else {
        if (!cfg.contains("n"))
            throw udm::schema_error("config: 'dist' requires 'n'");
        auto d = udm::distribution_from_config(cfg["dist"]);
        out.assign(size_t(cfg["n"].get<int>()), d);
    }
    return out;
}

json boundary_json(const udm::BoundaryScan& b) {
    return json{{"crossed", b.crossed},
                {"index", b.index},
                {"value", b.value},
                {"cell", b.cell},
                {"threshold", b.threshold}};
}

void run_price(const json& cfg) {
    udm::validate_config(cfg, "price");
    const int n = cfg["n"].get<int>();
    const double c = cfg.value("c", 0.0);
    const double tol = cfg.value("tol", 1e-12);
    auto r = udm::bundle_price(udm::UniformShiftCdf(c), n, tol);
    auto verdict = udm::uniform_pricing_optimal(c, n);
    json out;
    out["config_echo"] = cfg;
    out["result"] = udm::to_json(r);
    out["optimality"] = udm::to_json(verdict);
    emit(out);
}

void run_threshold(const json& cfg) {
    udm::validate_config(cfg, "threshold");
    const int n = cfg["n"].get<int>();
    const double tol = cfg.value("tol", 1e-12);
    auto r = udm::threshold_c_star(n, tol);
    json out;
    out["config_echo"] = cfg;
    out["result"] = udm::to_json(r);
    emit(out);
}

void run_threshold_table(const json& cfg) {
    udm::validate_config(cfg, "threshold-table");
    const int n_max = cfg["n_max"].get<int>();
    auto table = udm::threshold_table(n_max);
    json rows = json::array();
    std::string csv = "n,c_star\n";
    for (const auto& r : table) {
        rows.push_back({{"n", r.n}, {"c_star", r.c_star}, {"residual", r.residual}});
        csv += std::to_string(r.n) + "," + udm::format_double(r.c_star) + "\n";
    }
    json out;
    out["config_echo"] = cfg;
    out["table"] = rows;
    if (cfg.contains("outdir")) {
        const std::string path =
            cfg["outdir"].get<std::string>() + "/threshold_table.csv";
        udm::write_text_file(path, csv);
        out["files"] = json::array({path});
    }
    emit(out);
}

void run_check_cdf(const json& cfg) {
    udm::validate_config(cfg, "check-cdf");
    auto dist = udm::distribution_from_config(cfg["dist"]);
    const int grid = cfg.value("grid", 256);
    const int q_grid = cfg.value("q_grid", 64);
    json reports;
    reports["scale"] = udm::to_json(udm::scale_monotone_check(*dist, grid, grid));
    reports["quantile_scaled"] =
        udm::to_json(udm::quantile_scaled_check(*dist, grid, grid));
    reports["elasticity"] = udm::to_json(udm::monotone_elasticity_check(*dist, grid));
    if (cfg.contains("alphas")) {
        std::vector<double> alphas;
        for (const auto& a : cfg["alphas"]) {
            if (!a.is_number())
                throw udm::schema_error("config: 'alphas' must hold numbers");
            alphas.push_back(a.get<double>());
        }
        udm::PowerScaledProduct family(dist, alphas);
        reports["stochastic_relative_values"] =
            udm::to_json(udm::stochastic_relative_values_check(family, q_grid, q_grid));
    }
    json out;
    out["config_echo"] = cfg;
    out["reports"] = reports;
    emit(out);
}

void run_solve_lp(const json& cfg) {
    udm::validate_config(cfg, "solve-lp");
    auto dists = dists_from_cfg(cfg);
    const int resolution = cfg["resolution"].get<int>();
    const double tol = cfg.value("tol", 1e-9);
    auto grid = udm::build_grid(dists, resolution);
    auto sol = udm::solve_lp_exact(grid, tol);
    json out;
    out["config_echo"] = cfg;
    out["solution"] = udm::lp_summary(sol);
    if (grid.n == 2) {
        std::vector<udm::Heatmap> maps{udm::allocation_heatmap(sol, grid, 0),
                                       udm::allocation_heatmap(sol, grid, 1)};
        out["boundary"] = boundary_json(udm::diagonal_boundary(maps));
        if (cfg.contains("outdir")) {
            json files = json::array();
            for (int i = 0; i < 2; ++i) {
                const std::string stem = cfg["outdir"].get<std::string>() +
                                         "/lp_item" + std::to_string(i + 1);
                udm::write_text_file(stem + ".csv", udm::heatmap_csv(maps[size_t(i)]));
                udm::write_text_file(stem + ".svg", udm::heatmap_svg(maps[size_t(i)]));
                files.push_back(stem + ".csv");
                files.push_back(stem + ".svg");
            }
            out["files"] = files;
        }
    }
    emit(out);
}

void run_solve_menu(const json& cfg) {
    udm::validate_config(cfg, "solve-menu");
    auto dists = dists_from_cfg(cfg);
    const int menu_size = cfg["menu_size"].get<int>();
    udm::MenuTrainConfig mc;
    mc.seed = std::uint64_t(cfg.value("seed", 1000));
    mc.steps = cfg.value("steps", mc.steps);
    mc.restarts = cfg.value("restarts", mc.restarts);
    auto menu = udm::solve_menu(dists, menu_size, mc);
    const int R = cfg.value("resolution", menu.n == 2 ? 801 : 101);
    auto grid = udm::build_grid(dists, R);
    auto ev = udm::evaluate_mechanism(menu, grid);
    json out;
    out["config_echo"] = cfg;
    out["menu"] = udm::to_json(menu);
    out["revenue"] = ev.revenue;
    out["eval_resolution"] = R;
    emit(out);
}

void run_verify(const json& cfg) {
    udm::validate_config(cfg, "verify");
    const int n = cfg["n"].get<int>();
    const double c = cfg["c"].get<double>();
    const int samples = cfg.value("samples", 200);
    const auto seed = std::uint64_t(cfg.value("seed", 7));
    auto rep = udm::combined_certificate(n, c, samples, seed);
    json out;
    out["config_echo"] = cfg;
    out["certificate"] = udm::to_json(rep);
    if (n == 2 || n == 3)
        out["witness_gap"] = udm::to_json(udm::necessity_witness_gap(n, c));
    if (cfg.value("trace", false)) {
        std::string csv = "sample,integral\n";
        if (n == 2 || n == 3) {
            auto bp = udm::bundle_price(udm::UniformShiftCdf(c), n);
            auto geom = udm::make_region_geometry(n, c, bp.price);
            udm::UpperSetStaircase corner;
            corner.n = n;
            corner.lo = c;
            corner.hi = c + 1.0;
            corner.empty_set = false;
            corner.tau.assign(n == 2 ? 1 : 32, 2.0 * c + 1.0 - bp.price);
            csv += "corner," +
                   udm::format_double(udm::staircase_integral(corner, geom)) + "\n";
            for (int k = 0; k < samples; ++k) {
                auto U = udm::random_staircase(n, c, 32, seed + std::uint64_t(k));
                csv += std::to_string(k) + "," +
                       udm::format_double(udm::staircase_integral(U, geom)) + "\n";
            }
            csv += "full," +
                   udm::format_double(udm::staircase_integral(
                       udm::full_boundary_set(n, c), geom)) +
                   "\n";
        }
        const std::string path = cfg.value("outdir", std::string(".")) +
                                 "/verify_trace.csv";
        udm::write_text_file(path, csv);
        out["files"] = json::array({path});
    }
    emit(out);
}

void run_reproduce_figures(const json& cfg) {
    udm::validate_config(cfg, "reproduce-figures");
    const std::string which = cfg["which"].get<std::string>();
    const std::string outdir = cfg.value("outdir", std::string("figures"));
    const int resolution = cfg.value("resolution", 0);
    std::vector<std::string> names;
    if (which == "all")
        names = {"fig2", "fig3", "fig4"};
    else
        names = {which};
    json out;
    out["config_echo"] = cfg;
    json summaries = json::array();
    json files = json::array();
    for (const auto& name : names) {
        auto fb = udm::reproduce_figure(name, resolution);
        for (const auto& f : fb.files) {
            const std::string path = outdir + "/" + f.name;
            udm::write_text_file(path, f.content);
            files.push_back(path);
        }
        summaries.push_back(fb.summary);
    }
    out["figures"] = summaries;
    out["files"] = files;
    emit(out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Revenue tools for one unit-demand buyer: optimal uniform pricing, "
        "optimality thresholds, discretized LP and menu mechanisms, and dual "
        "certificates. UDM_THREADS caps worker threads."};
    app.require_subcommand(1);

    struct PriceOpts {
        std::string config;
        int n = 0;
        double c = 0.0, tol = 0.0;
    };
    auto po = std::make_shared<PriceOpts>();
    auto* price = app.add_subcommand("price", "optimal single price for n i.i.d. U[c,c+1] items");
    price->add_option("--config", po->config, "JSON config file");
    auto* po_n = price->add_option("--n", po->n, "item count");
    auto* po_c = price->add_option("--c", po->c, "support shift");
    auto* po_tol = price->add_option("--tol", po->tol, "root tolerance");
    price->callback([po, po_n, po_c, po_tol]() {
        json cfg = base_cfg(po->config);
        if (po_n->count()) cfg["n"] = po->n;
        if (po_c->count()) cfg["c"] = po->c;
        if (po_tol->count()) cfg["tol"] = po->tol;
        run_price(cfg);
    });

    struct ThresholdOpts {
        std::string config;
        int n = 0;
        double tol = 0.0;
    };
    auto to = std::make_shared<ThresholdOpts>();
    auto* thr = app.add_subcommand("threshold", "critical shift c* where uniform pricing stops being optimal");
    thr->add_option("--config", to->config, "JSON config file");
    auto* to_n = thr->add_option("--n", to->n, "item count");
    auto* to_tol = thr->add_option("--tol", to->tol, "root tolerance");
    thr->callback([to, to_n, to_tol]() {
        json cfg = base_cfg(to->config);
        if (to_n->count()) cfg["n"] = to->n;
        if (to_tol->count()) cfg["tol"] = to->tol;
        run_threshold(cfg);
    });

    struct TableOpts {
        std::string config;
        int n_max = 0;
        std::string outdir;
    };
    auto tbo = std::make_shared<TableOpts>();
    auto* tbl = app.add_subcommand("threshold-table", "c* for n = 2..n_max");
    tbl->add_option("--config", tbo->config, "JSON config file");
    auto* tbo_n = tbl->add_option("--n-max", tbo->n_max, "largest item count");
    auto* tbo_o = tbl->add_option("--outdir", tbo->outdir, "directory for the CSV");
    tbl->callback([tbo, tbo_n, tbo_o]() {
        json cfg = base_cfg(tbo->config);
        if (tbo_n->count()) cfg["n_max"] = tbo->n_max;
        if (tbo_o->count()) cfg["outdir"] = tbo->outdir;
        run_threshold_table(cfg);
    });

    struct CheckOpts {
        std::string config, dist;
        int grid = 0, q_grid = 0;
        std::vector<double> alphas;
    };
    auto co = std::make_shared<CheckOpts>();
    auto* chk = app.add_subcommand("check-cdf", "monotonicity checks for a value distribution");
    chk->add_option("--config", co->config, "JSON config file");
    auto* co_d = chk->add_option("--dist", co->dist, "distribution spec as JSON text");
    auto* co_g = chk->add_option("--grid", co->grid, "grid resolution");
    auto* co_q = chk->add_option("--q-grid", co->q_grid, "quantile grid for the subset check");
    auto* co_a = chk->add_option("--alphas", co->alphas, "power weights for the subset check");
    chk->callback([co, co_d, co_g, co_q, co_a]() {
        json cfg = base_cfg(co->config);
        if (co_d->count()) cfg["dist"] = parse_inline_json(co->dist, "--dist");
        if (co_g->count()) cfg["grid"] = co->grid;
        if (co_q->count()) cfg["q_grid"] = co->q_grid;
        if (co_a->count()) cfg["alphas"] = co->alphas;
        run_check_cdf(cfg);
    });

    struct LpOpts {
        std::string config, dist, dists, outdir;
        int n = 0, resolution = 0;
        double tol = 0.0;
    };
    auto lo = std::make_shared<LpOpts>();
    auto* slp = app.add_subcommand("solve-lp", "exact discretized mechanism LP");
    slp->add_option("--config", lo->config, "JSON config file");
    auto* lo_d = slp->add_option("--dist", lo->dist, "shared distribution spec as JSON text");
    auto* lo_ds = slp->add_option("--dists", lo->dists, "per-item distribution specs as a JSON array");
    auto* lo_n = slp->add_option("--n", lo->n, "item count when --dist is shared");
    auto* lo_r = slp->add_option("--resolution", lo->resolution, "grid cells per axis");
    auto* lo_t = slp->add_option("--tol", lo->tol, "interior-point tolerance");
    auto* lo_o = slp->add_option("--outdir", lo->outdir, "directory for heatmaps");
    slp->callback([lo, lo_d, lo_ds, lo_n, lo_r, lo_t, lo_o]() {
        json cfg = base_cfg(lo->config);
        if (lo_d->count()) cfg["dist"] = parse_inline_json(lo->dist, "--dist");
        if (lo_ds->count()) cfg["dists"] = parse_inline_json(lo->dists, "--dists");
        if (lo_n->count()) cfg["n"] = lo->n;
        if (lo_r->count()) cfg["resolution"] = lo->resolution;
        if (lo_t->count()) cfg["tol"] = lo->tol;
        if (lo_o->count()) cfg["outdir"] = lo->outdir;
        run_solve_lp(cfg);
    });

    struct MenuOpts {
        std::string config, dist, dists, outdir;
        int n = 0, menu_size = 0, steps = 0, restarts = 0, resolution = 0;
        std::uint64_t seed = 0;
    };
    auto mo = std::make_shared<MenuOpts>();
    auto* smn = app.add_subcommand("solve-menu", "first-order posted-menu search");
    smn->add_option("--config", mo->config, "JSON config file");
    auto* mo_d = smn->add_option("--dist", mo->dist, "shared distribution spec as JSON text");
    auto* mo_ds = smn->add_option("--dists", mo->dists, "per-item distribution specs as a JSON array");
    auto* mo_n = smn->add_option("--n", mo->n, "item count when --dist is shared");
    auto* mo_k = smn->add_option("--menu-size", mo->menu_size, "symmetric option count");
    auto* mo_s = smn->add_option("--seed", mo->seed, "training seed");
    auto* mo_st = smn->add_option("--steps", mo->steps, "gradient steps");
    auto* mo_re = smn->add_option("--restarts", mo->restarts, "training restarts");
    auto* mo_r = smn->add_option("--resolution", mo->resolution, "evaluation grid per axis");
    smn->callback([mo, mo_d, mo_ds, mo_n, mo_k, mo_s, mo_st, mo_re, mo_r]() {
        json cfg = base_cfg(mo->config);
        if (mo_d->count()) cfg["dist"] = parse_inline_json(mo->dist, "--dist");
        if (mo_ds->count()) cfg["dists"] = parse_inline_json(mo->dists, "--dists");
        if (mo_n->count()) cfg["n"] = mo->n;
        if (mo_k->count()) cfg["menu_size"] = mo->menu_size;
        if (mo_s->count()) cfg["seed"] = mo->seed;
        if (mo_st->count()) cfg["steps"] = mo->steps;
        if (mo_re->count()) cfg["restarts"] = mo->restarts;
        if (mo_r->count()) cfg["resolution"] = mo->resolution;
        run_solve_menu(cfg);
    });

    struct VerifyOpts {
        std::string config, outdir;
        int n = 0, samples = 0;
        double c = 0.0;
        std::uint64_t seed = 0;
        bool trace = false;
    };
    auto vo = std::make_shared<VerifyOpts>();
    auto* ver = app.add_subcommand("verify", "dual certificate for uniform-price optimality");
    ver->add_option("--config", vo->config, "JSON config file");
    auto* vo_n = ver->add_option("--n", vo->n, "item count");
    auto* vo_c = ver->add_option("--c", vo->c, "support shift");
    auto* vo_s = ver->add_option("--samples", vo->samples, "upper sets to sample");
    auto* vo_sd = ver->add_option("--seed", vo->seed, "sampling seed");
    auto* vo_t = ver->add_flag("--trace", vo->trace, "write per-upper-set integrals as CSV");
    auto* vo_o = ver->add_option("--outdir", vo->outdir, "directory for the trace");
    ver->callback([vo, vo_n, vo_c, vo_s, vo_sd, vo_t, vo_o]() {
        json cfg = base_cfg(vo->config);
        if (vo_n->count()) cfg["n"] = vo->n;
        if (vo_c->count()) cfg["c"] = vo->c;
        if (vo_s->count()) cfg["samples"] = vo->samples;
        if (vo_sd->count()) cfg["seed"] = vo->seed;
        if (vo_t->count()) cfg["trace"] = vo->trace;
        if (vo_o->count()) cfg["outdir"] = vo->outdir;
        run_verify(cfg);
    });

    struct FigOpts {
        std::string config, which, outdir;
        int resolution = 0;
    };
    auto fo = std::make_shared<FigOpts>();
    auto* fig = app.add_subcommand("reproduce-figures", "regenerate the documented allocation figures");
    fig->add_option("--config", fo->config, "JSON config file");
    auto* fo_w = fig->add_option("--which", fo->which, "fig2, fig3, fig4, or all");
    auto* fo_o = fig->add_option("--outdir", fo->outdir, "output directory");
    auto* fo_r = fig->add_option("--resolution", fo->resolution, "grid override, 0 keeps the documented value");
    fig->callback([fo, fo_w, fo_o, fo_r]() {
        json cfg = base_cfg(fo->config);
        if (fo_w->count()) cfg["which"] = fo->which;
        if (fo_o->count()) cfg["outdir"] = fo->outdir;
        if (fo_r->count()) cfg["resolution"] = fo->resolution;
        run_reproduce_figures(cfg);
    });

    const auto t0 = std::chrono::steady_clock::now();
    int code = 0;
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        code = udm::exit_schema;
    } catch (const udm::schema_error& e) {
        emit(json{{"error", {{"type", "schema_error"}, {"message", e.what()}}}});
        code = udm::exit_schema;
    } catch (const std::invalid_argument& e) {
        emit(json{{"error", {{"type", "invalid_argument"}, {"message", e.what()}}}});
        code = udm::exit_schema;
    } catch (const udm::invalid_distribution& e) {
        emit(json{{"error", {{"type", "invalid_distribution"}, {"message", e.what()}}}});
        code = udm::exit_numerical;
    } catch (const udm::numerical_error& e) {
        emit(json{{"error", {{"type", "numerical_error"}, {"message", e.what()}}}});
        code = udm::exit_numerical;
    } catch (const std::domain_error& e) {
        emit(json{{"error", {{"type", "domain_error"}, {"message", e.what()}}}});
        code = udm::exit_numerical;
    } catch (const std::exception& e) {
        emit(json{{"error", {{"type", "internal"}, {"message", e.what()}}}});
        code = udm::exit_internal;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::fprintf(stderr, "timing_ms %lld\n", static_cast<long long>(ms));
    return code;
}
