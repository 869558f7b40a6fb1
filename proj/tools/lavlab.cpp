// Command-line driver: deterministic experiment runs with CSV/JSON reports.
//
// Exit codes: 0 all assertions hold, 1 an assertion failed, 2 bad usage or
// config, 3 numeric failure.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lavlab/interval_set.hpp"
#include "lavlab/lavrentiev.hpp"
#include "lavlab/report_io.hpp"
#include "lavlab/smoothing.hpp"

namespace fs = std::filesystem;
using namespace lavlab;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    double rel_tol = 0.0;
    bool rel_tol_set = false;
    std::string mode = "rational";
};

json load_config(const CommonArgs& args, json defaults) {
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::runtime_error("cannot read config: " + args.config_path);
        json file = json::parse(in);
        defaults.merge_patch(file);
    }
    if (args.seed_set) defaults["seed"] = args.seed;
    if (args.rel_tol_set) defaults["rel_tol"] = args.rel_tol;
    defaults["mode"] = args.mode;
    return defaults;
}

std::string csv_header(const std::string& hash, const std::string& columns) {
    return "# config_hash=" + hash + "\n" + columns + "\n";
}

void ensure_out_dir(const std::string& dir) { fs::create_directories(dir); }

int cmd_gap(const CommonArgs& common) {
    json cfg = load_config(common, json{{"n_list", {64, 96, 128, 200}},
                                        {"corpus", {{"count", 1000},
                                                    {"slope_cap", 10.0},
                                                    {"min_knots", 2},
                                                    {"max_knots", 12}}},
                                        {"f_c", 2048.0},
                                        {"seed", 20260808},
                                        {"rel_tol", 1e-8},
                                        {"case1_grid", 500},
                                        {"case2_grid", 10000}});
    const std::string hash = config_hash(cfg);
    ensure_out_dir(common.out_dir);

    CorpusSpec corpus;
    corpus.count = cfg["corpus"]["count"];
    corpus.seed = cfg["seed"];
    corpus.slope_cap = cfg["corpus"]["slope_cap"];
    corpus.min_knots = cfg["corpus"]["min_knots"];
    corpus.max_knots = cfg["corpus"]["max_knots"];
    SweepGrids grids{cfg["case1_grid"], cfg["case2_grid"]};
    auto spec = LagrangianSpec::lavrentiev(cfg["f_c"]);

    GapReport report;
    try {
        report = gap_demo(cfg["n_list"].get<std::vector<int>>(), corpus, cfg["rel_tol"], grids, spec);
    } catch (const QuadratureError& err) {
        std::cerr << "gap: quadrature failure: " << err.what() << "\n";
        return 3;
    }

    std::ostringstream gap_csv;
    gap_csv << csv_header(hash, "n,log_energy");
    for (auto& row : report.rows)
        if (!row.failed) gap_csv << row.n << "," << csv_number(row.log_energy) << "\n";
    write_text_file(common.out_dir + "/gap.csv", gap_csv.str());

    std::ostringstream corpus_csv;
    corpus_csv << csv_header(hash, "candidate,log_energy");
    for (std::size_t i = 0; i < report.corpus_energies_log.size(); ++i)
        corpus_csv << i << "," << csv_number(report.corpus_energies_log[i]) << "\n";
    write_text_file(common.out_dir + "/corpus.csv", corpus_csv.str());

    json sweeps = to_json(report);
    sweeps["config_hash"] = hash;
    write_text_file(common.out_dir + "/sweeps.json", sweeps.dump(2) + "\n");

    const auto& m = report.case_sweep_worst_margins;
    const bool margins_ok =
        m.case1_chain_min >= -1e-12 && m.case1_slope_min >= -1e-12 && m.case2_min >= -1e-12;
    const bool corpus_ok =
        report.corpus_energies_log.empty() || report.corpus_min_energy_log >= 1.0;
    bool rows_ok = true;
    for (auto& row : report.rows) rows_ok = rows_ok && !row.failed;
    std::cout << "gap: corpus_min_log_energy="
              << (report.corpus_energies_log.empty() ? std::string("n/a")
                                                     : csv_number(report.corpus_min_energy_log))
              << " case1_chain_min=" << csv_number(m.case1_chain_min)
              << " case1_slope_min=" << csv_number(m.case1_slope_min)
              << " case2_min=" << csv_number(m.case2_min) << "\n";
    if (!rows_ok) return 3;
    return margins_ok && corpus_ok ? 0 : 1;
}

int cmd_conditions(const CommonArgs& common) {
    json cfg = load_config(common, json{{"f_c", 2048.0},
                                        {"pointwise_grid", 2048},
                                        {"region_grid", 512},
                                        {"rel_tol", 1e-8},
                                        {"seed", 0}});
    const std::string hash = config_hash(cfg);
    ensure_out_dir(common.out_dir);

    ConditionGrids grids;
    grids.pointwise = cfg["pointwise_grid"];
    grids.region = cfg["region_grid"];
    auto report = check_conditions(LagrangianSpec::lavrentiev(cfg["f_c"]), grids);

    json j{{"config_hash", hash}, {"f_c", cfg["f_c"]}, {"conditions", to_json(report)},
           {"all_pass", report.all_pass()}};
    write_text_file(common.out_dir + "/conditions.json", j.dump(2) + "\n");

    std::ostringstream csv;
    csv << csv_header(hash, "condition,verdict,margin,witness");
    for (auto& e : report.entries) {
        csv << e.name << "," << (e.pass ? "pass" : "fail") << "," << csv_number(e.worst_margin)
            << ",";
        for (std::size_t i = 0; i < e.witness.size(); ++i)
            csv << (i ? ";" : "") << csv_number(e.witness[i]);
        csv << "\n";
    }
    write_text_file(common.out_dir + "/conditions.csv", csv.str());
    for (auto& e : report.entries)
        std::cout << "condition " << e.name << ": " << (e.pass ? "pass" : "fail")
                  << " (worst margin " << csv_number(e.worst_margin) << ")\n";
    return report.all_pass() ? 0 : 1;
}

int cmd_smooth(const CommonArgs& common) {
    json cfg = load_config(common, json{{"u", "sqrt"},
                                        {"epsilon", 0.05},
                                        {"spec", "bounded"},
                                        {"cap", 101.0},
                                        {"f_c", 2048.0},
                                        {"rel_tol", 1e-8},
                                        {"curve_samples", 512},
                                        {"seed", 0}});
    const std::string hash = config_hash(cfg);
    ensure_out_dir(common.out_dir);

    const double epsilon = cfg["epsilon"];
    if (!(epsilon > 0.0)) {
        std::cerr << "smooth: epsilon must be positive\n";
        return 2;
    }
    RealFunc u;
    try {
        u = parse_named_func(cfg["u"]);
    } catch (const std::exception& err) {
        std::cerr << "smooth: " << err.what() << "\n";
        return 2;
    }
    LagrangianSpec spec = cfg["spec"] == "lavrentiev" ? LagrangianSpec::lavrentiev(cfg["f_c"])
                                                      : LagrangianSpec::bounded_test(cfg["cap"]);
    VerifyConfig vcfg;
    vcfg.rel_tol = cfg["rel_tol"];

    Certificate cert;
    std::optional<RealFunc> phi;
    int rc = 0;
    try {
        auto result = approximate(u, spec, epsilon, {}, vcfg);
        cert = result.certificate;
        phi = std::move(result.phi);
    } catch (const ScheduleExhausted& err) {
        cert = err.best_certificate;
        rc = 1;
    } catch (const std::invalid_argument& err) {
        std::cerr << "smooth: " << err.what() << "\n";
        return 2;
    }

    json cj = to_json(cert);
    cj["config_hash"] = hash;
    cj["u"] = to_json(u);
    write_text_file(common.out_dir + "/certificate.json", cj.dump(2) + "\n");

    // Sampled curves of the full pipeline at the certified (k, n).
    if (phi) {
        const MollifierKernel kernel;
        auto stage1 = truncate_derivative(u, cert.k_used);
        auto u_kn = mollify(stage1.u_k, static_cast<int>(cert.n_used), kernel);
        std::ostringstream csv;
        csv << csv_header(hash,
                          "x,u,u_deriv,u_k,u_k_deriv,u_kn,u_kn_deriv,phi,phi_deriv");
        const int samples = cfg["curve_samples"];
        for (int i = 0; i <= samples; ++i) {
            const double x = static_cast<double>(i) / samples;
            const double xs = std::min(std::max(x, 1e-12), 1.0);
            csv << csv_number(x) << "," << csv_number(u(xs)) << "," << csv_number(u.deriv(xs))
                << "," << csv_number(stage1.u_k(xs)) << "," << csv_number(stage1.u_k.deriv(xs))
                << "," << csv_number(u_kn(xs)) << "," << csv_number(u_kn.deriv(xs)) << ","
                << csv_number((*phi)(xs)) << "," << csv_number(phi->deriv(xs)) << "\n";
        }
        write_text_file(common.out_dir + "/curves.csv", csv.str());
    }
    std::cout << "smooth: " << (cert.pass ? "pass" : "fail") << " at k=" << cert.k_used
              << " n=" << cert.n_used << " sup=" << csv_number(cert.sup_distance) << "\n";
    return rc;
}

int cmd_partition(const CommonArgs& common) {
    json cfg = load_config(common, json{{"epsilon", "1/10"},
                                        {"depth", 6},
                                        {"demo", "counterexample"},
                                        {"cut_rule", "gap_midpoint"},
                                        {"seed", 0}});
    const std::string hash = config_hash(cfg);
    ensure_out_dir(common.out_dir);

    Rational eps;
    try {
        eps = Rational::parse(cfg["epsilon"]);
    } catch (const std::exception&) {
        std::cerr << "partition: epsilon must be a rational like 1/10\n";
        return 2;
    }
    const CutRule rule =
        cfg["cut_rule"] == "set_left_endpoint" ? CutRule::set_left_endpoint : CutRule::gap_midpoint;

    json j{{"config_hash", hash}, {"demo", cfg["demo"]}, {"epsilon", eps.to_string()}};
    bool ok = true;
    try {
        StepFunction uprime = StepFunction::constant(Rational(1, 2));
        if (cfg["demo"] == "counterexample") {
            const int depth = cfg["depth"];
            auto ce = counterexample_set(eps, depth);
            uprime = ce.uprime;
            j["counterexample"] = {{"p", to_json(ce.p)},
                                   {"full_measure", ce.full_measure.to_string()},
                                   {"truncated_measure", ce.truncated_measure.to_string()},
                                   {"min_separating_size", min_separating_size(ce.uprime, ce.p)},
                                   {"depth", depth}};
        } else if (cfg["demo"] == "two_level") {
            uprime = StepFunction({Rational(0), Rational(1, 2), Rational(1)},
                                  {Rational(0), Rational(1)});
        }
        auto result = level_set_partition(uprime, eps, rule);
        j["partition"] = to_json(result.partition);
        j["p_eps"] = to_json(result.p_eps);
        j["report"] = to_json(result.report);
        ok = result.report.all_ok();
        if (common.mode == "float") {
            // Float-shadow agreement: measures and the pair separations
            // recomputed in double arithmetic must match the exact results
            // to 1e-12.
            double worst =
                std::fabs(to_float(result.p_eps).measure() - result.p_eps.measure().to_double());
            std::vector<double> float_cuts{0.0, 1.0};
            for (auto m = result.cores.begin(); m != result.cores.end(); ++m) {
                FloatIntervalSet f_m, g_m;
                for (auto& [k, core] : result.cores) {
                    if (k <= m->first) f_m = f_m.unite(to_float(core));
                    else g_m = g_m.unite(to_float(core));
                }
                if (f_m.empty() || g_m.empty()) continue;
                const auto shadow = separate_pair(g_m, f_m, rule);
                for (double c : shadow.cuts()) float_cuts.push_back(c);
            }
            std::sort(float_cuts.begin(), float_cuts.end());
            float_cuts.erase(std::unique(float_cuts.begin(), float_cuts.end()), float_cuts.end());
            const auto& exact_cuts = result.partition.cuts();
            if (float_cuts.size() != exact_cuts.size()) {
                worst = 1.0;
            } else {
                for (std::size_t i = 0; i < float_cuts.size(); ++i)
                    worst = std::max(worst, std::fabs(float_cuts[i] - exact_cuts[i].to_double()));
            }
            j["float_shadow"] = {{"worst_deviation", worst}, {"agrees", worst <= 1e-12}};
            ok = ok && worst <= 1e-12;
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "partition: " << err.what() << "\n";
        return 2;
    }
    write_text_file(common.out_dir + "/partition.json", j.dump(2) + "\n");
    std::cout << "partition: lemma conditions " << (ok ? "verified" : "FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for the one-dimensional Lavrentiev phenomenon"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    CommonArgs common;
    app.add_option("--config", common.config_path, "JSON config file");
    app.add_option("--out", common.out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", common.seed, "corpus seed");
    auto* tol_opt = app.add_option("--rel-tol", common.rel_tol, "quadrature relative tolerance");
    app.add_option("--mode", common.mode, "arithmetic mode: rational|float")
        ->check(CLI::IsMember({"rational", "float"}));

    auto* gap = app.add_subcommand("gap", "energy collapse rows, corpus sweep, case margins");
    auto* conditions = app.add_subcommand("conditions", "check growth conditions (I)-(V)");
    auto* smooth = app.add_subcommand("smooth", "run the approximation pipeline with certificates");
    auto* partition = app.add_subcommand("partition", "appendix partition algorithms, exact rationals");

    CLI11_PARSE(app, argc, argv);
    common.seed_set = seed_opt->count() > 0;
    common.rel_tol_set = tol_opt->count() > 0;

    try {
        if (gap->parsed()) return cmd_gap(common);
        if (conditions->parsed()) return cmd_conditions(common);
        if (smooth->parsed()) return cmd_smooth(common);
        if (partition->parsed()) return cmd_partition(common);
    } catch (const QuadratureError& err) {
        std::cerr << "numeric failure: " << err.what() << "\n";
        return 3;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
