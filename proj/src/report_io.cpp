#include "lavlab/report_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lavlab {

std::string config_hash(const json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

json to_json(const RealFunc& f) {
    json j;
    j["kind"] = to_string(f.kind);
    if (f.kind == FuncKind::piecewise_linear && f.pl) {
        j["knots"] = f.pl->knots();
        j["values"] = f.pl->values();
    } else {
        j["id"] = f.form_id;
        j["params"] = f.params;
    }
    j["boundary"] = {f.boundary_left, f.boundary_right};
    if (f.lipschitz_bound) j["lipschitz_bound"] = *f.lipschitz_bound;
    return j;
}

json to_json(const ConditionReport& report) {
    json j = json::array();
    for (auto& e : report.entries) {
        j.push_back({{"condition", e.name},
                     {"verdict", e.pass ? "pass" : "fail"},
                     {"worst_margin", e.worst_margin},
                     {"witness", e.witness},
                     {"grid_spec", e.grid_spec}});
    }
    return j;
}

json to_json(const GapReport& report) {
    json rows = json::array();
    for (auto& r : report.rows) {
        json row{{"n", r.n}};
        if (r.failed) row["error"] = r.note;
        else row["log_energy"] = r.log_energy;
        rows.push_back(row);
    }
    const auto& m = report.case_sweep_worst_margins;
    return json{{"rows", rows},
                {"corpus_min_energy_log", report.corpus_min_energy_log},
                {"corpus_min_index", report.corpus_min_index},
                {"case_sweeps",
                 {{"case1_chain_min", m.case1_chain_min},
                  {"case1_chain_argmin", m.case1_chain_argmin},
                  {"case1_slope_min", m.case1_slope_min},
                  {"case1_slope_argmin", m.case1_slope_argmin},
                  {"case2_min", m.case2_min},
                  {"case2_argmin", m.case2_argmin}}}};
}

json to_json(const Certificate& cert) {
    json j{{"epsilon_target", cert.epsilon_target},
           {"sup_distance", cert.sup_distance},
           {"boundary_residual_left", cert.boundary_residual_left},
           {"boundary_residual_right", cert.boundary_residual_right},
           {"energy_u_log", cert.energy_u_log},
           {"energy_phi_log", cert.energy_phi_log},
           {"energy_gap", cert.energy_gap},
           {"energy_gap_representable", cert.energy_gap_representable},
           {"l3_vacated", cert.l3_vacated},
           {"range_warning", cert.range_warning},
           {"k_used", cert.k_used},
           {"n_used", cert.n_used},
           {"sampling_spec", cert.sampling_spec},
           {"pass", cert.pass}};
    if (cert.l1_deriv_distance) j["l1_deriv_distance"] = *cert.l1_deriv_distance;
    return j;
}

json to_json(const IntervalSet& set) {
    json comps = json::array();
    for (auto& c : set.components()) {
        comps.push_back({{"lo", c.lo.to_string()},
                         {"hi", c.hi.to_string()},
                         {"lo_closed", c.lo_closed},
                         {"hi_closed", c.hi_closed},
                         {"lo_float", c.lo.to_double()},
                         {"hi_float", c.hi.to_double()}});
    }
    return json{{"components", comps},
                {"measure", set.measure().to_string()},
                {"measure_float", set.measure().to_double()}};
}

json to_json(const Partition& partition) {
    json cuts = json::array();
    json cuts_float = json::array();
    for (auto& c : partition.cuts()) {
        cuts.push_back(c.to_string());
        cuts_float.push_back(c.to_double());
    }
    return json{{"cuts", cuts},
                {"cuts_float", cuts_float},
                {"interval_count", partition.interval_count()},
                {"convention", "[a_i, a_{i+1}) with the last interval closed"}};
}

json to_json(const LevelPartitionReport& report) {
    return json{{"p_measure", report.p_measure.to_string()},
                {"p_measure_float", report.p_measure.to_double()},
                {"measure_required", report.measure_required.to_string()},
                {"measure_ok", report.measure_ok},
                {"cover_ok", report.cover_ok},
                {"max_diam", report.max_diam.to_string()},
                {"diam_ok", report.diam_ok},
                {"n_levels", report.n_levels},
                {"level_min", report.level_min},
                {"level_max", report.level_max},
                {"interval_count", report.interval_count},
                {"all_ok", report.all_ok()}};
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace lavlab
