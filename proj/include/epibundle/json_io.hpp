#pragma once

#include <json.hpp>

#include "epibundle/bundle.hpp"
#include "epibundle/corpus.hpp"

namespace epibundle {

using Json = nlohmann::json;

// Report-schema version; bump on any breaking change to the JSON layout.
inline constexpr int kReportSchema = 1;

// +/-inf serialize as strings so every JSON reader round-trips them.
inline Json to_json(const ExtReal& x) {
    if (x.is_pos_inf()) return Json("+inf");
    if (x.is_neg_inf()) return Json("-inf");
    return Json(x.value());
}

inline Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Json to_json(const SymMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.order(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.order(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Json to_json(const GQF& q) {
    Json j;
    j["n"] = q.dim();
    Json entries = Json::array();  // A, row-major
    for (int i = 0; i < q.dim(); ++i)
        for (int k = 0; k < q.dim(); ++k) entries.push_back(q.matrix()(i, k));
    j["A"] = entries;
    Json basis = Json::array();  // L basis, column-major
    const Mat& b = q.subspace().basis();
    for (int c = 0; c < b.cols(); ++c)
        for (int r = 0; r < b.rows(); ++r) basis.push_back(b(r, c));
    j["L_basis"] = basis;
    j["L_dim"] = q.subspace().dim();
    j["rank_tol"] = q.subspace().rank_tol();
    return j;
}

inline Json to_json(const SubderivEstimate& est) {
    Json j;
    j["direction"] = to_json(est.direction);
    j["lower"] = to_json(est.lower);
    j["upper"] = to_json(est.upper);
    j["verdict"] = to_string(est.verdict);
    j["upper_verdict"] = to_string(est.upper_verdict);
    Json lw = Json::array(), uw = Json::array();
    for (const auto& w : est.lower_windows) lw.push_back(to_json(w));
    for (const auto& w : est.upper_windows) uw.push_back(to_json(w));
    j["lower_windows"] = lw;
    j["upper_windows"] = uw;
    return j;
}

inline Json to_json(const ProxResult& p) {
    Json j;
    Json mins = Json::array();
    for (const auto& m : p.minimizers) mins.push_back(to_json(m));
    j["minimizers"] = mins;
    j["value"] = to_json(p.value);
    j["multi_valued"] = p.multi_valued;
    j["solver_trace"] = {{"coarse_evaluations", p.solver_trace.coarse_evaluations},
                         {"refined_candidates", p.solver_trace.refined_candidates},
                         {"region_radius", p.solver_trace.region_radius}};
    return j;
}

inline Json to_json(const HessianProbe& probe) {
    Json j;
    j["steps"] = probe.steps;
    Json hs = Json::array();
    for (const auto& h : probe.hessians) hs.push_back(to_json(h));
    j["hessians"] = hs;
    j["converged"] = probe.converged;
    if (probe.limit) j["limit"] = to_json(*probe.limit);
    j["symmetry_defect"] = probe.symmetry_defect;
    j["onesided_gap"] = probe.onesided_gap;
    return j;
}

inline Json to_json(const GtdVerdict& v) {
    Json j;
    j["decision"] = to_string(v.decision);
    j["route"] = to_string(v.route);
    j["residual"] = v.residual;
    if (v.form) j["form"] = to_json(*v.form);
    if (!v.detail.empty()) j["detail"] = v.detail;
    Json ev = Json::array();
    for (const auto& row : v.evidence) ev.push_back(to_json(row));
    j["evidence"] = ev;
    if (v.probe) j["probe"] = to_json(*v.probe);
    return j;
}

inline Json to_json(const BundleReport& r) {
    Json j;
    Json els = Json::array();
    for (const auto& c : r.elements) {
        Json e;
        e["form"] = to_json(c.representative);
        e["members"] = c.members;
        e["spread"] = c.spread;
        els.push_back(e);
    }
    j["elements"] = els;
    j["attentive"] = r.attentive;
    Json rej = Json::array();
    for (const auto& p : r.rejected_paths)
        rej.push_back({{"path", p.path}, {"reason", p.reason}});
    j["rejected_paths"] = rej;
    if (r.coefficient_range)
        j["coefficient_range"] = {r.coefficient_range->first,
                                  r.coefficient_range->second};
    j["converged_paths"] = r.converged_paths;
    return j;
}

inline Json to_json(const HessianBundleReport& r) {
    Json j;
    Json cl = Json::array();
    for (const auto& c : r.clusters) {
        Json e;
        e["hessian"] = to_json(c.representative);
        e["members"] = c.members;
        e["spread"] = c.spread;
        cl.push_back(e);
    }
    j["clusters"] = cl;
    Json rej = Json::array();
    for (const auto& p : r.rejected_paths)
        rej.push_back({{"path", p.path}, {"reason", p.reason}});
    j["rejected_paths"] = rej;
    return j;
}

inline Json case_to_json(const ExampleCase& c) {
    Json j;
    j["name"] = c.name;
    j["description"] = c.description;
    j["dim"] = c.oracle.dim;
    j["base_x"] = to_json(c.base_pair.x);
    j["base_v"] = to_json(c.base_pair.v);
    j["lambda"] = c.lambda;
    j["r_level"] = c.r_level;
    j["flags"] = {{"prox_regular", c.flags.prox_regular},
                  {"prox_regular_level", c.flags.prox_regular_level},
                  {"subdiff_continuous", c.flags.subdiff_continuous},
                  {"c11", c.flags.c11},
                  {"c2", c.flags.c2},
                  {"norm", c.flags.norm},
                  {"prox_bounded", c.flags.prox_bounded}};
    if (c.piecewise_text) j["piecewise"] = *c.piecewise_text;
    return j;
}

}  // namespace epibundle
