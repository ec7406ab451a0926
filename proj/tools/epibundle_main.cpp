// Command-line front end: computes envelopes, proximal points, subderivative
// tables, generalized-twice-differentiability verdicts and bundles for
// registry functions or user piecewise expressions, and emits versioned JSON
// reports. Exit codes: 0 verdict computed, 1 corpus-run mismatch, 2 argument
// or capability error, 3 numeric error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "epibundle/json_io.hpp"

namespace eb = epibundle;
using eb::Json;
using eb::Vec;

namespace {

constexpr const char* kToolVersion = "0.1.0";

Vec parse_vector(const std::string& text, int expected_dim) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        vals.push_back(std::stod(item));
    }
    if (expected_dim > 0 && static_cast<int>(vals.size()) == 1 && expected_dim > 1)
        vals.assign(static_cast<size_t>(expected_dim), vals[0]);
    if (expected_dim > 0 && static_cast<int>(vals.size()) != expected_dim)
        throw eb::argument_error("expected " + std::to_string(expected_dim) +
                                 " components, got '" + text + "'");
    Vec v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

struct RunConfig {
    std::string fn;
    std::string x_text = "0";
    std::string v_text = "0";
    double lambda = -1.0;   // <0: use the registry default
    double r_level = -1.0;  // <0: use the registry default
    std::uint64_t seed = 2024;
    std::string out_path;
    std::string csv_path;
    double grad_step = 1e-6;

    // Estimation grid overrides.
    double t0 = 1e-1, t_rho = 0.5;
    int t_levels = 20;
    double delta0 = 0.5, delta_rho = 0.5;
    int delta_levels = 10;
    int directions = 64;
    int ball_samples = 32;
    double est_tol = 1e-3;

    // Bundle schedule overrides.
    double rate0 = 1e-1, rate_rho = 0.6;
    int rate_levels = 12;
    double cluster_eps = 2e-2;
    std::string mode = "";  // envelope|direct|both; empty: registry default

    bool attentive = true;
    std::string route = "both";
    double kappa = 1.0;
    double radius = 1e-2;
    int samples = 200;
    double s_level = 0.0;
    double eps = 0.25;
    bool trace = false;

    Json to_json() const {
        Json j;
        j["fn"] = fn;
        j["x"] = x_text;
        j["v"] = v_text;
        j["lambda"] = lambda;
        j["r_level"] = r_level;
        j["seed"] = seed;
        j["grid"] = {{"t0", t0},
                     {"t_rho", t_rho},
                     {"t_levels", t_levels},
                     {"delta0", delta0},
                     {"delta_rho", delta_rho},
                     {"delta_levels", delta_levels},
                     {"directions", directions},
                     {"ball_samples", ball_samples},
                     {"est_tol", est_tol}};
        j["schedule"] = {{"rate0", rate0},
                         {"rate_rho", rate_rho},
                         {"rate_levels", rate_levels},
                         {"cluster_eps", cluster_eps},
                         {"mode", mode}};
        j["attentive"] = attentive;
        j["route"] = route;
        j["kappa"] = kappa;
        j["radius"] = radius;
        j["samples"] = samples;
        j["s"] = s_level;
        j["eps"] = eps;
        return j;
    }
};

struct ResolvedFunction {
    eb::FunctionOracle oracle;
    const eb::ExampleCase* corpus_case = nullptr;  // null for user functions
    double lambda = 0.1;
    double r_level = 0.0;
};

ResolvedFunction resolve_function(const RunConfig& cfg) {
    ResolvedFunction rf;
    const auto& registry = eb::corpus_registry();
    auto it = registry.find(cfg.fn);
    if (it != registry.end()) {
        rf.corpus_case = &it->second;
        rf.oracle = it->second.oracle;
        rf.lambda = it->second.lambda;
        rf.r_level = it->second.r_level;
    } else if (!cfg.fn.empty() && cfg.fn[0] == '@') {
        std::ifstream in(cfg.fn.substr(1));
        if (!in)
            throw eb::argument_error("cannot open function file '" +
                                     cfg.fn.substr(1) + "'");
        std::stringstream text;
        text << in.rdbuf();
        rf.oracle = eb::piecewise_oracle(eb::parse_piecewise(text.str()),
                                         cfg.fn, cfg.grad_step);
    } else if (cfg.fn.find(" on ") != std::string::npos) {
        rf.oracle = eb::piecewise_oracle(eb::parse_piecewise(cfg.fn),
                                         "piecewise", cfg.grad_step);
    } else {
        throw eb::lookup_error(
            "'" + cfg.fn +
            "' is neither a registry name nor a piecewise expression "
            "(run `epibundle corpus list`)");
    }
    if (cfg.lambda >= 0.0) rf.lambda = cfg.lambda;
    if (cfg.r_level >= 0.0) rf.r_level = cfg.r_level;
    return rf;
}

eb::EpiGrid make_grid(const RunConfig& cfg) {
    eb::EpiGrid g;
    g.t0 = cfg.t0;
    g.t_rho = cfg.t_rho;
    g.t_levels = cfg.t_levels;
    g.delta0 = cfg.delta0;
    g.delta_rho = cfg.delta_rho;
    g.delta_levels = cfg.delta_levels;
    g.directions = cfg.directions;
    g.ball_samples = cfg.ball_samples;
    g.seed = cfg.seed;
    g.est_tol = cfg.est_tol;
    return g;
}

eb::SequenceSchedule make_schedule(const RunConfig& cfg, const ResolvedFunction& rf) {
    eb::SequenceSchedule s;
    if (rf.corpus_case) s = rf.corpus_case->schedule;
    s.r0 = cfg.rate0;
    s.rho = cfg.rate_rho;
    s.levels = cfg.rate_levels;
    s.seed = cfg.seed;
    s.cluster_eps = cfg.cluster_eps;
    if (cfg.mode == "envelope") s.mode = eb::SequenceSchedule::Mode::envelope_route;
    if (cfg.mode == "direct") s.mode = eb::SequenceSchedule::Mode::direct_route;
    if (cfg.mode == "both") s.mode = eb::SequenceSchedule::Mode::both;
    return s;
}

void emit_report(const RunConfig& cfg, const std::string& command,
                 Json result) {
    Json report;
    report["schema"] = eb::kReportSchema;
    report["tool_version"] = kToolVersion;
    report["command"] = command;
    report["seed"] = cfg.seed;
    report["config"] = cfg.to_json();
    report["result"] = std::move(result);
    std::string dump = report.dump(2);
    if (cfg.out_path.empty()) {
        std::cout << dump << "\n";
    } else {
        std::ofstream out(cfg.out_path);
        if (!out)
            throw eb::argument_error("cannot write '" + cfg.out_path + "'");
        out << dump << "\n";
    }
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw eb::argument_error("cannot write '" + path + "'");
    out << header << "\n";
    for (const auto& r : rows) out << r << "\n";
}

int run_envelope(const RunConfig& cfg, bool want_prox) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    eb::ProxOptions popts;
    std::vector<std::pair<Vec, double>> trace;
    if (cfg.trace) {
        popts.trace = &trace;
        popts.use_oracle_prox = false;
    }
    eb::ProxResult pr = eb::prox(rf.oracle, rf.lambda, x, popts);
    Json result = eb::to_json(pr);
    result["lambda"] = rf.lambda;
    if (cfg.trace && !cfg.csv_path.empty()) {
        std::vector<std::string> rows;
        for (const auto& [pt, val] : trace) {
            std::ostringstream row;
            row.precision(17);
            for (int i = 0; i < pt.size(); ++i) row << pt(i) << ",";
            row << val;
            rows.push_back(row.str());
        }
        write_csv(cfg.csv_path, "grid_point...,objective", rows);
        result["trace_csv"] = cfg.csv_path;
    }
    emit_report(cfg, want_prox ? "prox" : "envelope", std::move(result));
    return 0;
}

int run_subderiv(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    Vec v = parse_vector(cfg.v_text, rf.oracle.dim);
    eb::PrimalDualPair pair(rf.oracle, x, v);
    eb::EpiGrid grid = make_grid(cfg);

    Json table = Json::array();
    std::vector<std::string> csv_rows;
    for (const auto& d : eb::direction_set(rf.oracle.dim, grid)) {
        eb::SubderivEstimate est = eb::d2_estimate(rf.oracle, pair, d, grid);
        table.push_back(eb::to_json(est));
        if (!cfg.csv_path.empty()) {
            for (size_t j = 0; j < est.lower_windows.size(); ++j) {
                std::ostringstream row;
                row.precision(17);
                for (int i = 0; i < d.size(); ++i) row << d(i) << (i + 1 < d.size() ? " " : "");
                row << "," << j << "," << est.lower_windows[j].str() << ","
                    << est.upper_windows[j].str();
                csv_rows.push_back(row.str());
            }
        }
    }
    if (!cfg.csv_path.empty())
        write_csv(cfg.csv_path, "direction,window,lower,upper", csv_rows);
    Json result;
    result["table"] = std::move(table);
    emit_report(cfg, "subderiv", std::move(result));
    return 0;
}

int run_gtd_check(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    Vec v = parse_vector(cfg.v_text, rf.oracle.dim);
    eb::PrimalDualPair pair(rf.oracle, x, v);
    eb::EpiGrid grid = make_grid(cfg);

    eb::GtdVerdict verdict;
    if (cfg.route == "direct")
        verdict = eb::gtd_check_direct(rf.oracle, pair, grid);
    else if (cfg.route == "moreau")
        verdict = eb::gtd_check_moreau(rf.oracle, pair, rf.lambda, rf.r_level, grid);
    else
        verdict = eb::gtd_check_both(rf.oracle, pair, rf.lambda, rf.r_level, grid);
    emit_report(cfg, "gtd-check", eb::to_json(verdict));
    return 0;
}

int run_quad_bundle(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    Vec v = parse_vector(cfg.v_text, rf.oracle.dim);
    eb::PrimalDualPair pair(rf.oracle, x, v);
    eb::SequenceSchedule schedule = make_schedule(cfg, rf);
    eb::BundleReport report = eb::quad_bundle(rf.oracle, pair, rf.lambda,
                                              rf.r_level, schedule, cfg.attentive);
    if (!cfg.csv_path.empty()) {
        std::vector<std::string> rows;
        for (const auto& e : report.elements) {
            std::ostringstream row;
            row.precision(17);
            row << e.members << "," << e.spread;
            rows.push_back(row.str());
        }
        write_csv(cfg.csv_path, "members,spread", rows);
    }
    emit_report(cfg, "quad-bundle", eb::to_json(report));
    return 0;
}

int run_hessian_bundle(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    eb::SequenceSchedule schedule = make_schedule(cfg, rf);
    eb::HessianBundleReport report = eb::hessian_bundle(rf.oracle, x, schedule);
    emit_report(cfg, "hessian-bundle", eb::to_json(report));
    return 0;
}

int run_growth_check(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    Vec v = parse_vector(cfg.v_text, rf.oracle.dim);
    eb::PrimalDualPair pair(rf.oracle, x, v);
    bool ok = eb::growth_check(rf.oracle, pair, cfg.kappa, cfg.radius,
                               cfg.samples, make_grid(cfg));
    Json result;
    result["kappa"] = cfg.kappa;
    result["radius"] = cfg.radius;
    result["holds"] = ok;
    emit_report(cfg, "growth-check", std::move(result));
    return 0;
}

int run_svar_cert(const RunConfig& cfg) {
    ResolvedFunction rf = resolve_function(cfg);
    if (!rf.corpus_case || !rf.corpus_case->graph_samples)
        throw eb::capability_error(
            "svar-cert needs a registry function with a graph sampler");
    Vec x = parse_vector(cfg.x_text, rf.oracle.dim);
    Vec v = parse_vector(cfg.v_text, rf.oracle.dim);
    eb::PrimalDualPair center(rf.oracle, x, v);
    eb::AttentiveLocalization loc(center, cfg.eps);
    auto raw = rf.corpus_case->graph_samples(cfg.eps, cfg.samples, cfg.seed);
    std::vector<eb::PrimalDualPair> samples;
    for (const auto& s : raw)
        if (eb::localization_membership(rf.oracle, loc, s.x, s.v))
            samples.push_back(s);
    bool ok = eb::svarconv_certificate(rf.oracle, loc, cfg.s_level, cfg.radius,
                                       samples, make_grid(cfg));
    Json result;
    result["s"] = cfg.s_level;
    result["eps"] = cfg.eps;
    result["radius"] = cfg.radius;
    result["samples_used"] = samples.size();
    result["holds"] = ok;
    emit_report(cfg, "svar-cert", std::move(result));
    return 0;
}

// Expected-vs-computed regression over the registry ground truths. Returns
// the number of mismatches.
int run_corpus_case(const eb::ExampleCase& c, const RunConfig& cfg, Json& out) {
    int mismatches = 0;
    Json checks = Json::array();
    auto record = [&](const std::string& what, bool ok, const std::string& info) {
        checks.push_back({{"check", what}, {"ok", ok}, {"info", info}});
        if (!ok) ++mismatches;
        std::cout << (ok ? "  [ok]   " : "  [FAIL] ") << c.name << ": " << what
                  << (info.empty() ? "" : " (" + info + ")") << "\n";
    };

    eb::EpiGrid grid = make_grid(cfg);
    for (const auto& e : c.expected.d2_at_base) {
        eb::SubderivEstimate est = eb::d2_estimate(c.oracle, c.base_pair, e.w, grid);
        bool ok;
        std::ostringstream info;
        if (e.value.is_pos_inf()) {
            ok = est.verdict == eb::EstimateVerdict::pos_inf;
            info << "expected +inf, verdict " << to_string(est.verdict);
        } else if (e.value.is_neg_inf()) {
            ok = est.verdict == eb::EstimateVerdict::neg_inf;
            info << "expected -inf, verdict " << to_string(est.verdict);
        } else {
            ok = est.verdict == eb::EstimateVerdict::finite &&
                 std::abs(est.lower.value() - e.value.value()) <=
                     2e-2 * std::max(1.0, std::abs(e.value.value()));
            info << "expected " << e.value.str() << ", got " << est.lower.str();
        }
        record("d2 at base pair", ok, info.str());
    }

    if (c.expected.gtd) {
        eb::GtdVerdict v = eb::gtd_check_direct(c.oracle, c.base_pair, grid);
        record("gtd decision (direct)", v.decision == *c.expected.gtd,
               std::string("expected ") + to_string(*c.expected.gtd) + ", got " +
                   to_string(v.decision));
    }

    if (!c.expected.bundle_elements.empty() || c.expected.bundle_coefficient_range) {
        eb::SequenceSchedule schedule = c.schedule;
        schedule.seed = cfg.seed;
        eb::BundleReport r = eb::quad_bundle(c.oracle, c.base_pair, c.lambda,
                                             c.r_level, schedule, true);
        if (c.expected.bundle_coefficient_range) {
            auto [lo, hi] = *c.expected.bundle_coefficient_range;
            bool ok = r.coefficient_range.has_value() &&
                      r.coefficient_range->first >= lo - 5e-2 &&
                      r.coefficient_range->second <= hi + 5e-2 &&
                      r.coefficient_range->first <= lo + 5e-2 &&
                      r.coefficient_range->second >= hi - 5e-2;
            record("bundle coefficient range", ok,
                   r.coefficient_range
                       ? "[" + std::to_string(r.coefficient_range->first) + "," +
                             std::to_string(r.coefficient_range->second) + "]"
                       : "absent");
        } else {
            bool ok = r.elements.size() == c.expected.bundle_elements.size();
            for (const auto& q : c.expected.bundle_elements) {
                bool found = false;
                for (const auto& e : r.elements)
                    if (eb::gqf_graph_distance(q, e.representative) <=
                        schedule.cluster_eps)
                        found = true;
                ok = ok && found;
            }
            record("quad bundle elements", ok,
                   std::to_string(r.elements.size()) + " clusters, expected " +
                       std::to_string(c.expected.bundle_elements.size()));
        }
    }

    if (!c.expected.hessian_bundle.empty()) {
        eb::SequenceSchedule schedule = c.schedule;
        schedule.seed = cfg.seed;
        eb::HessianBundleReport r = eb::hessian_bundle(c.oracle, c.base_pair.x,
                                                       schedule);
        bool ok = r.clusters.size() == c.expected.hessian_bundle.size();
        for (const auto& h : c.expected.hessian_bundle) {
            bool found = false;
            for (const auto& cl : r.clusters)
                if ((h.mat() - cl.representative.mat()).norm() <=
                    1e-2 * (1.0 + h.mat().norm()))
                    found = true;
            ok = ok && found;
        }
        record("hessian bundle", ok,
               std::to_string(r.clusters.size()) + " clusters");
    }

    for (const auto& [kappa, expected] : c.expected.growth_at_1e2) {
        bool got = eb::growth_check(c.oracle, c.base_pair, kappa, 1e-2, 200, grid);
        record("growth kappa=" + std::to_string(kappa), got == expected,
               got ? "holds" : "fails");
    }

    out[c.name] = checks;
    return mismatches;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"second-order variational analysis toolkit"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* cmd, bool needs_fn = true) {
        CLI::Option* fn = cmd->add_option(
            "--fn", cfg.fn,
            "registry name, piecewise text ('expr on [a,b); ...'), or @file");
        if (needs_fn) fn->required();
        cmd->add_option("--x", cfg.x_text, "base point (comma separated)");
        cmd->add_option("--v", cfg.v_text, "base subgradient (comma separated)");
        cmd->add_option("--lambda", cfg.lambda, "envelope parameter");
        cmd->add_option("--r-level", cfg.r_level, "prox-regularity level");
        cmd->add_option("--seed", cfg.seed, "deterministic sampling seed");
        cmd->add_option("--out", cfg.out_path, "write the JSON report here");
        cmd->add_option("--csv", cfg.csv_path, "write CSV evidence here");
        cmd->add_option("--grad-step", cfg.grad_step,
                        "finite-difference step for piecewise gradients");
        cmd->add_option("--t0", cfg.t0, "largest t level");
        cmd->add_option("--t-rho", cfg.t_rho, "t schedule ratio");
        cmd->add_option("--t-levels", cfg.t_levels, "t schedule length");
        cmd->add_option("--delta0", cfg.delta0, "largest ball radius");
        cmd->add_option("--delta-rho", cfg.delta_rho, "ball schedule ratio");
        cmd->add_option("--delta-levels", cfg.delta_levels, "ball schedule length");
        cmd->add_option("--directions", cfg.directions, "direction count");
        cmd->add_option("--ball-samples", cfg.ball_samples, "samples per ball");
        cmd->add_option("--est-tol", cfg.est_tol, "window stabilization tolerance");
        cmd->add_option("--rate0", cfg.rate0, "largest approach rate");
        cmd->add_option("--rate-rho", cfg.rate_rho, "approach rate ratio");
        cmd->add_option("--rate-levels", cfg.rate_levels, "approach levels");
        cmd->add_option("--cluster-eps", cfg.cluster_eps, "cluster tolerance");
        cmd->add_option("--mode", cfg.mode, "bundle route: envelope|direct|both");
    };

    CLI::App* envelope = app.add_subcommand("envelope", "Moreau envelope value");
    add_common(envelope);
    envelope->add_flag("--trace", cfg.trace, "record the coarse grid to --csv");

    CLI::App* prox_cmd = app.add_subcommand("prox", "proximal mapping");
    add_common(prox_cmd);

    CLI::App* subderiv = app.add_subcommand(
        "subderiv", "second-order subderivative table over the direction grid");
    add_common(subderiv);

    CLI::App* gtd = app.add_subcommand(
        "gtd-check", "generalized twice differentiability verdict");
    add_common(gtd);
    gtd->add_option("--route", cfg.route, "direct|moreau|both");

    CLI::App* qb = app.add_subcommand("quad-bundle", "quadratic bundle sampler");
    add_common(qb);
    qb->add_option("--attentive", cfg.attentive,
                   "enforce f(x_k) -> f(x) along paths");

    CLI::App* hb = app.add_subcommand("hessian-bundle", "Hessian bundle sampler");
    add_common(hb);

    CLI::App* growth = app.add_subcommand("growth-check",
                                          "second-order growth certificate");
    add_common(growth);
    growth->add_option("--kappa", cfg.kappa, "growth modulus");
    growth->add_option("--radius", cfg.radius, "ball radius");
    growth->add_option("--samples", cfg.samples, "sample count");

    CLI::App* svar = app.add_subcommand(
        "svar-cert", "variational s-convexity inequality certificate");
    add_common(svar);
    svar->add_option("--s", cfg.s_level, "convexity level s");
    svar->add_option("--radius", cfg.radius, "probe radius");
    svar->add_option("--eps", cfg.eps, "localization eps");
    svar->add_option("--samples", cfg.samples, "graph sample count");

    CLI::App* corpus = app.add_subcommand("corpus", "registry operations");
    corpus->require_subcommand(1);
    CLI::App* corpus_list = corpus->add_subcommand("list", "list registered cases");
    CLI::App* corpus_run =
        corpus->add_subcommand("run", "expected-vs-computed regression");
    add_common(corpus_run, false);
    bool run_all = false;
    corpus_run->add_flag("--all", run_all, "run every registered case");
    CLI::App* corpus_export = corpus->add_subcommand("export", "case JSON export");
    add_common(corpus_export);

    CLI11_PARSE(app, argc, argv);

    try {
        if (envelope->parsed()) return run_envelope(cfg, false);
        if (prox_cmd->parsed()) return run_envelope(cfg, true);
        if (subderiv->parsed()) return run_subderiv(cfg);
        if (gtd->parsed()) return run_gtd_check(cfg);
        if (qb->parsed()) return run_quad_bundle(cfg);
        if (hb->parsed()) return run_hessian_bundle(cfg);
        if (growth->parsed()) return run_growth_check(cfg);
        if (svar->parsed()) return run_svar_cert(cfg);
        if (corpus_list->parsed()) {
            Json names = Json::array();
            for (const auto& n : eb::corpus_names()) {
                const auto& c = eb::corpus_get(n);
                names.push_back({{"name", n},
                                 {"dim", c.oracle.dim},
                                 {"description", c.description}});
                std::cout << n << "  (dim " << c.oracle.dim << "): "
                          << c.description << "\n";
            }
            if (!cfg.out_path.empty()) {
                std::ofstream out(cfg.out_path);
                out << Json({{"schema", eb::kReportSchema}, {"cases", names}}).dump(2)
                    << "\n";
            }
            return 0;
        }
        if (corpus_export->parsed()) {
            emit_report(cfg, "corpus export",
                        eb::case_to_json(eb::corpus_get(cfg.fn)));
            return 0;
        }
        if (corpus_run->parsed()) {
            std::vector<std::string> names;
            if (run_all)
                names = eb::corpus_names();
            else if (!cfg.fn.empty())
                names = {cfg.fn};
            else
                throw eb::argument_error("corpus run: pass --all or --fn NAME");
            int mismatches = 0;
            Json out;
            for (const auto& n : names) {
                std::cout << n << ":\n";
                mismatches += run_corpus_case(eb::corpus_get(n), cfg, out);
            }
            emit_report(cfg, "corpus run", std::move(out));
            std::cout << (mismatches == 0 ? "all checks passed\n"
                                          : std::to_string(mismatches) +
                                                " mismatches\n");
            return mismatches == 0 ? 0 : 1;
        }
    } catch (const eb::numeric_error& e) {
        std::cerr << Json({{"error", e.what()}, {"kind", "numeric"}}).dump() << "\n";
        return 3;
    } catch (const eb::toolkit_error& e) {
        std::cerr << Json({{"error", e.what()}, {"kind", "argument"}}).dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << Json({{"error", e.what()}, {"kind", "internal"}}).dump() << "\n";
        return 3;
    }
    return 0;
}
