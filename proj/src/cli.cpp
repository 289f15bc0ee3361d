#include "hkfloer/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hkfloer/floer.hpp"
#include "hkfloer/io.hpp"
#include "hkfloer/monitors.hpp"

namespace hkfloer {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json default_tolerances() {
    return json{{"hypercontact", 1e-12}, {"spectrum", 1e-8},      {"torus_modes", 1e-10},
                {"energy_identity", 1e-8}, {"gradient_fd", 1e-7}, {"hessian_symmetry", 1e-10},
                {"oscillation", 1e-8},     {"energy_drop", 1e-6}, {"decay_rate", 0.10},
                {"c_ratio_drift", 0.25},   {"ball_identity", 1e-8}};
}

json default_config(const std::string& command) {
    json cfg;
    cfg["domain"] = {{"kind", "torus3"}, {"degree", 3}, {"N", 8},
                     {"frame", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}},
                     {"res_angle", 0}, {"res_radial", 0}};
    cfg["target"] = {{"n", 1}, {"lattice", 1.0}};
    cfg["hamiltonian"] = {{"amplitudes", {0.05, 0.06, 0.07, 0.08}},
                          {"shifts", {0.0, 0.0, 0.0, 0.0}},
                          {"double_freq", json::array()},
                          {"coupling", {{"amplitude", 0.0}, {"axis", 0}, {"domain_mode", 1}}}};
    cfg["tolerances"] = default_tolerances();
    cfg["seed"] = 1;
    cfg["eps_list"] = {0.2, 0.1, 0.05};
    cfg["num_random_fields"] = 100;
    cfg["random_h_trials"] = 20;
    cfg["index_degree"] = 3;
    cfg["pair"] = {{"mu_minus", 4}, {"i_minus", 0}, {"mu_plus", 3}, {"i_plus", 0}};
    cfg["bvp"] = {{"slices_per_unit", 16}, {"half_length", 0.0}, {"eps", 0.1}};
    cfg["slice_radii"] = {1.0, 0.7};
    cfg["newton"] = {{"solve_degree", 1}, {"report_degree", 3}};
    if (command == "verify-hypercontact" || command == "slice-check")
        cfg["domain"] = {{"kind", "sphere3"}, {"degree", 2}, {"N", 8},
                         {"frame", {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}},
                         {"res_angle", 0}, {"res_radial", 0}};
    return cfg;
}

void merge_validate(json& base, const json& user, const std::string& prefix) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!base.contains(it.key()))
            throw ConfigError("unknown config key: " + prefix + it.key());
        if (it->is_object() && base[it.key()].is_object())
            merge_validate(base[it.key()], *it, prefix + it.key() + ".");
        else
            base[it.key()] = *it;
    }
}

struct Context {
    json cfg;
    fs::path out;
    bool strict = false;
    std::uint64_t seed = 1;

    double tol(const std::string& key) const { return cfg["tolerances"][key].get<double>(); }
};

std::shared_ptr<const FrameDomain> domain_from_config(const json& cfg) {
    const auto& dj = cfg["domain"];
    const std::string kind = dj["kind"].get<std::string>();
    if (kind == "sphere3")
        return build_sphere_domain(dj["degree"].get<int>(), dj["res_angle"].get<int>(),
                                   dj["res_radial"].get<int>());
    if (kind == "torus3") {
        Eigen::Matrix3d A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A(i, j) = dj["frame"][i][j].get<double>();
        return build_torus_domain(A, dj["N"].get<int>(), dj["degree"].get<int>());
    }
    throw ConfigError("domain.kind must be sphere3 or torus3");
}

Target target_from_config(const json& cfg) {
    Target t;
    t.n = cfg["target"]["n"].get<int>();
    if (!cfg["target"]["lattice"].is_null() && cfg["target"]["lattice"].get<double>() > 0)
        t.lattice = cfg["target"]["lattice"].get<double>();
    return t;
}

HamiltonianSpec hamiltonian_from_config(const json& cfg, const Target& target) {
    const auto& hj = cfg["hamiltonian"];
    const int m = 4 * target.n;
    Eigen::VectorXd amp(m), shift(m);
    for (int i = 0; i < m; ++i) {
        amp[i] = hj["amplitudes"][i].get<double>();
        shift[i] = hj["shifts"][i].get<double>();
    }
    std::vector<int> dbl;
    for (const auto& v : hj["double_freq"]) dbl.push_back(v.get<int>());
    HamiltonianSpec H =
        separable_mixed(target.n, amp, shift, dbl, target.lattice.value_or(1.0));
    const double ca = hj["coupling"]["amplitude"].get<double>();
    if (ca != 0.0) {
        HamTerm t;
        t.amplitude = ca;
        t.target_freq = Eigen::VectorXi::Zero(m);
        t.target_freq[hj["coupling"]["axis"].get<int>()] = 1;
        t.domain_basis = hj["coupling"]["domain_mode"].get<int>();
        H.terms.push_back(t);
    }
    return H;
}

NewtonOptions newton_from_config(const json& cfg, const FrameDomain& d) {
    NewtonOptions opt;
    opt.solve_degree = std::min(cfg["newton"]["solve_degree"].get<int>(), d.degree);
    opt.report_degree = std::min(cfg["newton"]["report_degree"].get<int>(), d.degree);
    return opt;
}

// ---------------------------------------------------------------------------

json cmd_verify_hypercontact(Context& ctx, bool& pass) {
    json out;
    auto sphere = build_sphere_domain(ctx.cfg["domain"]["degree"].get<int>());
    const HypercontactReport r = verify_hypercontact(*sphere);
    out["sphere"] = {{"kappa", r.kappa},
                     {"alpha_pairing", r.max_alpha_pairing},
                     {"dalpha", r.max_dalpha},
                     {"bracket", r.max_bracket},
                     {"mu", r.max_mu},
                     {"dalpha_vs_star", r.max_star},
                     {"quadrature_defect", r.quadrature_defect},
                     {"max_violation", r.max_violation()}};
    auto torus = build_torus_domain(Eigen::Matrix3d::Identity(), 8);
    const HypercontactReport rt = verify_hypercontact(*torus);
    out["torus"] = {{"dual_pairing", rt.max_alpha_pairing},
                    {"bracket", rt.max_bracket},
                    {"frame_condition", torus->frame_cond}};
    const double tol = ctx.tol("hypercontact");
    pass = r.max_violation() <= tol && std::abs(r.kappa - 2.0) <= tol &&
           rt.max_alpha_pairing <= tol;
    return out;
}

json cmd_spectrum(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const int degree = ctx.cfg["domain"]["degree"].get<int>();
    const SpectralDecomposition s = spectrum(d, degree, target.n);
    write_spectrum_csv((ctx.out / "spectrum.csv").string(), s);
    out["count"] = s.eigenvalues.size();
    out["min"] = s.eigenvalues.minCoeff();
    out["max"] = s.eigenvalues.maxCoeff();
    out["max_residual"] = s.residuals.maxCoeff();
    const double tol = ctx.tol("spectrum");
    pass = s.residuals.maxCoeff() <= tol;
    if (d->kind == DomainKind::Sphere3) {
        // eigenvalue structure mu^2 + 2 mu = d(d+2)
        double worst = 0.0;
        for (int i = 0; i < s.eigenvalues.size(); ++i) {
            const double mu = s.eigenvalues[i];
            const double q = mu * mu + 2.0 * mu;
            double best = 1e300;
            for (int dd = 0; dd <= degree; ++dd)
                best = std::min(best, std::abs(q - dd * (dd + 2.0)));
            worst = std::max(worst, best);
        }
        out["ddDD_defect"] = worst;
        pass = pass && worst <= tol;
        for (double want : {-3.0, 1.0, 0.0, -4.0}) {
            if (degree < 2 && want == -4.0) continue;
            double best = 1e300;
            for (int i = 0; i < s.eigenvalues.size(); ++i)
                best = std::min(best, std::abs(s.eigenvalues[i] - want));
            out["nearest"][std::to_string(int(want))] = best;
            pass = pass && best <= tol;
        }
    } else {
        // compare with per-mode closed forms
        double worst = 0.0;
        for (const auto& mode : d->modes) {
            if (mode.sin_idx < 0) continue;
            const ModeBlock mb = mode_block(*d, mode.k, target.n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mb.block, Eigen::EigenvaluesOnly);
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                worst = std::max(worst,
                                 std::abs(std::abs(es.eigenvalues()[i]) - mb.closed_form_ev));
        }
        out["mode_defect"] = worst;
        pass = pass && worst <= ctx.tol("torus_modes");
    }
    return out;
}

json cmd_critical_points(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    const auto pts =
        find_critical_points(H, d, target, critical_seeds(H, d, target),
                             newton_from_config(ctx.cfg, *d));
    std::ofstream csv(ctx.out / "critical_points.csv");
    csv << "index,mu,residual,hessian_min_abs,action";
    for (int c = 0; c < 4 * target.n; ++c) csv << ",x" << c;
    csv << "\n" << std::setprecision(17);
    json list = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Eigen::VectorXd x = pts[i].point();
        json pj = {{"mu", pts[i].mu},
                   {"residual", pts[i].residual},
                   {"hessian_min_abs", pts[i].hessian_min_abs},
                   {"action", pts[i].action_value},
                   {"nondegenerate", pts[i].nondegenerate}};
        json xs = json::array();
        for (int c = 0; c < x.size(); ++c) xs.push_back(x[c]);
        pj["point"] = xs;
        list.push_back(pj);
        csv << i << "," << pts[i].mu << "," << pts[i].residual << ","
            << pts[i].hessian_min_abs << "," << pts[i].action_value;
        for (int c = 0; c < x.size(); ++c) csv << "," << x[c];
        csv << "\n";
    }
    out["points"] = list;
    out["count"] = pts.size();
    bool all_ok = !pts.empty();
    for (const auto& p : pts) all_ok = all_ok && p.nondegenerate && p.residual <= 1e-10;
    out["expected_minimum"] = 16;
    pass = all_ok && static_cast<int>(pts.size()) >= 16;
    return out;
}

json cmd_index(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    const int degree = std::min(ctx.cfg["index_degree"].get<int>(), d->degree);
    NewtonOptions nopt = newton_from_config(ctx.cfg, *d);
    nopt.compute_mu = false;
    const auto pts = find_critical_points(H, d, target, critical_seeds(H, d, target), nopt);
    json list = json::array();
    bool ok = !pts.empty();
    bool first = true;
    for (const auto& p : pts) {
        const Eigen::VectorXd x = p.point();
        const FloerIndexResult r = floer_index(d, target, x, H, degree);
        const int ind = morse_index(H, x);
        list.push_back({{"mu", r.mu},
                        {"morse_index", ind},
                        {"dim_minus_index", 4 * target.n - ind},
                        {"stable", r.mu == r.mu_coarser},
                        {"eps", r.eps}});
        ok = ok && (r.mu == 4 * target.n - ind);
        if (first) {
            write_eigentrack_csv((ctx.out / "eigentrack.csv").string(), r.flow);
            std::vector<SvgSeries> series;
            const int levels = static_cast<int>(r.flow.eigenvalues.front().size());
            for (int l = 0; l < std::min(levels, 48); ++l) {
                SvgSeries s;
                for (std::size_t k = 0; k < r.flow.t_samples.size(); ++k) {
                    s.x.push_back(r.flow.t_samples[k]);
                    s.y.push_back(r.flow.eigenvalues[k][l]);
                }
                series.push_back(s);
            }
            write_svg_plot((ctx.out / "eigentrack.svg").string(), series,
                           "eigenvalue trajectories", "t", "eigenvalue");
            first = false;
        }
    }
    out["points"] = list;

    // closed-loop families: spectral flow must vanish for the flat target
    json loops = json::array();
    {
        const Eigen::VectorXd x0 = pts.front().point();
        const OperatorFamily base = hessian_family_constant(d, target, x0, H, 0.0, degree);
        // constant loop
        OperatorFamily c1 = base;
        c1.blocks_at = [base](double) { return base.blocks_at(1.0); };
        loops.push_back({{"name", "constant"}, {"flow", loop_flow_check(c1)}});
        // translate the base point around a full lattice period; H is periodic,
        // so the family closes while the spectrum genuinely moves
        OperatorFamily c2 = base;
        const double L = target.lattice.value_or(1.0);
        c2.blocks_at = [x0, d, target, H, degree, L](double t) {
            Eigen::VectorXd xt = x0;
            xt[0] += L * t;
            return hessian_family_constant(d, target, xt, H, 0.0, degree).blocks_at(1.0);
        };
        loops.push_back({{"name", "translates"}, {"flow", loop_flow_check(c2)}});
        // deform H through y-dependent perturbations and back
        OperatorFamily c3 = base;
        c3.blocks_at = [d, target, x0, H, degree](double t) {
            HamiltonianSpec Ht = H;
            HamTerm extra;
            extra.amplitude = 0.02 * std::sin(std::numbers::pi * t);
            extra.target_freq = Eigen::VectorXi::Zero(4 * target.n);
            extra.target_freq[0] = 1;
            extra.domain_basis = 1;
            Ht.terms.push_back(extra);
            return hessian_family_constant(d, target, x0, Ht, 0.0, degree).blocks_at(1.0);
        };
        loops.push_back({{"name", "hamiltonian"}, {"flow", loop_flow_check(c3)}});
    }
    out["loops"] = loops;
    for (const auto& l : loops) ok = ok && l["flow"].get<int>() == 0;
    pass = ok;
    return out;
}

std::pair<CriticalPoint, CriticalPoint> pick_pair(const json& cfg,
                                                  const std::vector<CriticalPoint>& pts) {
    const int mu_m = cfg["pair"]["mu_minus"].get<int>();
    const int mu_p = cfg["pair"]["mu_plus"].get<int>();
    const int i_m = cfg["pair"]["i_minus"].get<int>();
    const int i_p = cfg["pair"]["i_plus"].get<int>();
    std::vector<const CriticalPoint*> minus, plus;
    for (const auto& p : pts) {
        if (p.mu == mu_m) minus.push_back(&p);
        if (p.mu == mu_p) plus.push_back(&p);
    }
    if (i_m >= static_cast<int>(minus.size()) || i_p >= static_cast<int>(plus.size()))
        throw ConfigError("pair selection out of range");
    return {*minus[i_m], *plus[i_p]};
}

// first pair with an odd trajectory count, preferring the configured one
std::pair<CriticalPoint, CriticalPoint> connected_pair(const json& cfg,
                                                       const HamiltonianSpec& H,
                                                       const std::vector<CriticalPoint>& pts) {
    auto [a, b] = pick_pair(cfg, pts);
    if (morse_trajectories(a.point(), b.point(), H).count > 0) return {a, b};
    for (const auto& upper : pts)
        for (const auto& lower : pts) {
            if (upper.mu - lower.mu != 1) continue;
            try {
                if (morse_trajectories(upper.point(), lower.point(), H).count > 0)
                    return {upper, lower};
            } catch (const ConfigError&) {
            }
        }
    throw NumericalError("no connected index-1 pair found");
}

json trajectory_json(const TrajectorySolution& sol) {
    double max_increase = 0.0;
    for (std::size_t i = 0; i + 1 < sol.action_values.size(); ++i)
        max_increase =
            std::max(max_increase, sol.action_values[i + 1] - sol.action_values[i]);
    return json{{"eps", sol.epsilon},
                {"residual", sol.residual},
                {"energy", sol.energy},
                {"action_drop", sol.action_drop},
                {"energy_vs_drop_rel",
                 std::abs(sol.energy - sol.action_drop) / std::max(1e-300, std::abs(sol.action_drop))},
                {"max_action_increase", max_increase},
                {"oscillation", sol.max_oscillation},
                {"sup_frame_deriv", sol.sup_frame_deriv},
                {"boundary_defect", sol.boundary_defect},
                {"newton_iterations", sol.newton_iterations},
                {"slices", sol.slices.size()}};
}

json cmd_connect(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    const auto pts = find_critical_points(H, d, target, critical_seeds(H, d, target),
                                          newton_from_config(ctx.cfg, *d));
    auto [upper, lower] = connected_pair(ctx.cfg, H, pts);
    BvpOptions opt;
    opt.slices_per_unit = ctx.cfg["bvp"]["slices_per_unit"].get<int>();
    opt.half_length = ctx.cfg["bvp"]["half_length"].get<double>();
    const double eps = ctx.cfg["bvp"]["eps"].get<double>();
    const TrajectorySolution sol = connect_orbit_bvp(upper, lower, H, eps, opt);
    write_trajectory_csv((ctx.out / "trajectory.csv").string(), sol, H);
    write_trajectory_binary((ctx.out / "trajectory.bin").string(), sol);
    out = trajectory_json(sol);
    const DecayFit fit = decay_rate(sol, H);
    out["decay"] = {{"rho_left", fit.rho_left},
                    {"rho_right", fit.rho_right},
                    {"r2_left", fit.r2_left},
                    {"r2_right", fit.r2_right}};
    pass = sol.residual <= 1e-8 &&
           out["energy_vs_drop_rel"].get<double>() <= ctx.tol("energy_drop") &&
           out["max_action_increase"].get<double>() <= 1e-9;
    return out;
}

json cmd_adiabatic(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    const auto pts = find_critical_points(H, d, target, critical_seeds(H, d, target),
                                          newton_from_config(ctx.cfg, *d));
    auto [upper, lower] = connected_pair(ctx.cfg, H, pts);
    BvpOptions opt;
    opt.slices_per_unit = ctx.cfg["bvp"]["slices_per_unit"].get<int>();
    std::vector<double> eps_list;
    for (const auto& e : ctx.cfg["eps_list"]) eps_list.push_back(e.get<double>());
    const AdiabaticReport rep = adiabatic_experiment(H, eps_list, upper, lower, opt);
    json recs = json::array();
    std::vector<SvgSeries> osc_series(1), c_series(1);
    for (const auto& r : rep.records) {
        recs.push_back({{"eps", r.eps},
                        {"oscillation", r.oscillation},
                        {"sup_frame_deriv", r.sup_frame_deriv},
                        {"c_fit", r.c_fit},
                        {"energy", r.energy},
                        {"action_drop", r.action_drop}});
        osc_series[0].x.push_back(r.eps);
        osc_series[0].y.push_back(r.oscillation);
        c_series[0].x.push_back(r.eps);
        c_series[0].y.push_back(r.c_fit);
    }
    write_svg_plot((ctx.out / "oscillation_vs_eps.svg").string(), osc_series,
                   "slice oscillation vs eps", "eps", "oscillation");
    write_svg_plot((ctx.out / "c_vs_eps.svg").string(), c_series,
                   "sup |d_v u| / eps", "eps", "C");
    out["records"] = recs;
    out["max_ratio_drift"] = rep.max_ratio_drift;
    out["c_ratio_ok"] = rep.c_ratio_ok;
    const bool coupled =
        ctx.cfg["hamiltonian"]["coupling"]["amplitude"].get<double>() != 0.0;
    pass = true;
    for (const auto& r : rep.records) {
        if (!coupled) pass = pass && r.oscillation <= ctx.tol("oscillation");
        pass = pass &&
               std::abs(r.energy - r.action_drop) <=
                   ctx.tol("energy_drop") * std::abs(r.action_drop);
    }
    if (coupled) pass = pass && rep.c_ratio_ok && rep.max_ratio_drift <= ctx.tol("c_ratio_drift");
    return out;
}

json cmd_floer(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    ComplexOptions copt;
    copt.newton = newton_from_config(ctx.cfg, *d);
    const ChainComplex c = build_complex(H, d, target, copt);
    const bool dd = verify_boundary_squared(c);
    const auto dims = homology(c);
    out["generators"] = c.generators.size();
    json grading = json::array(), hdims = json::array();
    for (int k = 0; k <= 4 * target.n; ++k) {
        grading.push_back(c.degree_count(k));
        hdims.push_back(dims[k]);
    }
    out["grading"] = grading;
    out["homology"] = hdims;
    out["boundary_squared_zero"] = dd;
    out["betti_match"] = betti_compare(dims, target);
    {
        std::ofstream csv(ctx.out / "boundary.csv");
        csv << "k,row,col,mod2,count\n";
        for (int k = 1; k <= 4 * target.n; ++k)
            for (int i = 0; i < c.boundary[k].rows(); ++i)
                for (int j = 0; j < c.boundary[k].cols(); ++j)
                    if (c.trajectory_counts[k](i, j) != 0)
                        csv << k << "," << i << "," << j << "," << c.boundary[k](i, j) << ","
                            << c.trajectory_counts[k](i, j) << "\n";
        std::ofstream gens(ctx.out / "generators.json");
        json garr = json::array();
        for (const auto& g : c.generators) {
            const Eigen::VectorXd x = g.point();
            json xs = json::array();
            for (int i = 0; i < x.size(); ++i) xs.push_back(x[i]);
            garr.push_back({{"mu", g.mu}, {"action", g.action_value}, {"point", xs}});
        }
        gens << garr.dump(2) << "\n";
    }
    pass = dd && out["betti_match"].get<bool>() &&
           static_cast<int>(c.generators.size()) >= 16;

    // randomized family: generator count and homology dims must be constant
    const int trials = ctx.cfg["random_h_trials"].get<int>();
    if (trials > 0) {
        std::mt19937_64 gen(ctx.seed);
        int min_generators = 1 << 30;
        bool dims_stable = true;
        for (int t = 0; t < trials; ++t) {
            Eigen::VectorXd amp(4 * target.n), shift(4 * target.n);
            for (int i = 0; i < amp.size(); ++i) {
                amp[i] = 0.03 + 0.05 * uniform01(gen());
                shift[i] = uniform01(gen());
            }
            const HamiltonianSpec Ht =
                separable_cos(target.n, amp, shift, target.lattice.value_or(1.0));
            const ChainComplex ct = build_complex(Ht, d, target, copt);
            min_generators = std::min(min_generators, int(ct.generators.size()));
            const auto dt = homology(ct);
            if (dt != dims) dims_stable = false;
        }
        out["family_trials"] = trials;
        out["family_min_generators"] = min_generators;
        out["family_dims_stable"] = dims_stable;
        pass = pass && min_generators >= 16 && dims_stable;
    }
    return out;
}

json cmd_monitors(Context& ctx, bool& pass) {
    json out;
    auto d = domain_from_config(ctx.cfg);
    const Target target = target_from_config(ctx.cfg);
    const HamiltonianSpec H = hamiltonian_from_config(ctx.cfg, target);
    const auto pts = find_critical_points(H, d, target, critical_seeds(H, d, target),
                                          newton_from_config(ctx.cfg, *d));
    auto [upper, lower] = connected_pair(ctx.cfg, H, pts);
    BvpOptions opt;
    opt.slices_per_unit = ctx.cfg["bvp"]["slices_per_unit"].get<int>();
    const double eps = ctx.cfg["bvp"]["eps"].get<double>();
    const TrajectorySolution sol = connect_orbit_bvp(upper, lower, H, eps, opt);
    const AprioriMonitorReport rep = monitor_apriori(sol, H);
    out["ler"] = {{"min_lhs", rep.ler_min_lhs},
                  {"fit_A", rep.ler_fit_A},
                  {"fit_B", rep.ler_fit_B},
                  {"fit_C", rep.ler_fit_C}};
    out["les"] = {{"fit_C", rep.les_fit_C}};
    out["ddu"] = {{"lhs", rep.ddu_lhs},
                  {"rhs", rep.ddu_rhs},
                  {"constant", rep.ddu_constant},
                  {"holds", rep.ddu_holds}};
    out["dudsu"] = {{"min_margin", rep.dudsu_min_margin}, {"holds", rep.dudsu_holds}};

    // Heinz-type mean value monitor on the energy density of the trajectory
    const int m = static_cast<int>(sol.slices.size());
    Eigen::MatrixXd e(m, d->num_nodes());
    for (int i = 0; i < m; ++i) {
        const FieldMap du = sol.s_derivative(i, H);
        std::array<Eigen::MatrixXd, 3> dv;
        for (int ax = 0; ax < 3; ++ax)
            dv[ax] = (sol.slices[i].coeffs * d->deriv[ax].transpose()) * d->basis_values;
        for (int p = 0; p < d->num_nodes(); ++p) {
            double frame = 0.0;
            for (int ax = 0; ax < 3; ++ax) frame += dv[ax].col(p).squaredNorm();
            e(i, p) = 0.5 * du.values.col(p).squaredNorm() + 0.5 * frame;
        }
    }
    const HeinzReport hz =
        heinz_monitor(*d, sol.s_grid, e, rep.ler_fit_A, rep.ler_fit_B, 1.5, 4);
    out["heinz"] = {{"alpha", hz.alpha},
                    {"sup_e", hz.sup_e},
                    {"integral_e", hz.integral_e},
                    {"min_slack", hz.min_slack},
                    {"hypothesis_holds", hz.hypothesis_holds},
                    {"c_empirical", hz.c_empirical}};
    pass = rep.ddu_holds && rep.dudsu_holds && hz.hypothesis_holds;
    return out;
}

json cmd_slice_check(Context& ctx, bool& pass) {
    json out;
    auto d = build_sphere_domain(ctx.cfg["domain"]["degree"].get<int>());
    const int num = ctx.cfg["num_random_fields"].get<int>();
    const double tol = ctx.tol("ball_identity");
    bool ok = true;
    json radii = json::array();
    const FieldMap ident = sphere_identity_field(d);
    for (const auto& rj : ctx.cfg["slice_radii"]) {
        const double r = rj.get<double>();
        const SliceCheckReport rep = sphere_slice_check(ident, r);
        radii.push_back({{"r", r},
                         {"A_r", rep.a_r},
                         {"E_r", rep.e_r},
                         {"iso_margin", rep.iso_margin},
                         {"ArE_residual", rep.are_residual},
                         {"ball_energy", rep.ball_energy},
                         {"ball_identity_rhs", rep.ball_identity_rhs},
                         {"ball_residual", rep.ball_residual}});
        ok = ok && rep.iso_holds && rep.ball_residual <= tol &&
             rep.are_residual <= 1e-8 * std::max(1.0, std::abs(rep.are_lhs));
    }
    out["identity_field"] = radii;
    double worst_iso = 0.0, worst_ball = 0.0;
    std::mt19937_64 gen(ctx.seed);
    for (int it = 0; it < num; ++it) {
        const FieldMap f =
            random_bandlimited(d, Target{1, std::nullopt}, d->degree, 1.0, gen());
        const SliceCheckReport rep = sphere_slice_check(f, 1.0);
        ok = ok && rep.iso_holds;
        worst_iso = std::min(worst_iso, rep.iso_margin);
        worst_ball = std::max(worst_ball, rep.ball_residual);
        ok = ok && rep.ball_residual <= tol;
    }
    out["random_fields"] = {{"count", num},
                            {"min_iso_margin", worst_iso},
                            {"max_ball_residual", worst_ball}};
    pass = ok;
    return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"hyperkaehler Floer laboratory"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    bool strict = false;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker threads");
    app.add_flag("--strict", strict, "fail on any monitor warning");

    const std::vector<std::string> commands = {
        "verify-hypercontact", "spectrum", "critical-points", "index", "connect",
        "adiabatic",           "floer",    "monitors",        "slice-check"};
    std::map<std::string, CLI::App*> subs;
    std::string flag_domain;
    int flag_degree = -1;
    for (const auto& c : commands) subs[c] = app.add_subcommand(c);
    subs["spectrum"]->add_option("--domain", flag_domain, "sphere | torus");
    subs["spectrum"]->add_option("--degree", flag_degree, "truncation degree");

    std::vector<const char*> argv;
    argv.push_back("hkfloer");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", "usage"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    }

    std::string command;
    for (const auto& c : commands)
        if (subs[c]->parsed()) command = c;

    Context ctx;
    ctx.strict = strict;
    ctx.seed = seed;
    try {
        ctx.cfg = default_config(command);
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot read config " + config_path);
            json user = json::parse(is, nullptr, true, true);
            merge_validate(ctx.cfg, user, "");
        }
        if (!flag_domain.empty())
            ctx.cfg["domain"]["kind"] = flag_domain == "sphere" ? "sphere3" : "torus3";
        if (flag_degree >= 0) ctx.cfg["domain"]["degree"] = flag_degree;
        ctx.out = out_dir;
        fs::create_directories(ctx.out);
        Eigen::setNbThreads(std::max(1, threads));
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "config"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    }

    json results;
    bool pass = false;
    try {
        if (command == "verify-hypercontact") results = cmd_verify_hypercontact(ctx, pass);
        else if (command == "spectrum") results = cmd_spectrum(ctx, pass);
        else if (command == "critical-points") results = cmd_critical_points(ctx, pass);
        else if (command == "index") results = cmd_index(ctx, pass);
        else if (command == "connect") results = cmd_connect(ctx, pass);
        else if (command == "adiabatic") results = cmd_adiabatic(ctx, pass);
        else if (command == "floer") results = cmd_floer(ctx, pass);
        else if (command == "monitors") results = cmd_monitors(ctx, pass);
        else if (command == "slice-check") results = cmd_slice_check(ctx, pass);
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", "config"}, {"detail", e.what()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        const json err = {{"error", "numerical"}, {"command", command}, {"detail", e.what()}};
        std::ofstream(ctx.out / "error.json") << err.dump(2) << "\n";
        std::cerr << err.dump() << "\n";
        return 1;
    }

    json summary;
    summary["command"] = command;
    summary["config_hash"] = [&] {
        std::ostringstream ss;
        ss << std::hex << fnv1a(ctx.cfg.dump());
        return ss.str();
    }();
    summary["tolerances"] = ctx.cfg["tolerances"];
    summary["results"] = results;
    summary["pass"] = pass;
    std::ofstream(ctx.out / "summary.json") << summary.dump(2) << "\n";
    std::cout << summary.dump(2) << "\n";
    return pass ? 0 : 1;
}

}  // namespace hkfloer
