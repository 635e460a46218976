#include "bcq/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "bcq/boundary_matrix.hpp"
#include "bcq/eigenfunction.hpp"
#include "bcq/fattorini.hpp"
#include "bcq/galerkin.hpp"
#include "bcq/io.hpp"
#include "bcq/prng.hpp"
#include "bcq/spectra.hpp"

namespace bcq::cli {

namespace {

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
    std::set<std::string> keys = kCommonKeys;
    keys.insert(extra.begin(), extra.end());
    return keys;
}

nlohmann::json point_json(const SpectralPoint& pt) {
    nlohmann::json j;
    j["branch"] = to_string(pt.branch);
    j["k"] = pt.k;
    j["j"] = pt.j;
    j["lambda"] = pt.lambda;
    j["mu1_re"] = pt.mu1.real();
    j["mu1_im"] = pt.mu1.imag();
    j["mu2_re"] = pt.mu2.real();
    j["mu2_im"] = pt.mu2.imag();
    return j;
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<SpectralPoint>& pts) {
    CsvWriter csv(path, {"branch", "k", "j", "lambda", "mu1_re", "mu1_im", "mu2_re",
                         "mu2_im"});
    for (const auto& pt : pts)
        csv.row({to_string(pt.branch), CsvWriter::cell(pt.k), CsvWriter::cell(pt.j),
                 CsvWriter::cell(pt.lambda), CsvWriter::cell(pt.mu1.real()),
                 CsvWriter::cell(pt.mu1.imag()), CsvWriter::cell(pt.mu2.real()),
                 CsvWriter::cell(pt.mu2.imag())});
}

void write_eigenfunction_csv(const std::string& path, const AdjointEigenfunction& ef) {
    CsvWriter csv(path, {"x2", "xi_re", "xi_im", "xi_prime_re", "xi_prime_im",
                         "psi1_re", "psi1_im", "psi2_re", "psi2_im", "q_re", "q_im"});
    for (int i = 0; i < ef.x2.size(); ++i)
        csv.row({CsvWriter::cell(ef.x2[i]), CsvWriter::cell(ef.xi[i].real()),
                 CsvWriter::cell(ef.xi[i].imag()), CsvWriter::cell(ef.xi_prime[i].real()),
                 CsvWriter::cell(ef.xi_prime[i].imag()), CsvWriter::cell(ef.psi1[i].real()),
                 CsvWriter::cell(ef.psi1[i].imag()), CsvWriter::cell(ef.psi2[i].real()),
                 CsvWriter::cell(ef.psi2[i].imag()), CsvWriter::cell(ef.q[i].real()),
                 CsvWriter::cell(ef.q[i].imag())});
}

}  // namespace

int cmd_spectra(const ConfigDoc& doc, const std::string& out_dir) {
    doc.require_known_keys(with_common(
        {"spectra.k_list", "spectra.count_stokes", "spectra.count_dirichlet"}));
    const auto [params, tol] = parse_common(doc);
    const std::vector<int> k_list = doc.get_int_list("spectra.k_list");
    const int count_s = doc.get_int("spectra.count_stokes", 5);
    const int count_d = doc.get_int("spectra.count_dirichlet", 5);

    ensure_directory(out_dir);
    RunManifest manifest("spectra", doc.raw_text());
    nlohmann::json summary;
    summary["modes"] = nlohmann::json::array();

    for (int k : k_list) {
        const MergedSpectrum merged =
            merge_spectrum(ModeIndex(k), params, count_s, count_d, tol);
        const std::string csv_path =
            out_dir + "/spectrum_k" + std::to_string(k) + ".csv";
        write_spectrum_csv(csv_path, merged.points);
        manifest.add_output(csv_path);

        nlohmann::json mode;
        mode["k"] = k;
        mode["points"] = merged.points.size();
        mode["coincidences"] = merged.coincidences.size();
        summary["modes"].push_back(mode);
    }
    summary["nu"] = params.nu;
    summary["alpha"] = params.alpha;
    summary["L"] = params.L;
    const std::string sum_path = out_dir + "/spectra_summary.json";
    write_json(sum_path, summary);
    manifest.add_output(sum_path);
    manifest.set_parameters({{"k_list", k_list},
                             {"count_stokes", count_s},
                             {"count_dirichlet", count_d},
                             {"nu", params.nu},
                             {"alpha", params.alpha},
                             {"L", params.L}});
    manifest.write(out_dir);
    return kExitOk;
}

int cmd_detcheck(const ConfigDoc& doc, const std::string& out_dir) {
    doc.require_known_keys(with_common({"detcheck.samples", "detcheck.seed"}));
    const auto [params, tol] = parse_common(doc);
    (void)tol;
    const int samples = doc.get_int("detcheck.samples");
    if (samples < 1) throw ConfigError("detcheck.samples must be >= 1");
    const std::uint64_t seed = doc.get_seed("detcheck.seed");

    SplitMix64 rng(seed);
    double max_rel = 0.0;
    int accepted = 0;
    while (accepted < samples) {
        const int k = (rng.uniform01() < 0.5 ? 1 : -1) * rng.uniform_int(1, 5);
        const double L = rng.uniform(0.5, 2.0 * M_PI);
        const Complex mu1(0.0, rng.uniform(0.1, 10.0));
        const Complex mu2 = rng.uniform01() < 0.5
                                ? Complex(0.0, rng.uniform(0.1, 10.0))
                                : Complex(rng.uniform(0.1, 5.0), 0.0);
        BoundaryMatrix M;
        try {
            M = build_M(k, mu1, mu2, L, params.sep_tol);
        } catch (const NumericError&) {
            continue;  // rejected draw: degenerate separation
        }
        ++accepted;
        const Complex dM = det_scaled(M) * M.scale_product();
        const Complex dF = det_factored(k, mu1, mu2, L);
        // Relative error floored at the LU noise level of the 6x6 determinant.
        const double floor = 1e-14 * det_magnitude_bound(M);
        const double rel = std::abs(dM - dF) / std::max(std::abs(dM), floor);
        max_rel = std::max(max_rel, rel);
    }

    nlohmann::json rep;
    rep["samples"] = samples;
    rep["seed"] = seed;
    rep["max_rel_err"] = max_rel;
    rep["tolerance"] = 1e-9;
    rep["pass"] = max_rel <= 1e-9;

    ensure_directory(out_dir);
    RunManifest manifest("detcheck", doc.raw_text());
    const std::string path = out_dir + "/detcheck.json";
    write_json(path, rep);
    manifest.add_output(path);
    manifest.set_parameters({{"samples", samples}, {"seed", seed}});
    manifest.write(out_dir);

    if (max_rel > 1e-9) {
        std::cerr << "detcheck: max relative error " << max_rel << " exceeds 1e-9\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_scan_alpha(const ConfigDoc& doc, const std::string& out_dir) {
    doc.require_known_keys(with_common({"scan.alpha_lo", "scan.alpha_hi",
                                        "scan.grid_step", "spectra.k_list",
                                        "spectra.count_stokes"}));
    const auto [params, tol] = parse_common(doc);
    const double lo = doc.get_double("scan.alpha_lo");
    const double hi = doc.get_double("scan.alpha_hi");
    const double step = doc.get_double("scan.grid_step", 1e-3);
    const std::vector<int> k_list = doc.get_int_list("spectra.k_list");
    const int j_max = doc.get_int("spectra.count_stokes", 3);

    ensure_directory(out_dir);
    RunManifest manifest("scan-alpha", doc.raw_text());

    nlohmann::json all = nlohmann::json::array();
    const std::string zeros_path = out_dir + "/alpha_zeros.csv";
    CsvWriter zeros_csv(zeros_path, {"k", "j", "alpha_zero", "residual"});

    std::vector<int> ks = k_list;
    std::sort(ks.begin(), ks.end());
    for (int k : ks) {
        for (int j = 1; j <= j_max; ++j) {
            AlphaScanReport rep =
                scan_alpha(ModeIndex(k), j, params.nu, params.L, lo, hi, step, tol);
            nlohmann::json jr;
            jr["k"] = rep.k;
            jr["j"] = rep.j;
            jr["nu"] = rep.nu;
            jr["L"] = rep.L;
            jr["lambda"] = rep.lambda;
            jr["alpha_lo"] = rep.alpha_lo;
            jr["alpha_hi"] = rep.alpha_hi;
            jr["grid_step"] = rep.grid_step;
            jr["verdict_margin"] = rep.verdict_margin;
            jr["zeros"] = nlohmann::json::array();
            for (const auto& z : rep.zeros) {
                jr["zeros"].push_back({{"alpha", z.alpha}, {"residual", z.f_residual}});
                zeros_csv.row({CsvWriter::cell(k), CsvWriter::cell(j),
                               CsvWriter::cell(z.alpha), CsvWriter::cell(z.f_residual)});
            }
            all.push_back(jr);
        }
    }
    zeros_csv.close();
    const std::string scan_path = out_dir + "/alpha_scan.json";
    write_json(scan_path, {{"reports", all}});
    manifest.add_output(scan_path);
    manifest.add_output(zeros_path);
    manifest.set_parameters({{"alpha_lo", lo},
                             {"alpha_hi", hi},
                             {"grid_step", step},
                             {"k_list", ks},
                             {"j_max", j_max},
                             {"nu", params.nu},
                             {"L", params.L}});
    manifest.write(out_dir);
    return kExitOk;
}

int cmd_verdict(const ConfigDoc& doc, const std::string& out_dir) {
    doc.require_known_keys(with_common(
        {"spectra.k_list", "spectra.count_stokes", "spectra.count_dirichlet"}));
    const auto [params, tol] = parse_common(doc);
    const std::vector<int> k_list = doc.get_int_list("spectra.k_list");
    const int count_s = doc.get_int("spectra.count_stokes", 5);
    const int count_d = doc.get_int("spectra.count_dirichlet", 5);

    ensure_directory(out_dir);
    RunManifest manifest("verdict", doc.raw_text());
    nlohmann::json rows = nlohmann::json::array();
    bool inconsistent = false;

    for (int k : k_list) {
        const MergedSpectrum merged =
            merge_spectrum(ModeIndex(k), params, count_s, count_d, tol);
        for (const auto& pt : merged.points) {
            const VerdictReport rep = uc_verdict(pt, params, tol);
            nlohmann::json row = point_json(pt);
            row["verdict"] = to_string(rep.verdict);
            if (std::isfinite(rep.det_r_normalized))
                row["det_r_normalized"] = rep.det_r_normalized;
            row["obs_abs"] = rep.obs_abs;
            row["null_ratio"] = rep.null_ratio;
            row["resonance_flagged"] = rep.resonance_flagged;
            row["outside_certified_regime"] = rep.outside_certified_regime;
            row["routes_consistent"] = rep.routes_consistent;
            if (!rep.note.empty()) row["note"] = rep.note;
            if (pt.branch == Branch::Stokes) {
                const TwoControlReport two = two_control_verdict(pt, params, tol);
                row["two_control_verdict"] = to_string(two.verdict);
                row["two_control_f_prime_L"] = two.f_prime_L_abs;

                const AdjointEigenfunction ef = solve_eigenfunction(pt, params, tol);
                const std::string ef_path = out_dir + "/eigenfunction_stokes_k" +
                                            std::to_string(k) + "_j" +
                                            std::to_string(pt.j) + ".csv";
                write_eigenfunction_csv(ef_path, ef);
                manifest.add_output(ef_path);
                row["obs_re"] = ef.obs.real();
                row["obs_im"] = ef.obs.imag();
                row["max_boundary_residual"] = ef.max_boundary_residual();
                row["ode6_residual"] = ef.ode6_residual;
            } else {
                row["obs_re"] = (pt.j % 2 == 0 ? 1.0 : -1.0) * pt.j * M_PI / params.L;
                row["obs_im"] = 0.0;
            }
            if (!rep.routes_consistent) inconsistent = true;
            rows.push_back(row);
        }
    }
    const std::string path = out_dir + "/verdicts.json";
    write_json(path, {{"rows", rows},
                      {"nu", params.nu},
                      {"alpha", params.alpha},
                      {"L", params.L}});
    manifest.add_output(path);
    manifest.set_parameters({{"k_list", k_list},
                             {"count_stokes", count_s},
                             {"count_dirichlet", count_d},
                             {"nu", params.nu},
                             {"alpha", params.alpha},
                             {"L", params.L}});
    manifest.write(out_dir);

    if (inconsistent) {
        std::cerr << "verdict: det R and xi'(L) routes disagree on at least one row\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_control(const ConfigDoc& doc, const std::string& out_dir) {
    doc.require_known_keys(with_common(
        {"control.k", "control.n_u", "control.n_theta", "control.segments",
         "control.T", "control.dt", "control.seed", "control.eps_bound",
         "control.grid_n", "control.ridge", "control.target_file"}));
    const auto [params, tol] = parse_common(doc);
    (void)tol;
    const int k = doc.get_int("control.k", 1);
    const int n_u = doc.get_int("control.n_u", 8);
    const int n_theta = doc.get_int("control.n_theta", 8);
    const int segments = doc.get_int("control.segments", 32);
    const double T = doc.get_double("control.T", 1.0);
    const double dt = doc.get_double("control.dt", T / 512.0);
    const int grid_n = doc.get_int("control.grid_n", 96);
    const double ridge = doc.get_double("control.ridge", 0.0);
    const double eps_bound = doc.get_double("control.eps_bound", 0.1);
    // A file target removes the randomness; otherwise the seed is required.
    const std::uint64_t seed = doc.has("control.target_file")
                                   ? (doc.has("control.seed")
                                          ? doc.get_seed("control.seed")
                                          : 0ull)
                                   : doc.get_seed("control.seed");

    const ModeSystem sys = assemble_mode_system(ModeIndex(k), params, grid_n, dt, T);
    const TruncationBasis basis = truncation_basis(sys, n_u, n_theta);

    Eigen::VectorXcd target;
    if (doc.has("control.target_file")) {
        std::ifstream in(doc.get_string("control.target_file"));
        if (!in) throw ConfigError("cannot open control.target_file");
        std::vector<Complex> vals;
        double re, im;
        while (in >> re >> im) vals.emplace_back(re, im);
        if (static_cast<int>(vals.size()) != n_u + n_theta)
            throw ConfigError("target file must hold n_u + n_theta re/im pairs");
        target.resize(n_u + n_theta);
        for (int i = 0; i < target.size(); ++i) target[i] = vals[i];
    } else {
        target = seeded_unit_target(n_u + n_theta, seed);
    }

    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(grid_n);
    const ControlExperiment ex =
        synthesize_control(sys, basis, zero, zero, target, segments, ridge);

    ensure_directory(out_dir);
    RunManifest manifest("control", doc.raw_text());

    nlohmann::json rep;
    rep["k"] = k;
    rep["grid_n"] = grid_n;
    rep["n_u"] = n_u;
    rep["n_theta"] = n_theta;
    rep["segments"] = segments;
    rep["T"] = T;
    rep["dt"] = dt;
    rep["ridge"] = ridge;
    rep["seed"] = seed;
    rep["achieved_eps"] = ex.achieved_eps;
    rep["control_norm"] = ex.control_norm;
    rep["smallest_singular_value"] = ex.smallest_sv;
    rep["eps_bound"] = eps_bound;
    rep["gramian_sv"] = std::vector<double>(
        ex.gramian_sv.data(), ex.gramian_sv.data() + ex.gramian_sv.size());
    {
        nlohmann::json ctrl = nlohmann::json::array();
        for (int i = 0; i < ex.control.values.size(); ++i)
            ctrl.push_back({{"re", ex.control.values[i].real()},
                            {"im", ex.control.values[i].imag()}});
        rep["control_values"] = ctrl;
    }
    const std::string rep_path = out_dir + "/control_experiment.json";
    write_json(rep_path, rep);
    manifest.add_output(rep_path);

    // Plot data: per-step norms under the synthesized control, and the
    // Gramian spectrum.
    const ModeSystem::Trajectory tr = sys.simulate(zero, zero, ex.control);
    const std::string traj_path = out_dir + "/trajectory.csv";
    {
        CsvWriter csv(traj_path, {"t", "velocity_energy", "theta_norm", "h_re", "h_im"});
        for (int i = 0; i <= sys.steps(); ++i)
            csv.row({CsvWriter::cell(tr.times[i]),
                     CsvWriter::cell(sys.velocity_energy(tr.velocity.col(i))),
                     CsvWriter::cell(sys.theta_norm(tr.theta.col(i))),
                     CsvWriter::cell(tr.boundary_trace[i].real()),
                     CsvWriter::cell(tr.boundary_trace[i].imag())});
    }
    manifest.add_output(traj_path);

    const std::string sv_path = out_dir + "/gramian_sv.csv";
    {
        CsvWriter csv(sv_path, {"index", "singular_value"});
        for (int i = 0; i < ex.gramian_sv.size(); ++i)
            csv.row({CsvWriter::cell(i + 1), CsvWriter::cell(ex.gramian_sv[i])});
    }
    manifest.add_output(sv_path);

    manifest.set_parameters({{"k", k},
                             {"grid_n", grid_n},
                             {"n_u", n_u},
                             {"n_theta", n_theta},
                             {"segments", segments},
                             {"T", T},
                             {"dt", dt},
                             {"seed", seed},
                             {"ridge", ridge}});
    manifest.write(out_dir);

    if (ex.achieved_eps > eps_bound) {
        std::cerr << "control: achieved_eps " << ex.achieved_eps << " exceeds bound "
                  << eps_bound << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int run_command(const std::string& name, const std::string& config_path,
                const std::string& out_dir) {
    try {
        const ConfigDoc doc = ConfigDoc::load(config_path);
        if (name == "spectra") return cmd_spectra(doc, out_dir);
        if (name == "detcheck") return cmd_detcheck(doc, out_dir);
        if (name == "scan-alpha") return cmd_scan_alpha(doc, out_dir);
        if (name == "verdict") return cmd_verdict(doc, out_dir);
        if (name == "control") return cmd_control(doc, out_dir);
        std::cerr << "unknown subcommand '" << name << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace bcq::cli
