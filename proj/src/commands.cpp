#include "opfield/runconfig.hpp"

#include "opfield/gns.hpp"
#include "opfield/grid.hpp"
#include "opfield/intertwiner.hpp"
#include "opfield/phi3.hpp"
#include "opfield/qcd.hpp"
#include "opfield/rng.hpp"
#include "opfield/sourced.hpp"
#include "opfield/wightman.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace opfield::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kGramFloor = 1e-10;  // most negative admissible Gram eigenvalue

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
}

Signature make_signature(const std::string& name, int dim) {
    return name == "minkowski" ? Signature::minkowski(dim) : Signature::euclidean(dim);
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json out;
    for (const auto& [key, value] : effective_entries(cfg)) out[key] = value;
    return out;
}

std::string word_label(const std::vector<int>& word) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) out += '.';
        out += std::to_string(word[i]);
    }
    return out;
}

int run_sourced(const RunConfig& cfg, const fs::path& dir, ordered_json& results,
                ordered_json& certificate) {
    const auto grid = build_grid(cfg.d, cfg.n);
    Rng rng(cfg.seed);
    const auto aux =
        scaled_to_norm(random_self_adjoint(rng, grid, 1.0, /*zero_vac_vac=*/true), 1.0);

    sourced::SourcedConfig sc(sourced::make_sin_source(aux, cfg.beta));
    sc.mass = cfg.mass;
    sc.alpha = cfg.alpha;
    sc.coeffs = cfg.coeffs;
    sc.radius = cfg.radius;
    sc.max_iter = cfg.max_iter;
    sc.tol = cfg.tol;
    sc.sample_seed = cfg.seed + 1;

    const auto out = sourced::solve_sourced(sc);
    const auto& cert = out.certificate;

    auto trace = open_out(dir, "step_trace.csv");
    trace << "iteration,step_norm\n";
    for (std::size_t i = 0; i < cert.step_trace.size(); ++i)
        trace << i + 1 << ',' << format_g17(cert.step_trace[i]) << '\n';

    auto solution = open_out(dir, "solution.op");
    save_operator(solution, out.fields, cfg.mass);

    if (cfg.command == "certify") {
        auto csv = open_out(dir, "certificate.csv");
        csv << "check,value,bound,holds\n";
        const auto row = [&](const char* name, double value, double bound, bool holds) {
            csv << name << ',' << format_g17(value) << ',' << format_g17(bound) << ','
                << (holds ? 1 : 0) << '\n';
        };
        row("series", cert.series_lhs, cert.series_rhs, cert.series_lhs <= cert.series_rhs);
        row("alpha", cert.alpha_lhs, cert.alpha_rhs, cert.alpha_lhs <= cert.alpha_rhs);
        row("lipschitz", cert.empirical_lipschitz, 0.55, cert.empirical_lipschitz <= 0.55);
        row("radius", cert.radius_respected ? 1.0 : 0.0, 1.0, cert.radius_respected);
        row("converged", cert.converged ? 1.0 : 0.0, 1.0, cert.converged);
    }

    results["iterations"] = cert.iterations;
    results["converged"] = cert.converged;
    results["fixed_point_residual"] = cert.fixed_point_residual;
    results["equation_residual"] = cert.equation_residual;
    results["solution_norm"] = operator_norm(out.fields);
    results["source_norm"] = operator_norm(sc.source);
    results["certificate_pass"] = cert.pass();

    certificate["series_lhs"] = cert.series_lhs;
    certificate["series_rhs"] = cert.series_rhs;
    certificate["alpha_lhs"] = cert.alpha_lhs;
    certificate["alpha_rhs"] = cert.alpha_rhs;
    certificate["precondition_holds"] = cert.precondition_holds;
    certificate["empirical_lipschitz"] = cert.empirical_lipschitz;
    certificate["radius_respected"] = cert.radius_respected;
    certificate["iterations"] = cert.iterations;
    certificate["fixed_point_residual"] = cert.fixed_point_residual;
    certificate["equation_residual"] = cert.equation_residual;
    certificate["converged"] = cert.converged;
    certificate["pass"] = cert.pass();

    return cert.pass() ? 0 : 2;
}

int run_phi3(const RunConfig& cfg, const fs::path& dir, ordered_json& results) {
    const auto grid = build_grid(cfg.d, cfg.n);
    phi3::Phi3Config pc(grid);
    pc.mass = cfg.mass;
    pc.coupling = Complex(cfg.coupling);
    pc.sig = make_signature(cfg.signature, cfg.d);
    pc.shell_floor = cfg.shell_floor;
    pc.max_iter = cfg.max_iter;
    pc.tol = cfg.tol;
    if (cfg.start_scale > 0.0) {
        Rng rng(cfg.seed);
        pc.seed = random_operator(rng, grid, cfg.start_scale, /*zero_vac_vac=*/true);
    }

    const auto res = phi3::phi3_solve(pc);

    auto trace = open_out(dir, "residual_trace.csv");
    trace << "iteration,residual\n";
    for (std::size_t i = 0; i < res.residual_trace.size(); ++i)
        trace << i << ',' << format_g17(res.residual_trace[i]) << '\n';

    auto fields = open_out(dir, "fields.op");
    save_operator(fields, res.fields, cfg.mass);

    results["iterations"] = res.iterations;
    results["converged"] = res.converged;
    results["final_residual"] = res.residual_trace.empty() ? 0.0 : res.residual_trace.back();
    results["shell_warning"] = res.shell_warning;
    results["regularized"] = res.regularized;
    return res.converged ? 0 : 2;
}

int run_wightman(const RunConfig& cfg, const fs::path& dir, ordered_json& results) {
    const auto grid = build_grid(cfg.d, cfg.n);
    Rng rng(cfg.seed);
    const auto op = scaled_to_norm(random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true), 1.0);
    const auto sig = make_signature(cfg.signature, cfg.d);

    auto csv = open_out(dir, "wightman.csv");
    csv << "sample";
    for (int j = 0; j < cfg.k; ++j)
        for (int mu = 0; mu < cfg.d; ++mu) csv << ",x" << j << '_' << mu;
    csv << ",re,im\n";

    double max_abs = 0.0;
    for (int s = 0; s < cfg.samples; ++s) {
        wightman::PointList points(cfg.k, Eigen::VectorXd(cfg.d));
        for (auto& x : points)
            for (int mu = 0; mu < cfg.d; ++mu) x(mu) = rng.uniform(-1.0, 1.0);
        const Complex value = wightman::vacuum_npoint(op, points, sig);
        max_abs = std::max(max_abs, std::abs(value));
        csv << s;
        for (const auto& x : points)
            for (int mu = 0; mu < cfg.d; ++mu) csv << ',' << format_g17(x(mu));
        csv << ',' << format_g17(value.real()) << ',' << format_g17(value.imag()) << '\n';
    }

    results["samples"] = cfg.samples;
    results["k"] = cfg.k;
    results["max_abs_value"] = max_abs;
    return 0;
}

int run_reconstruct(const RunConfig& cfg, const fs::path& dir, ordered_json& results) {
    Rng rng(cfg.seed);
    Eigen::MatrixXd points(cfg.points, cfg.d);
    for (int p = 0; p < cfg.points; ++p)
        for (int mu = 0; mu < cfg.d; ++mu) points(p, mu) = rng.uniform(-1.0, 1.0);

    CMatrix a(cfg.points, cfg.points);
    for (int r = 0; r < cfg.points; ++r)
        for (int c = 0; c < cfg.points; ++c) a(r, c) = rng.cnormal();
    const CMatrix two_point = a * a.adjoint() / static_cast<double>(cfg.points) +
                              cfg.ridge * CMatrix::Identity(cfg.points, cfg.points);

    auto wick = gns::wick_moments(two_point, points, 2 * cfg.level + 2);
    // Reconstruct at word length L; the table keeps 2L+2 coverage for the
    // boundary columns and for the round-trip comparison below.
    wick.table.max_order = cfg.level;

    const auto gram = gns::build_gram(wick.table);
    const auto quotient = gns::quotient_null_space(gram);
    const auto rep = gns::represent_field(wick.table, quotient);

    auto eigs = open_out(dir, "eigenvalues.csv");
    eigs << "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < quotient.eigenvalues.size(); ++i)
        eigs << i << ',' << format_g17(quotient.eigenvalues(i)) << '\n';

    auto moments = open_out(dir, "moments.csv");
    moments << "word,table_re,table_im,reconstructed_re,reconstructed_im,abs_diff\n";
    double max_diff = 0.0;
    for (const auto& word : gns::enumerate_words(cfg.points, 2 * cfg.level)) {
        const Complex expected = wick.table.value(word);
        const Complex actual = gns::reconstructed_moment(rep, word);
        const double diff = std::abs(actual - expected);
        max_diff = std::max(max_diff, diff);
        moments << word_label(word) << ',' << format_g17(expected.real()) << ','
                << format_g17(expected.imag()) << ',' << format_g17(actual.real()) << ','
                << format_g17(actual.imag()) << ',' << format_g17(diff) << '\n';
    }

    const double min_eig = quotient.eigenvalues.minCoeff();
    results["points"] = cfg.points;
    results["level"] = cfg.level;
    results["reduced_dim"] = quotient.reduced_dim;
    results["boundary_leakage"] = rep.boundary_leakage;
    results["truncation_flagged"] = rep.truncation_flagged;
    results["two_point_psd_warning"] = wick.two_point_psd_warning;
    results["min_gram_eigenvalue"] = min_eig;
    results["max_roundtrip_diff"] = max_diff;
    return (max_diff <= cfg.tol && min_eig >= -kGramFloor) ? 0 : 2;
}

int run_intertwine(const RunConfig& cfg, const fs::path& dir, ordered_json& results) {
    intertwiner::HermiteBasisTable table(cfg.k);

    // -ip e~_t  ==  sum_j e~_{t+e_j}, coefficient-exact over all tuples with
    // entries in [1, levels].
    double recurrence_defect = 0.0;
    std::vector<int> tuple(cfg.k, 1);
    for (;;) {
        auto defect = intertwiner::mul_minus_ip(table.element(tuple));
        for (int j = 0; j < cfg.k; ++j) {
            auto raised = tuple;
            ++raised[j];
            defect = intertwiner::subtract(defect, table.element(raised));
        }
        for (const auto& [piece, coeffs] : defect.pieces)
            for (const auto& c : coeffs)
                recurrence_defect = std::max(recurrence_defect, std::abs(c.to_complex()));
        int axis = cfg.k - 1;
        while (axis >= 0 && tuple[axis] == cfg.levels) tuple[axis--] = 1;
        if (axis < 0) break;
        ++tuple[axis];
    }

    Rng rng(cfg.seed);
    auto csv = open_out(dir, "deviations.csv");
    csv << "trial,deviation\n";
    double max_deviation = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        intertwiner::MultiIndexCoefficients coeffs;
        coeffs.arg_count = cfg.k;
        for (int term = 0; term < 4; ++term) {
            std::vector<int> index(cfg.k);
            for (auto& entry : index)
                entry = 1 + static_cast<int>(rng.raw() % static_cast<unsigned>(cfg.levels));
            coeffs.entries[index] += rng.cnormal();
        }
        const double dev = intertwiner::check_intertwining(table, coeffs);
        max_deviation = std::max(max_deviation, dev);
        csv << t << ',' << format_g17(dev) << '\n';
    }

    results["k"] = cfg.k;
    results["levels"] = cfg.levels;
    results["trials"] = cfg.trials;
    results["recurrence_defect"] = recurrence_defect;
    results["max_deviation"] = max_deviation;
    return (recurrence_defect <= cfg.tol && max_deviation <= cfg.tol) ? 0 : 2;
}

int run_qcd(const RunConfig& cfg, const fs::path& dir, ordered_json& results) {
    const auto gauge = qcd::build_gauge(cfg.colors, cfg.gs, cfg.mass);

    const auto generate = [&] {
        const auto grid = build_grid(4, cfg.n);
        qcd::QcdFieldSet fields(grid, cfg.colors);
        Rng rng(cfg.seed);
        for (auto& component : fields.quarks)
            component = scaled_to_norm(random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true),
                                       cfg.field_scale);
        for (auto& component : fields.gluons)
            component = scaled_to_norm(random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true),
                                       cfg.field_scale);
        return fields;
    };

    const qcd::QcdFieldSet fields =
        cfg.manifest.empty() ? generate() : qcd::load_field_set(cfg.manifest);
    if (fields.colors != cfg.colors)
        throw std::runtime_error("manifest has " + std::to_string(fields.colors) +
                                 " colors, config expects " + std::to_string(cfg.colors));
    if (cfg.manifest.empty()) qcd::save_field_set(dir, "fields", fields);

    const auto quark = qcd::quark_residual(fields, gauge);
    const auto gluon = qcd::gluon_residual(fields, gauge);

    auto csv = open_out(dir, "norms.csv");
    csv << "field,major,minor,norm\n";
    double vev_defect = 0.0;
    for (int k = 0; k < fields.colors; ++k)
        for (int i = 0; i < 4; ++i) {
            const auto& r = quark.components[k * 4 + i];
            vev_defect = std::max(vev_defect, std::abs(vacuum_expectation(r)));
            csv << "psi," << k << ',' << i << ',' << format_g17(quark.norms[k * 4 + i]) << '\n';
        }
    const int adim = gauge.adjoint_dim();
    for (int a = 0; a < adim; ++a)
        for (int mu = 0; mu < 4; ++mu) {
            const auto& r = gluon.components[a * 4 + mu];
            vev_defect = std::max(vev_defect, std::abs(vacuum_expectation(r)));
            csv << "g," << a << ',' << mu << ',' << format_g17(gluon.norms[a * 4 + mu]) << '\n';
        }

    results["colors"] = cfg.colors;
    results["quark_residual_max"] = quark.max_norm();
    results["gluon_residual_max"] = gluon.max_norm();
    results["vev_defect"] = vev_defect;
    return vev_defect <= cfg.tol ? 0 : 2;
}

}  // namespace

int run_command(const RunConfig& cfg, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    const auto start = std::chrono::steady_clock::now();

    ordered_json results;
    ordered_json certificate;
    int code = 0;
    if (cfg.command == "solve-sourced" || cfg.command == "certify")
        code = run_sourced(cfg, out_dir, results, certificate);
    else if (cfg.command == "solve-phi3") code = run_phi3(cfg, out_dir, results);
    else if (cfg.command == "wightman") code = run_wightman(cfg, out_dir, results);
    else if (cfg.command == "reconstruct") code = run_reconstruct(cfg, out_dir, results);
    else if (cfg.command == "intertwine-check") code = run_intertwine(cfg, out_dir, results);
    else if (cfg.command == "qcd-residual") code = run_qcd(cfg, out_dir, results);
    else throw ConfigError("unknown command '" + cfg.command + "'");

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ordered_json report;
    report["command"] = cfg.command;
    report["exit_code"] = code;
    report["config"] = config_json(cfg);
    report["results"] = results;
    if (!certificate.is_null()) report["certificate"] = certificate;
    report["timings"] = ordered_json{{"total_seconds", seconds}};
    open_out(out_dir, "report.json") << report.dump(2) << '\n';

    return code;
}

}  // namespace opfield::cli
