#include "opfield/sourced.hpp"

#include "opfield/rng.hpp"

#include <cmath>
#include <limits>

namespace opfield::sourced {

namespace {

void check_config(const SourcedConfig& cfg) {
    if (!cfg.source.grid) throw std::invalid_argument("sourced: config has no source grid");
    if (cfg.mass <= 0.0) throw std::invalid_argument("sourced: mass must be positive");
    if (cfg.radius <= 0.0) throw std::invalid_argument("sourced: radius must be positive");
    if (cfg.tol <= 0.0) throw std::invalid_argument("sourced: tolerance must be positive");
    for (const auto& [degree, c] : cfg.coeffs) {
        (void)c;
        if (degree < 2)
            throw std::invalid_argument("sourced: potential degrees below 2 are not allowed");
    }
    const double jnorm = operator_norm(cfg.source);
    if (!std::isfinite(jnorm) || jnorm == 0.0)
        throw std::invalid_argument("sourced: source must have finite nonzero norm");
    if (std::abs(cfg.source.vac_vac) > 1e-10)
        throw std::invalid_argument("sourced: source must have vanishing vacuum expectation");
    if (cfg.source.vac_col.norm() == 0.0)
        throw std::invalid_argument("sourced: source must not annihilate the vacuum");
}

FieldOperator equation_lhs(const FieldOperator& phi, const SourcedConfig& cfg) {
    const auto sig = Signature::euclidean(phi.grid->dim);
    return big_T(phi, cfg.mass, sig) + normal_order_potential(phi, cfg.coeffs) +
           cfg.alpha * cfg.source;
}

}  // namespace

FieldOperator s_map(const FieldOperator& phi, const SourcedConfig& cfg) {
    check_config(cfg);
    if (!same_grid(*phi.grid, *cfg.source.grid))
        throw opfield::GridMismatchError("s_map: field and source grids differ");
    const auto sig = Signature::euclidean(phi.grid->dim);
    const FieldOperator driven = normal_order_potential(phi, cfg.coeffs) + cfg.alpha * cfg.source;
    return Complex(-1.0) * inv_T(driven, cfg.mass, sig);
}

SourcedResult solve_sourced(const SourcedConfig& cfg) {
    check_config(cfg);
    const GridPtr grid = cfg.source.grid;

    SourcedResult out{FieldOperator(grid), {}};
    ContractionCertificate& cert = out.certificate;

    for (const auto& [degree, c] : cfg.coeffs)
        cert.series_lhs += std::abs(c) * std::pow(6.0 * cfg.radius, degree);
    cert.series_rhs = cfg.mass * cfg.mass * cfg.radius / 2.0;
    cert.alpha_lhs = std::abs(cfg.alpha);
    cert.alpha_rhs = cfg.mass * cfg.mass * cfg.radius / (2.0 * operator_norm(cfg.source));
    cert.precondition_holds =
        cert.series_lhs <= cert.series_rhs && cert.alpha_lhs <= cert.alpha_rhs;

    Rng rng(cfg.sample_seed);
    for (int pair = 0; pair < 50; ++pair) {
        const FieldOperator a =
            scaled_to_norm(random_operator(rng, grid, 1.0), cfg.radius * rng.uniform());
        const FieldOperator b =
            scaled_to_norm(random_operator(rng, grid, 1.0), cfg.radius * rng.uniform());
        const double gap = operator_norm(a - b);
        if (gap < 1e-14) continue;
        cert.empirical_lipschitz =
            std::max(cert.empirical_lipschitz, operator_norm(s_map(a, cfg) - s_map(b, cfg)) / gap);
    }

    FieldOperator phi(grid);
    bool radius_ok = true;
    const double slack = cfg.radius * (1.0 + 1e-12);
    while (cert.iterations < cfg.max_iter) {
        const FieldOperator next = s_map(phi, cfg);
        const double step = operator_norm(next - phi);
        cert.step_trace.push_back(step);
        if (operator_norm(next) > slack) radius_ok = false;
        phi = next;
        ++cert.iterations;
        cert.equation_residual = operator_norm(equation_lhs(phi, cfg));
        if (step <= cfg.tol &&
            cert.equation_residual <= cfg.tol * (cfg.mass * cfg.mass + 1.0)) {
            cert.converged = true;
            break;
        }
    }
    cert.radius_respected = radius_ok;
    cert.fixed_point_residual = operator_norm(phi - s_map(phi, cfg));
    cert.equation_residual = operator_norm(equation_lhs(phi, cfg));
    out.fields = phi;
    return out;
}

FieldOperator make_sin_source(const FieldOperator& aux, double beta, double series_tol) {
    if (!aux.grid) throw std::invalid_argument("make_sin_source: auxiliary field has no grid");
    if (series_tol <= 0.0) throw std::invalid_argument("make_sin_source: bad series tolerance");

    const FieldOperator scaled = Complex(beta) * aux;
    const FieldOperator squared = compose(scaled, scaled);
    FieldOperator term = scaled;
    FieldOperator sum = scaled;
    double peak = operator_norm(term);
    bool settled = peak <= series_tol;
    for (int k = 1; !settled && k <= 400; ++k) {
        term = Complex(-1.0 / (2.0 * k * (2.0 * k + 1.0))) * compose(term, squared);
        sum += term;
        const double tnorm = operator_norm(term);
        if (!std::isfinite(tnorm))
            throw std::runtime_error("make_sin_source: series diverged in floating point");
        peak = std::max(peak, tnorm);
        settled = tnorm <= series_tol * std::max(1.0, operator_norm(sum));
    }
    if (!settled)
        throw std::runtime_error("make_sin_source: series did not reach the requested tolerance");
    // Alternating terms as large as `peak` leave cancellation noise of order
    // peak*eps in the sum; refuse to pretend the requested tolerance was met.
    if (peak * std::numeric_limits<double>::epsilon() >
        series_tol * std::max(1.0, operator_norm(sum)))
        throw std::runtime_error(
            "make_sin_source: cancellation noise exceeds the requested tolerance");
    return sum - sum.vac_vac * FieldOperator::identity(aux.grid);
}

double symmetry_commutant_check(const FieldOperator& phi) {
    const auto maps = hyperoctahedral_point_maps(*phi.grid);
    const int n = phi.grid->size();
    double worst = 0.0;
    for (const auto& map : maps) {
        FieldOperator moved(phi.grid);
        moved.vac_vac = phi.vac_vac;
        for (int p = 0; p < n; ++p) {
            moved.vac_row(map[p]) = phi.vac_row(p);
            moved.vac_col(map[p]) = phi.vac_col(p);
            for (int q = 0; q < n; ++q) moved.kernel(map[p], map[q]) = phi.kernel(p, q);
        }
        worst = std::max(worst, operator_norm(moved - phi));
    }
    return worst;
}

}  // namespace opfield::sourced
