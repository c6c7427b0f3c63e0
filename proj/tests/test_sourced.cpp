#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/rng.hpp"
#include "opfield/sourced.hpp"
#include "support/util.hpp"

#include <cmath>

using namespace opfield;
using namespace opfield::sourced;

namespace {

FieldOperator random_source(Rng& rng, const GridPtr& grid, double norm) {
    return scaled_to_norm(random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true), norm);
}

// Kernel radial in |pi(p)-pi(q)| and radial vacuum blocks commute with every
// hyperoctahedral map exactly.
FieldOperator radial_operator(const GridPtr& grid) {
    FieldOperator op(grid);
    const auto& mom = grid->momenta;
    for (int p = 0; p < grid->size(); ++p) {
        op.vac_row(p) = std::exp(-mom.row(p).squaredNorm());
        op.vac_col(p) = 0.5 / (1.0 + mom.row(p).squaredNorm());
        for (int q = 0; q < grid->size(); ++q)
            op.kernel(p, q) = 0.25 / (1.0 + (mom.row(p) - mom.row(q)).squaredNorm());
    }
    return op;
}

}  // namespace

TEST_CASE("zero field is the fixed point of the sourceless map") {
    Rng rng(701);
    const auto grid = build_grid(1, 4);
    SourcedConfig cfg(random_source(rng, grid, 1.0));
    cfg.mass = 1.2;
    cfg.alpha = 0.0;
    cfg.coeffs = {{3, Complex(0.2, 0.0)}};
    CHECK(operator_norm(s_map(FieldOperator(grid), cfg)) == 0.0);
}

TEST_CASE("vanishing potential gives the exact linear solution in one pass") {
    Rng rng(702);
    const auto grid = build_grid(1, 4);
    SourcedConfig cfg(random_source(rng, grid, 0.8));
    cfg.mass = 1.3;
    cfg.alpha = Complex(0.4, -0.1);

    const auto sig = Signature::euclidean(1);
    const FieldOperator expected = Complex(-1.0) * inv_T(cfg.alpha * cfg.source, cfg.mass, sig);
    CHECK(testutil::op_diff(s_map(random_operator(rng, grid, 2.0), cfg), expected) < 1e-15);

    const auto out = solve_sourced(cfg);
    CHECK(testutil::op_diff(out.fields, expected) < 1e-14);
    CHECK(out.certificate.converged);
    CHECK(out.certificate.iterations == 2);
    CHECK(out.certificate.step_trace[1] <= 1e-14);
    CHECK(out.certificate.empirical_lipschitz <= 1e-12);
}

TEST_CASE("map norm respects the coefficient growth bound") {
    Rng rng(703);
    const auto grid = build_grid(1, 4);
    SourcedConfig cfg(random_source(rng, grid, 1.0));
    cfg.mass = 1.1;
    cfg.alpha = Complex(0.3, 0.1);
    cfg.coeffs = {{2, Complex(0.05, 0.02)}, {3, Complex(-0.03, 0.0)}, {4, Complex(0.0, 0.01)}};

    const double jnorm = operator_norm(cfg.source);
    for (int rep = 0; rep < 20; ++rep) {
        const auto phi = scaled_to_norm(random_operator(rng, grid, 1.0), 2.0 * rng.uniform());
        const double r = operator_norm(phi);
        double budget = std::abs(cfg.alpha) * jnorm;
        for (const auto& [degree, c] : cfg.coeffs)
            budget += std::abs(c) * std::pow(2.0 * r, degree);
        CHECK(operator_norm(s_map(phi, cfg)) <= budget / (cfg.mass * cfg.mass) + 1e-9);
    }
}

TEST_CASE("a certified run contracts, stays in the ball, and solves the equation") {
    Rng rng(704);
    const auto grid = build_grid(1, 4);
    const auto aux = random_source(rng, grid, 1.0);
    SourcedConfig cfg(make_sin_source(aux, 0.5));
    cfg.mass = 1.2;
    cfg.radius = 1.0;
    cfg.coeffs = {{2, Complex(0.008, 0.0)}, {3, Complex(0.0005, 0.0)}};
    cfg.tol = 1e-11;
    cfg.alpha = 0.9 * cfg.mass * cfg.mass * cfg.radius / (2.0 * operator_norm(cfg.source));

    const auto out = solve_sourced(cfg);
    const auto& cert = out.certificate;

    CHECK(cert.precondition_holds);
    CHECK(cert.series_lhs <= cert.series_rhs);
    CHECK(cert.alpha_lhs <= cert.alpha_rhs);
    CHECK(cert.empirical_lipschitz <= 0.55);
    CHECK(cert.radius_respected);
    CHECK(cert.converged);
    CHECK(cert.pass());

    CHECK(cert.fixed_point_residual <= cfg.tol);
    CHECK(cert.equation_residual <= cfg.tol * (cfg.mass * cfg.mass + 1.0));
    CHECK(out.fields.vac_col.norm() > 1e-8);  // nontrivial: the source feeds the vacuum column

    for (std::size_t k = 1; k + 1 < cert.step_trace.size(); ++k) {
        if (cert.step_trace[k] < 1e-12) break;
        CHECK(cert.step_trace[k + 1] <= 0.55 * cert.step_trace[k]);
    }
}

TEST_CASE("precondition failure marks the certificate but the solve still runs") {
    Rng rng(705);
    const auto grid = build_grid(1, 4);
    SourcedConfig cfg(random_source(rng, grid, 1.0));
    cfg.mass = 1.0;
    cfg.radius = 0.05;
    cfg.alpha = 10.0 * cfg.mass * cfg.mass * cfg.radius / (2.0 * operator_norm(cfg.source));

    const auto out = solve_sourced(cfg);
    CHECK_FALSE(out.certificate.precondition_holds);
    CHECK_FALSE(out.certificate.pass());
    CHECK(out.certificate.converged);        // the linear map still has a fixed point
    CHECK_FALSE(out.certificate.radius_respected);
}

TEST_CASE("sine source vanishes at zero coupling and kills its vacuum expectation") {
    Rng rng(706);
    const auto grid = build_grid(2, 2);
    const auto aux = random_operator(rng, grid, 1.0);
    CHECK(operator_norm(make_sin_source(aux, 0.0)) == 0.0);
    const auto j = make_sin_source(aux, 0.7);
    CHECK(j.vac_vac == Complex(0.0));
    CHECK(vacuum_expectation(j) == Complex(0.0));
}

TEST_CASE("sine source error obeys the series remainder bounds") {
    Rng rng(707);
    const auto grid = build_grid(1, 4);
    const auto aux = random_source(rng, grid, 1.0);

    for (double u : {0.1, 0.5, 0.8, 1.0}) {
        const auto j = make_sin_source(aux, u);
        const double err = operator_norm(j - Complex(u) * aux);
        // Remainder plus its subtracted vacuum expectation part.
        CHECK(err <= 2.0 * (std::sinh(u) - u) + 1e-12);
        if (u >= 0.8) CHECK(err <= u * u * u / 6.0 * std::exp(u));
    }
}

TEST_CASE("sine series reports a tolerance it cannot reach") {
    Rng rng(708);
    const auto aux = random_source(rng, build_grid(1, 4), 1.0);
    CHECK_THROWS_AS(make_sin_source(aux, 60.0), std::runtime_error);
}

TEST_CASE("radial data commutes with the grid symmetries, generic data does not") {
    const auto grid = build_grid(2, 3);
    CHECK(symmetry_commutant_check(radial_operator(grid)) <= 1e-12);

    Rng rng(709);
    CHECK(symmetry_commutant_check(random_operator(rng, grid, 1.0)) > 1e-3);
}

TEST_CASE("the map preserves the symmetry commutant") {
    const auto grid = build_grid(2, 3);
    const auto phi = radial_operator(grid);
    SourcedConfig cfg(make_sin_source(radial_operator(grid), 0.4));
    cfg.mass = 1.4;
    cfg.alpha = Complex(0.2, 0.0);
    cfg.coeffs = {{2, Complex(0.05, 0.0)}, {3, Complex(0.01, 0.0)}};

    REQUIRE(symmetry_commutant_check(phi) <= 1e-12);
    CHECK(symmetry_commutant_check(s_map(phi, cfg)) <= 1e-10);
}

TEST_CASE("source invariants are enforced") {
    Rng rng(710);
    const auto grid = build_grid(1, 3);

    const auto solve_with = [](FieldOperator j) {
        SourcedConfig cfg(std::move(j));
        return solve_sourced(cfg);
    };

    auto bad_vac = random_source(rng, grid, 1.0);
    bad_vac.vac_vac = 0.3;
    CHECK_THROWS_AS(solve_with(bad_vac), std::invalid_argument);

    auto annihilates = random_source(rng, grid, 1.0);
    annihilates.vac_col.setZero();
    CHECK_THROWS_AS(solve_with(annihilates), std::invalid_argument);

    CHECK_THROWS_AS(solve_with(FieldOperator(grid)), std::invalid_argument);

    SourcedConfig low(random_source(rng, grid, 1.0));
    low.coeffs = {{1, Complex(0.1, 0.0)}};
    CHECK_THROWS_AS(solve_sourced(low), std::invalid_argument);

    SourcedConfig other(random_source(rng, grid, 1.0));
    CHECK_THROWS_AS(s_map(FieldOperator(build_grid(1, 4)), other), GridMismatchError);
}
