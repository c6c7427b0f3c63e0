#pragma once

#include "opfield/operator.hpp"

#include <cstdint>
#include <vector>

namespace opfield::sourced {

using opfield::Complex;
using opfield::FieldOperator;
using opfield::GridPtr;
using opfield::PotentialCoeffs;

struct SourcedConfig {
    double mass = 1.0;
    Complex alpha = 0.0;
    PotentialCoeffs coeffs;  // c_n, degrees >= 2
    FieldOperator source;    // J: finite nonzero norm, <0|J|0> = 0, J|0> != 0
    double radius = 1.0;     // R, the certified ball
    int max_iter = 200;
    double tol = 1e-10;
    std::uint64_t sample_seed = 2026;  // Lipschitz pair sampling, reproducible

    explicit SourcedConfig(FieldOperator j) : source(std::move(j)) {}
};

// S(phi) = -inv_T(N(V(phi)) + alpha J) with identity vacuum projector and
// Euclidean signature.
FieldOperator s_map(const FieldOperator& phi, const SourcedConfig& cfg);

struct ContractionCertificate {
    double series_lhs = 0.0, series_rhs = 0.0;  // sum |c_n| 6^n R^n  vs  m^2 R / 2
    double alpha_lhs = 0.0, alpha_rhs = 0.0;    // |alpha|  vs  m^2 R / (2 ||J||)
    bool precondition_holds = false;
    double empirical_lipschitz = 0.0;  // max over 50 seeded pairs in the R-ball
    bool radius_respected = false;     // every iterate stayed in the R-ball
    int iterations = 0;
    std::vector<double> step_trace;      // ||phi_{k+1} - phi_k||
    double fixed_point_residual = 0.0;   // ||phi - S(phi)||
    double equation_residual = 0.0;      // ||T(phi) + N(V(phi)) + alpha J||
    bool converged = false;

    bool pass() const {
        return precondition_holds && empirical_lipschitz <= 0.55 && radius_respected && converged;
    }
};

struct SourcedResult {
    FieldOperator fields;
    ContractionCertificate certificate;
};

// Picard iteration phi_{k+1} = S(phi_k) from phi_0 = 0; a precondition
// failure does not stop the solve, it only marks the certificate FAIL.
SourcedResult solve_sourced(const SourcedConfig& cfg);

// sin(beta * aux) via the odd power series on the full block matrix, with the
// vacuum expectation subtracted so <0|J|0> = 0 exactly.
FieldOperator make_sin_source(const FieldOperator& aux, double beta, double series_tol = 1e-14);

// Max commutator norm against the hyperoctahedral point maps, the discrete
// stand-in for rotation invariance.
double symmetry_commutant_check(const FieldOperator& phi);

}  // namespace opfield::sourced
