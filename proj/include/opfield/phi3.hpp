#pragma once

#include "opfield/operator.hpp"

#include <vector>

namespace opfield::phi3 {

using opfield::CMatrix;
using opfield::Complex;
using opfield::CVector;
using opfield::FieldOperator;
using opfield::GridPtr;
using opfield::Signature;
using opfield::VacuumProjector;

struct Phi3Config {
    GridPtr grid;
    double mass = 1.0;
    Complex coupling = 0.0;
    Signature sig;
    double shell_floor = 1e-8;
    FieldOperator seed;
    int max_iter = 50;
    double tol = 1e-10;

    explicit Phi3Config(GridPtr g)
        : grid(g), sig(Signature::euclidean(g->dim)), seed(g) {}
};

struct Phi3Residual {
    CVector r1, r2;  // residuals of the two linear-field equations, per point
    CMatrix r3;      // kernel-equation residual, per point pair
    double norm1 = 0.0, norm2 = 0.0, norm3 = 0.0;  // weighted l2 norms
    bool shell_warning = false;  // some |m^2 - eta(dpi)^2| fell below the floor

    double total() const { return std::sqrt(norm1 * norm1 + norm2 * norm2 + norm3 * norm3); }
};

// r1(p) = (m^2 - pi(p)^2) phi1*(p) - lambda w sum_q phi1*(q) K(q,p)
// r2(p) = (m^2 - pi(p)^2) phi2(p) - lambda w sum_q K(p,q) phi2(q)
// r3(p,q) = (m^2 - eta(dpi)^2) K(p,q)
//           - lambda (w sum_r K(p,r)K(r,q) + phi2(p)phi1*(q) - Pi(p,q) w sum_r phi1*(r)phi2(r))
Phi3Residual phi3_residual(const CVector& phi1_star, const CVector& phi2, const CMatrix& kernel,
                           const VacuumProjector& pi, const Phi3Config& cfg);

// Residuals stacked in the unknown layout (phi1*, phi2, K row-major) with
// sqrt(w) / w row scaling, so the euclidean norm of the stack is total().
CVector phi3_stacked_residual(const Phi3Residual& r, double weight);

// Analytic Jacobian of the stacked residual; the equations are holomorphic,
// so this is an honest complex derivative.
CMatrix phi3_jacobian(const CVector& phi1_star, const CVector& phi2, const CMatrix& kernel,
                      const VacuumProjector& pi, const Phi3Config& cfg);

struct Phi3Result {
    FieldOperator fields;  // phi1* in vac_row, phi2 in vac_col, K in kernel
    std::vector<double> residual_trace;
    int iterations = 0;
    bool converged = false;
    bool shell_warning = false;
    bool regularized = false;  // a rank-deficient step fell back to a ridge solve
};

// Damped Gauss-Newton on the stacked residual with an analytic Jacobian; the
// system is holomorphic in (phi1*, phi2, K), so the step solves a square
// complex linear system.
Phi3Result phi3_solve(const Phi3Config& cfg);

}  // namespace opfield::phi3
