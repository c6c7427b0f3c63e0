#pragma once

#include "opfield/grid.hpp"

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>

namespace opfield {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularShellError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element of span{vacuum} + grid functions; squared norm |f0|^2 + sum_p w |f(p)|^2.
struct StateVector {
    GridPtr grid;
    Complex f0{0.0};
    CVector f;

    static StateVector vacuum(GridPtr g);
    double norm() const;
};

// Truncated field operator: vacuum-vacuum scalar, vacuum row phi1*(q), vacuum
// column phi2(p) and grid kernel phi(p, q).  Its full (N+1)x(N+1) block matrix
// is [[vacVac, phi1*.w], [phi2, phi(p,q).w]]; the quadrature weight enters
// exactly once per momentum integration.
struct FieldOperator {
    GridPtr grid;
    Complex vac_vac{0.0};
    CVector vac_row;
    CVector vac_col;
    CMatrix kernel;

    FieldOperator() = default;
    explicit FieldOperator(GridPtr g);  // zero operator
    static FieldOperator identity(GridPtr g);
    int grid_size() const { return grid ? grid->size() : 0; }

    FieldOperator& operator+=(const FieldOperator& o);
    FieldOperator& operator-=(const FieldOperator& o);
    FieldOperator& operator*=(Complex s);
};

FieldOperator operator+(FieldOperator a, const FieldOperator& b);
FieldOperator operator-(FieldOperator a, const FieldOperator& b);
FieldOperator operator-(FieldOperator a);
FieldOperator operator*(Complex s, FieldOperator a);
FieldOperator operator*(double s, FieldOperator a);

StateVector apply_field(const FieldOperator& op, const StateVector& s);
FieldOperator compose(const FieldOperator& a, const FieldOperator& b);
FieldOperator adjoint(const FieldOperator& a);
Complex vacuum_expectation(const FieldOperator& a);

// Full block matrix conjugated by diag(1, sqrt(w) I); its largest singular
// value is the operator norm on the weighted sequence space.
CMatrix weighted_full_matrix(const FieldOperator& a);
double operator_norm(const FieldOperator& a);

// Plain full block matrix with the weight folded into the row and kernel
// blocks; matrix products of these agree with compose().
CMatrix full_matrix(const FieldOperator& a);
FieldOperator from_full_matrix(GridPtr grid, const CMatrix& m);

// Commutator [P_axis, a]: entrywise multiplication by (lambda_i - lambda_j)
// in the generator eigenbasis (vacuum eigenvalue 0).
FieldOperator commutator_with_generator(const FieldOperator& a, int axis);

// The diagonal translation generator as an operator on the truncation.
FieldOperator generator_operator(GridPtr grid, int axis);

// Entrywise multiplication of the full block matrix by
// m^2 + sum_mu eta_mu (lambda_i^mu - lambda_j^mu)^2.
FieldOperator big_T(const FieldOperator& a, double mass, const Signature& sig);

// Entrywise division by the same factors.  Always safe for Euclidean eta
// (factors >= m^2); Minkowski mode requires a positive regularization floor
// and throws SingularShellError when any factor magnitude falls below it.
FieldOperator inv_T(const FieldOperator& a, double mass, const Signature& sig,
                    double shell_floor = 0.0);

// Vacuum projector: identity on the truncation by default, or an explicit
// grid kernel with the vacuum part fixed to 1.
class VacuumProjector {
public:
    VacuumProjector() = default;  // identity mode
    static VacuumProjector identity() { return VacuumProjector(); }
    static VacuumProjector explicit_kernel(CMatrix k);

    bool is_identity() const { return !kernel_.has_value(); }
    const CMatrix& explicit_part() const;
    FieldOperator as_operator(GridPtr grid) const;
    // Grid-kernel entry; identity mode is delta_{pq} / w.
    Complex kernel_entry(int p, int q, double weight) const;

private:
    std::optional<CMatrix> kernel_;
};

double projector_idempotency_defect(const VacuumProjector& pi, const GridPtr& grid);
double projector_generator_defect(const VacuumProjector& pi, const GridPtr& grid);

// N(a^0) = identity and
// N(a^k) = a^k - sum_{j=1..k} C(k,j) <0|a^j|0> N(a^{k-j}),
// with the projector replacing the identity in the subtracted scalar term,
// so <0|N(a^k)|0> = 0 for every k >= 1.
FieldOperator normal_order_power(const FieldOperator& a, int power,
                                 const VacuumProjector& pi = {});

// degree -> coefficient; degrees below 2 are rejected.
using PotentialCoeffs = std::map<int, Complex>;

FieldOperator normal_order_potential(const FieldOperator& a, const PotentialCoeffs& coeffs,
                                     const VacuumProjector& pi = {});

void save_operator(std::ostream& out, const FieldOperator& a, double mass_label = 0.0);

struct LoadedOperator {
    FieldOperator op;
    double mass_label = 0.0;
};
LoadedOperator load_operator(std::istream& in);

}  // namespace opfield
