#include "opfield/operator.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace opfield {

namespace {

void require_grid(const FieldOperator& a, const char* who) {
    if (!a.grid) throw std::invalid_argument(std::string(who) + ": operator has no grid");
}

void require_same_grid(const FieldOperator& a, const FieldOperator& b, const char* who) {
    require_grid(a, who);
    require_grid(b, who);
    if (!same_grid(*a.grid, *b.grid))
        throw GridMismatchError(std::string(who) + ": operands live on different grids");
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    return c;
}

}  // namespace

StateVector StateVector::vacuum(GridPtr g) {
    StateVector s;
    s.grid = std::move(g);
    s.f0 = Complex(1.0);
    s.f = CVector::Zero(s.grid->size());
    return s;
}

double StateVector::norm() const {
    const double w = grid ? grid->weight : 0.0;
    return std::sqrt(std::norm(f0) + w * f.squaredNorm());
}

FieldOperator::FieldOperator(GridPtr g) : grid(std::move(g)) {
    const int n = grid->size();
    vac_row = CVector::Zero(n);
    vac_col = CVector::Zero(n);
    kernel = CMatrix::Zero(n, n);
}

FieldOperator FieldOperator::identity(GridPtr g) {
    FieldOperator id(std::move(g));
    id.vac_vac = Complex(1.0);
    id.kernel = CMatrix::Identity(id.grid_size(), id.grid_size()) / id.grid->weight;
    return id;
}

FieldOperator& FieldOperator::operator+=(const FieldOperator& o) {
    require_same_grid(*this, o, "operator+=");
    vac_vac += o.vac_vac;
    vac_row += o.vac_row;
    vac_col += o.vac_col;
    kernel += o.kernel;
    return *this;
}

FieldOperator& FieldOperator::operator-=(const FieldOperator& o) {
    require_same_grid(*this, o, "operator-=");
    vac_vac -= o.vac_vac;
    vac_row -= o.vac_row;
    vac_col -= o.vac_col;
    kernel -= o.kernel;
    return *this;
}

FieldOperator& FieldOperator::operator*=(Complex s) {
    vac_vac *= s;
    vac_row *= s;
    vac_col *= s;
    kernel *= s;
    return *this;
}

FieldOperator operator+(FieldOperator a, const FieldOperator& b) { return a += b; }
FieldOperator operator-(FieldOperator a, const FieldOperator& b) { return a -= b; }
FieldOperator operator-(FieldOperator a) { return a *= Complex(-1.0); }
FieldOperator operator*(Complex s, FieldOperator a) { return a *= s; }
FieldOperator operator*(double s, FieldOperator a) { return a *= Complex(s); }

StateVector apply_field(const FieldOperator& op, const StateVector& s) {
    require_grid(op, "apply_field");
    if (!s.grid || !same_grid(*op.grid, *s.grid))
        throw GridMismatchError("apply_field: state lives on a different grid");
    const double w = op.grid->weight;
    StateVector out;
    out.grid = op.grid;
    out.f0 = op.vac_vac * s.f0 + w * (op.vac_row.array() * s.f.array()).sum();
    out.f = s.f0 * op.vac_col + w * (op.kernel * s.f);
    return out;
}

FieldOperator compose(const FieldOperator& a, const FieldOperator& b) {
    require_same_grid(a, b, "compose");
    const double w = a.grid->weight;
    FieldOperator c(a.grid);
    c.vac_vac = a.vac_vac * b.vac_vac + w * (a.vac_row.array() * b.vac_col.array()).sum();
    c.vac_row = a.vac_vac * b.vac_row + w * (b.kernel.transpose() * a.vac_row);
    c.vac_col = b.vac_vac * a.vac_col + w * (a.kernel * b.vac_col);
    c.kernel = a.vac_col * b.vac_row.transpose() + w * (a.kernel * b.kernel);
    return c;
}

FieldOperator adjoint(const FieldOperator& a) {
    require_grid(a, "adjoint");
    FieldOperator out(a.grid);
    out.vac_vac = std::conj(a.vac_vac);
    out.vac_row = a.vac_col.conjugate();
    out.vac_col = a.vac_row.conjugate();
    out.kernel = a.kernel.adjoint();
    return out;
}

Complex vacuum_expectation(const FieldOperator& a) { return a.vac_vac; }

CMatrix weighted_full_matrix(const FieldOperator& a) {
    require_grid(a, "weighted_full_matrix");
    const int n = a.grid_size();
    const double w = a.grid->weight;
    const double sw = std::sqrt(w);
    CMatrix m(n + 1, n + 1);
    m(0, 0) = a.vac_vac;
    m.row(0).tail(n) = sw * a.vac_row.transpose();
    m.col(0).tail(n) = sw * a.vac_col;
    m.bottomRightCorner(n, n) = w * a.kernel;
    return m;
}

double operator_norm(const FieldOperator& a) {
    return weighted_full_matrix(a).jacobiSvd().singularValues()(0);
}

CMatrix full_matrix(const FieldOperator& a) {
    require_grid(a, "full_matrix");
    const int n = a.grid_size();
    const double w = a.grid->weight;
    CMatrix m(n + 1, n + 1);
    m(0, 0) = a.vac_vac;
    m.row(0).tail(n) = w * a.vac_row.transpose();
    m.col(0).tail(n) = a.vac_col;
    m.bottomRightCorner(n, n) = w * a.kernel;
    return m;
}

FieldOperator from_full_matrix(GridPtr grid, const CMatrix& m) {
    if (!grid) throw std::invalid_argument("from_full_matrix: null grid");
    const int n = grid->size();
    if (m.rows() != n + 1 || m.cols() != n + 1)
        throw std::invalid_argument("from_full_matrix: size mismatch");
    const double w = grid->weight;
    FieldOperator a(grid);
    a.vac_vac = m(0, 0);
    a.vac_row = m.row(0).tail(n).transpose() / w;
    a.vac_col = m.col(0).tail(n);
    a.kernel = m.bottomRightCorner(n, n) / w;
    return a;
}

FieldOperator commutator_with_generator(const FieldOperator& a, int axis) {
    require_grid(a, "commutator_with_generator");
    if (axis < 0 || axis >= a.grid->dim)
        throw std::invalid_argument("commutator_with_generator: axis out of range");
    const Eigen::VectorXd lam = a.grid->momenta.col(axis);
    FieldOperator out(a.grid);
    out.vac_vac = Complex(0.0);
    out.vac_row = a.vac_row.array() * (-lam.array()).cast<Complex>();
    out.vac_col = a.vac_col.array() * lam.array().cast<Complex>();
    out.kernel = a.kernel.array() *
                 (lam.replicate(1, a.grid_size()).array() -
                  lam.transpose().replicate(a.grid_size(), 1).array())
                     .cast<Complex>();
    return out;
}

FieldOperator generator_operator(GridPtr grid, int axis) {
    if (!grid) throw std::invalid_argument("generator_operator: null grid");
    if (axis < 0 || axis >= grid->dim)
        throw std::invalid_argument("generator_operator: axis out of range");
    FieldOperator p(grid);
    p.kernel = (grid->momenta.col(axis).array().cast<Complex>() / grid->weight)
                   .matrix()
                   .asDiagonal();
    return p;
}

namespace {

// factor(i, j) = m^2 + sum_mu eta_mu (lambda_i - lambda_j)^2 with basis index
// 0 the vacuum (lambda = 0) and 1.. the grid points.
double shell_factor(const MomentumGrid& grid, const Signature& sig, double mass, int i, int j) {
    double q = mass * mass;
    for (int mu = 0; mu < grid.dim; ++mu) {
        const double li = i == 0 ? 0.0 : grid.momenta(i - 1, mu);
        const double lj = j == 0 ? 0.0 : grid.momenta(j - 1, mu);
        q += sig(mu) * (li - lj) * (li - lj);
    }
    return q;
}

}  // namespace

FieldOperator big_T(const FieldOperator& a, double mass, const Signature& sig) {
    require_grid(a, "big_T");
    if (sig.dim() != a.grid->dim) throw std::invalid_argument("big_T: signature dimension mismatch");
    const int n = a.grid_size();
    FieldOperator out = a;
    out.vac_vac *= shell_factor(*a.grid, sig, mass, 0, 0);
    for (int q = 0; q < n; ++q) out.vac_row(q) *= shell_factor(*a.grid, sig, mass, 0, q + 1);
    for (int p = 0; p < n; ++p) out.vac_col(p) *= shell_factor(*a.grid, sig, mass, p + 1, 0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) out.kernel(p, q) *= shell_factor(*a.grid, sig, mass, p + 1, q + 1);
    return out;
}

FieldOperator inv_T(const FieldOperator& a, double mass, const Signature& sig, double shell_floor) {
    require_grid(a, "inv_T");
    if (sig.dim() != a.grid->dim) throw std::invalid_argument("inv_T: signature dimension mismatch");
    if (!(mass > 0.0)) throw std::invalid_argument("inv_T: mass must be positive");
    if (!sig.is_euclidean() && !(shell_floor > 0.0))
        throw std::invalid_argument("inv_T: Minkowski mode requires a positive shell floor");
    const int n = a.grid_size();
    auto divide = [&](Complex v, int i, int j) {
        const double f = shell_factor(*a.grid, sig, mass, i, j);
        if (shell_floor > 0.0 && std::abs(f) < shell_floor)
            throw SingularShellError("inv_T: shell factor below regularization floor");
        return v / f;
    };
    FieldOperator out = a;
    out.vac_vac = divide(a.vac_vac, 0, 0);
    for (int q = 0; q < n; ++q) out.vac_row(q) = divide(a.vac_row(q), 0, q + 1);
    for (int p = 0; p < n; ++p) out.vac_col(p) = divide(a.vac_col(p), p + 1, 0);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) out.kernel(p, q) = divide(a.kernel(p, q), p + 1, q + 1);
    return out;
}

VacuumProjector VacuumProjector::explicit_kernel(CMatrix k) {
    if (k.rows() != k.cols())
        throw std::invalid_argument("VacuumProjector: explicit kernel must be square");
    VacuumProjector pi;
    pi.kernel_ = std::move(k);
    return pi;
}

const CMatrix& VacuumProjector::explicit_part() const {
    if (!kernel_) throw std::logic_error("VacuumProjector: identity mode has no explicit kernel");
    return *kernel_;
}

FieldOperator VacuumProjector::as_operator(GridPtr grid) const {
    if (!kernel_) return FieldOperator::identity(std::move(grid));
    if (!grid || kernel_->rows() != grid->size())
        throw GridMismatchError("VacuumProjector: kernel size does not match grid");
    FieldOperator p(std::move(grid));
    p.vac_vac = Complex(1.0);
    p.kernel = *kernel_;
    return p;
}

Complex VacuumProjector::kernel_entry(int p, int q, double weight) const {
    if (!kernel_) return p == q ? Complex(1.0 / weight) : Complex(0.0);
    return (*kernel_)(p, q);
}

double projector_idempotency_defect(const VacuumProjector& pi, const GridPtr& grid) {
    const FieldOperator p = pi.as_operator(grid);
    return operator_norm(compose(p, p) - p);
}

double projector_generator_defect(const VacuumProjector& pi, const GridPtr& grid) {
    const FieldOperator p = pi.as_operator(grid);
    double worst = 0.0;
    for (int mu = 0; mu < grid->dim; ++mu)
        worst = std::max(worst, operator_norm(commutator_with_generator(p, mu)));
    return worst;
}

FieldOperator normal_order_power(const FieldOperator& a, int power, const VacuumProjector& pi) {
    require_grid(a, "normal_order_power");
    if (power < 0) throw std::invalid_argument("normal_order_power: power must be >= 0");
    std::vector<FieldOperator> pw;
    pw.reserve(power + 1);
    pw.push_back(FieldOperator::identity(a.grid));
    for (int j = 1; j <= power; ++j) pw.push_back(compose(pw.back(), a));
    std::vector<Complex> vexp(power + 1);
    for (int j = 0; j <= power; ++j) vexp[j] = vacuum_expectation(pw[j]);
    const FieldOperator pi_op = pi.as_operator(a.grid);

    std::vector<FieldOperator> ordered;
    ordered.reserve(power + 1);
    ordered.push_back(pw[0]);
    for (int k = 1; k <= power; ++k) {
        FieldOperator nk = pw[k];
        for (int j = 1; j < k; ++j) nk -= (binomial(k, j) * vexp[j]) * ordered[k - j];
        nk -= vexp[k] * pi_op;
        ordered.push_back(std::move(nk));
    }
    return ordered[power];
}

FieldOperator normal_order_potential(const FieldOperator& a, const PotentialCoeffs& coeffs,
                                     const VacuumProjector& pi) {
    require_grid(a, "normal_order_potential");
    for (const auto& [deg, c] : coeffs)
        if (deg < 2)
            throw std::invalid_argument("normal_order_potential: coefficient degree below 2");
    FieldOperator out(a.grid);
    for (const auto& [deg, c] : coeffs) {
        if (c == Complex(0.0)) continue;
        out += c * normal_order_power(a, deg, pi);
    }
    return out;
}

namespace {

void put_complex(std::ostream& out, Complex v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
    out << buf;
}

Complex get_complex(std::istream& in) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw std::runtime_error("load_operator: truncated stream");
    return {re, im};
}

}  // namespace

void save_operator(std::ostream& out, const FieldOperator& a, double mass_label) {
    require_grid(a, "save_operator");
    const int n = a.grid_size();
    char head[96];
    std::snprintf(head, sizeof head, "opfield-operator %d %d %.17g", a.grid->dim,
                  a.grid->per_axis, mass_label);
    out << head << "\n";
    put_complex(out, a.vac_vac);
    out << "\n";
    for (int q = 0; q < n; ++q) {
        put_complex(out, a.vac_row(q));
        out << "\n";
    }
    for (int p = 0; p < n; ++p) {
        put_complex(out, a.vac_col(p));
        out << "\n";
    }
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            if (q) out << ' ';
            put_complex(out, a.kernel(p, q));
        }
        out << "\n";
    }
}

LoadedOperator load_operator(std::istream& in) {
    std::string tag;
    if (!(in >> tag) || tag != "opfield-operator")
        throw std::runtime_error("load_operator: missing format tag");
    int dim = 0, per_axis = 0;
    double mass_label = 0.0;
    if (!(in >> dim >> per_axis >> mass_label))
        throw std::runtime_error("load_operator: malformed header");
    LoadedOperator loaded;
    loaded.mass_label = mass_label;
    loaded.op = FieldOperator(build_grid(dim, per_axis));
    const int n = loaded.op.grid_size();
    loaded.op.vac_vac = get_complex(in);
    for (int q = 0; q < n; ++q) loaded.op.vac_row(q) = get_complex(in);
    for (int p = 0; p < n; ++p) loaded.op.vac_col(p) = get_complex(in);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) loaded.op.kernel(p, q) = get_complex(in);
    return loaded;
}

}  // namespace opfield
