#include "opfield/wightman.hpp"

#include <cmath>

namespace opfield::wightman {

using opfield::CMatrix;
using opfield::CVector;

namespace {

void check_points(const FieldOperator& op, const PointList& points) {
    for (const auto& x : points) {
        if (x.size() != op.grid->dim)
            throw std::invalid_argument("wightman: point dimension does not match the grid");
        if (!x.allFinite()) throw std::invalid_argument("wightman: points must be finite");
    }
}

double contract(const Signature& sig, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
    double dot = 0.0;
    for (int mu = 0; mu < p.size(); ++mu) dot += sig(mu) * p(mu) * x(mu);
    return dot;
}

// Diagonal phase e^{i pi(p) . x} applied entrywise to a momentum vector.
void apply_phase(const FieldOperator& op, const Signature& sig, const Eigen::VectorXd& x,
                 CVector& v) {
    const auto& grid = *op.grid;
    for (int i = 0; i < grid.size(); ++i)
        v(i) *= std::exp(Complex(0.0, contract(sig, grid.momenta.row(i), x)));
}

}  // namespace

Complex connected_w(const FieldOperator& op, const PointList& points, const Signature& sig) {
    const int k = static_cast<int>(points.size());
    if (k < 2) throw std::invalid_argument("connected_w: need at least two points");
    check_points(op, points);

    const double w = op.grid->weight;
    CVector chain = op.vac_row;
    apply_phase(op, sig, points[0] - points[1], chain);
    for (int j = 1; j + 1 < k; ++j) {
        chain = CVector(op.kernel.transpose() * chain) * w;
        apply_phase(op, sig, points[j] - points[j + 1], chain);
    }
    return w * chain.cwiseProduct(op.vac_col).sum();  // plain bilinear sum, no conjugation
}

Complex vacuum_npoint(const FieldOperator& op, const PointList& points, const Signature& sig) {
    const int n = static_cast<int>(points.size());
    check_points(op, points);

    // suffix[i] = W(points[i..n)); anchored grouping gives a pure suffix recursion.
    std::vector<Complex> suffix(n + 1);
    suffix[n] = 1.0;
    if (n > 0) suffix[n - 1] = op.vac_vac;
    for (int i = n - 2; i >= 0; --i) {
        Complex total = 0.0;
        for (int k = 2; k <= n - i; ++k) {
            const PointList head(points.begin() + i, points.begin() + i + k);
            total += connected_w(op, head, sig) * suffix[i + k];
        }
        suffix[i] = total;
    }
    return suffix[0];
}

Complex brute_force_npoint(const FieldOperator& op, const PointList& points, const Signature& sig) {
    check_points(op, points);
    const auto& grid = *op.grid;
    const int full = grid.size() + 1;

    const CMatrix base = full_matrix(op);
    CMatrix product = CMatrix::Identity(full, full);
    for (const auto& x : points) {
        CVector phase(full);
        phase(0) = 1.0;
        for (int i = 0; i < grid.size(); ++i)
            phase(i + 1) = std::exp(Complex(0.0, contract(sig, grid.momenta.row(i), x)));
        product = product * CMatrix(phase.conjugate().asDiagonal() * base * phase.asDiagonal());
    }
    return product(0, 0);
}

}  // namespace opfield::wightman
