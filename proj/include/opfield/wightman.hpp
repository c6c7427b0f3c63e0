#pragma once

#include "opfield/operator.hpp"

#include <vector>

namespace opfield::wightman {

using opfield::Complex;
using opfield::FieldOperator;
using opfield::Signature;

using PointList = std::vector<Eigen::VectorXd>;

struct WightmanTable {
    int order = 0;
    PointList points;
    Complex value = 0.0;
};

// Connected chain phi1*(p1) e^{i p1(x1-x2)} K(p1,p2) ... phi2(p_{k-1}) with
// metric contraction p(x) = sum_mu eta_mu p^mu x^mu; k >= 2.
Complex connected_w(const FieldOperator& op, const PointList& points, const Signature& sig);

// Recursive grouping anchored at the first point:
//   W(x1..xn) = sum_{k=2..n} connected_w(x1..xk) W(x_{k+1}..x_n),
// with W(empty) = 1 and W(single point) = <0|phi|0>.
Complex vacuum_npoint(const FieldOperator& op, const PointList& points, const Signature& sig);

// <0| M(x1)...M(xn) |0> with M(x) = E(-x) M E(x) on the full matrix, E(x) the
// diagonal translation phase (vacuum entry 1).
Complex brute_force_npoint(const FieldOperator& op, const PointList& points, const Signature& sig);

}  // namespace opfield::wightman
