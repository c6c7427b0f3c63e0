#pragma once

#include "opfield/operator.hpp"

#include <algorithm>
#include <cmath>

namespace testutil {

using opfield::Complex;
using opfield::FieldOperator;
using opfield::StateVector;

inline double op_diff(const FieldOperator& a, const FieldOperator& b) {
    double m = std::abs(a.vac_vac - b.vac_vac);
    m = std::max(m, (a.vac_row - b.vac_row).cwiseAbs().maxCoeff());
    m = std::max(m, (a.vac_col - b.vac_col).cwiseAbs().maxCoeff());
    m = std::max(m, (a.kernel - b.kernel).cwiseAbs().maxCoeff());
    return m;
}

inline double op_scale(const FieldOperator& a) {
    double m = std::abs(a.vac_vac);
    m = std::max(m, a.vac_row.cwiseAbs().maxCoeff());
    m = std::max(m, a.vac_col.cwiseAbs().maxCoeff());
    m = std::max(m, a.kernel.cwiseAbs().maxCoeff());
    return m;
}

// Weighted sequence-space inner product, conjugate-linear in the first slot.
inline Complex inner(const StateVector& x, const StateVector& y) {
    return std::conj(x.f0) * y.f0 +
           x.grid->weight * (x.f.conjugate().array() * y.f.array()).sum();
}

}  // namespace testutil
