#pragma once

#include "opfield/operator.hpp"

#include <cstdint>
#include <random>

namespace opfield {

// Deterministic random stream: explicit Box-Muller over mt19937_64 so values
// do not depend on standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return (eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <=  0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    Complex cnormal() {
        const double re = normal();
        return {re, normal()};
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline FieldOperator random_operator(Rng& rng, GridPtr grid, double scale,
                                     bool zero_vac_vac = false) {
    FieldOperator a(std::move(grid));
    const int n = a.grid_size();
    a.vac_vac = zero_vac_vac ? Complex(0.0) : scale * rng.cnormal();
    for (int q = 0; q < n; ++q) a.vac_row(q) = scale * rng.cnormal();
    for (int p = 0; p < n; ++p) a.vac_col(p) = scale * rng.cnormal();
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) a.kernel(p, q) = scale * rng.cnormal();
    return a;
}

// Self-adjoint in the weighted inner product: adjoint(a) == a.
inline FieldOperator random_self_adjoint(Rng& rng, GridPtr grid, double scale,
                                         bool zero_vac_vac = false) {
    FieldOperator a = random_operator(rng, std::move(grid), scale, zero_vac_vac);
    if (!zero_vac_vac) a.vac_vac = Complex(a.vac_vac.real());
    a.vac_vac = Complex(a.vac_vac.real());
    a.vac_row = a.vac_col.conjugate();
    a.kernel = CMatrix((a.kernel + a.kernel.adjoint()) / 2.0);
    return a;
}

inline FieldOperator scaled_to_norm(FieldOperator a, double target) {
    const double nrm = operator_norm(a);
    if (nrm > 0.0) a *= Complex(target / nrm);
    return a;
}

}  // namespace opfield
