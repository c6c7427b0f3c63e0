#pragma once

#include "opfield/qcd.hpp"

#include <complex>
#include <vector>

// Plain index-loop evaluation of the QCD residuals on full block matrices.
// Everything here is written with explicit loops (no operator-core
// arithmetic) so the two evaluation routes stay independent.
namespace qcdoracle {

using opfield::CMatrix;
using opfield::Complex;

struct FullSet {
    std::vector<Eigen::VectorXd> lambda;  // per axis, vacuum slot first with value 0
    double weight = 0.0;
    std::vector<CMatrix> psi;  // slot k*4 + i
    std::vector<CMatrix> g;    // slot a*4 + mu
    CMatrix pi;
};

inline CMatrix to_full(const opfield::FieldOperator& op) {
    const int m = op.grid_size();
    const double w = op.grid->weight;
    CMatrix f = CMatrix::Zero(m + 1, m + 1);
    f(0, 0) = op.vac_vac;
    for (int q = 0; q < m; ++q) f(0, 1 + q) = w * op.vac_row(q);
    for (int p = 0; p < m; ++p) f(1 + p, 0) = op.vac_col(p);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) f(1 + p, 1 + q) = w * op.kernel(p, q);
    return f;
}

inline FullSet to_full_set(const opfield::qcd::QcdFieldSet& fields) {
    FullSet fs;
    const auto& grid = *fields.grid;
    const int m = grid.size();
    fs.weight = grid.weight;
    for (int axis = 0; axis < grid.dim; ++axis) {
        Eigen::VectorXd lam(m + 1);
        lam(0) = 0.0;
        for (int p = 0; p < m; ++p) lam(1 + p) = grid.momenta(p, axis);
        fs.lambda.push_back(std::move(lam));
    }
    for (const auto& q : fields.quarks) fs.psi.push_back(to_full(q));
    for (const auto& go : fields.gluons) fs.g.push_back(to_full(go));
    fs.pi = CMatrix::Zero(m + 1, m + 1);
    fs.pi(0, 0) = 1.0;
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            fs.pi(1 + p, 1 + q) = fs.weight * fields.projector.kernel_entry(p, q, fs.weight);
    return fs;
}

inline CMatrix mul(const CMatrix& x, const CMatrix& y) {
    const int n = static_cast<int>(x.rows());
    CMatrix out = CMatrix::Zero(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Complex s = 0.0;
            for (int t = 0; t < n; ++t) s += x(r, t) * y(t, c);
            out(r, c) = s;
        }
    return out;
}

// [P_mu, x]: entrywise momentum-transfer factor.
inline CMatrix comm_p(const FullSet& fs, int mu, const CMatrix& x) {
    const int n = static_cast<int>(x.rows());
    CMatrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            out(r, c) = (fs.lambda[mu](r) - fs.lambda[mu](c)) * x(r, c);
    return out;
}

// P_mu x: plain left product with the diagonal generator.
inline CMatrix apply_p(const FullSet& fs, int mu, const CMatrix& x) {
    const int n = static_cast<int>(x.rows());
    CMatrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out(r, c) = fs.lambda[mu](r) * x(r, c);
    return out;
}

// Adjoint in the weighted inner product: D^{-1} x^dagger D, D = diag(1, w I).
inline CMatrix dagger(const FullSet& fs, const CMatrix& x) {
    const int n = static_cast<int>(x.rows());
    CMatrix out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            const double dr = r == 0 ? 1.0 : fs.weight;
            const double dc = c == 0 ? 1.0 : fs.weight;
            out(r, c) = std::conj(x(c, r)) * dc / dr;
        }
    return out;
}

inline std::vector<CMatrix> quark_residual_full(const FullSet& fs,
                                                const opfield::qcd::GaugeData& gauge) {
    const int nc = gauge.colors;
    const int adim = gauge.adjoint_dim();
    const int n = static_cast<int>(fs.psi.front().rows());
    std::vector<CMatrix> out;
    for (int k = 0; k < nc; ++k)
        for (int i = 0; i < 4; ++i) {
            CMatrix r = CMatrix::Zero(n, n);
            for (int mu = 0; mu < 4; ++mu)
                for (int i2 = 0; i2 < 4; ++i2) {
                    const Complex gc = gauge.gamma[mu](i, i2);
                    if (gc == Complex(0.0)) continue;
                    r += gc * comm_p(fs, mu, fs.psi[k * 4 + i2]);
                }
            r += gauge.quark_mass * fs.psi[k * 4 + i];
            for (int mu = 0; mu < 4; ++mu)
                for (int i2 = 0; i2 < 4; ++i2)
                    for (int a = 0; a < adim; ++a)
                        for (int k2 = 0; k2 < nc; ++k2) {
                            const Complex coef = gauge.coupling * gauge.gamma[mu](i, i2) *
                                                 gauge.generators[a](k, k2);
                            if (coef == Complex(0.0)) continue;
                            const CMatrix prod = mul(fs.g[a * 4 + mu], fs.psi[k2 * 4 + i2]);
                            r += coef * (prod - prod(0, 0) * fs.pi);
                        }
            out.push_back(std::move(r));
        }
    return out;
}

inline std::vector<CMatrix> gluon_residual_full(const FullSet& fs,
                                                const opfield::qcd::GaugeData& gauge) {
    const int nc = gauge.colors;
    const int adim = gauge.adjoint_dim();
    const double gs = gauge.coupling;
    const double eta[4] = {1.0, -1.0, -1.0, -1.0};
    const Complex imag(0.0, 1.0);
    const int n = static_cast<int>(fs.g.front().rows());

    std::vector<CMatrix> dpsi;
    if (gs != 0.0)
        for (const CMatrix& p : fs.psi) dpsi.push_back(dagger(fs, p));

    std::vector<CMatrix> out;
    for (int a = 0; a < adim; ++a)
        for (int mu = 0; mu < 4; ++mu) {
            CMatrix r = CMatrix::Zero(n, n);
            for (int rr = 0; rr < n; ++rr)
                for (int cc = 0; cc < n; ++cc) {
                    const double dmu = fs.lambda[mu](rr) - fs.lambda[mu](cc);
                    double dsq = 0.0;
                    Complex divergence = 0.0;
                    for (int nu = 0; nu < 4; ++nu) {
                        const double dnu = fs.lambda[nu](rr) - fs.lambda[nu](cc);
                        dsq += eta[nu] * dnu * dnu;
                        divergence += eta[nu] * dnu * fs.g[a * 4 + nu](rr, cc);
                    }
                    r(rr, cc) = dsq * fs.g[a * 4 + mu](rr, cc) - dmu * divergence;
                }
            if (gs == 0.0) {
                out.push_back(std::move(r));
                continue;
            }

            // Cubic block with the printed subtraction <0|G (P^nu G + P_mu G^nu)|0>.
            CMatrix cubic = CMatrix::Zero(n, n);
            Complex cubic_vev = 0.0;
            for (int b = 0; b < adim; ++b)
                for (int c = 0; c < adim; ++c) {
                    const double fab = gauge.f(a, b, c);
                    if (fab == 0.0) continue;
                    for (int nu = 0; nu < 4; ++nu) {
                        const CMatrix& bnu = fs.g[b * 4 + nu];
                        const CMatrix& cmu = fs.g[c * 4 + mu];
                        const CMatrix& cnu = fs.g[c * 4 + nu];
                        cubic += (eta[nu] * fab) *
                                 (comm_p(fs, nu, mul(bnu, cmu)) + mul(bnu, comm_p(fs, nu, cmu)) +
                                  mul(bnu, comm_p(fs, mu, cnu)));
                        cubic_vev += (eta[nu] * fab) * (mul(bnu, apply_p(fs, nu, cmu))(0, 0) +
                                                        mul(bnu, apply_p(fs, mu, cnu))(0, 0));
                    }
                }
            r -= (imag * gs) * (cubic - cubic_vev * fs.pi);

            CMatrix quartic = CMatrix::Zero(n, n);
            for (int b = 0; b < adim; ++b)
                for (int c = 0; c < adim; ++c)
                    for (int d = 0; d < adim; ++d)
                        for (int e = 0; e < adim; ++e) {
                            const double co = gauge.f(a, b, c) * gauge.f(c, d, e);
                            if (co == 0.0) continue;
                            for (int nu = 0; nu < 4; ++nu) {
                                const CMatrix& bop = fs.g[b * 4 + nu];
                                const CMatrix& dop = fs.g[d * 4 + nu];
                                const CMatrix& eop = fs.g[e * 4 + mu];
                                const CMatrix de = mul(dop, eop);
                                const CMatrix triple = mul(bop, de);
                                CMatrix bracket = triple - de(0, 0) * bop -
                                                  mul(bop, dop)(0, 0) * eop -
                                                  mul(bop, eop)(0, 0) * dop -
                                                  triple(0, 0) * fs.pi;
                                quartic += (eta[mu] * eta[nu] * co) * bracket;
                            }
                        }
            r -= (gs * gs) * quartic;

            CMatrix bilinear = CMatrix::Zero(n, n);
            for (int k = 0; k < nc; ++k)
                for (int k2 = 0; k2 < nc; ++k2)
                    for (int i = 0; i < 4; ++i)
                        for (int i1 = 0; i1 < 4; ++i1)
                            for (int i2 = 0; i2 < 4; ++i2) {
                                const Complex coef = gauge.gamma[0](i, i1) *
                                                     gauge.gamma[mu](i1, i2) *
                                                     gauge.generators[a](k, k2);
                                if (coef == Complex(0.0)) continue;
                                bilinear +=
                                    (eta[mu] * coef) * mul(dpsi[k * 4 + i], fs.psi[k2 * 4 + i2]);
                            }
            r += gs * (bilinear - bilinear(0, 0) * fs.pi);
            out.push_back(std::move(r));
        }
    return out;
}

}  // namespace qcdoracle
