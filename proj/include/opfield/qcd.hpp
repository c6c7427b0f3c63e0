#pragma once

#include "opfield/operator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace opfield::qcd {

// SU(N) structure data and Dirac matrices shared by the residual evaluators.
// Generators are generalized Gell-Mann matrices, Hermitian and traceless with
// tr(t^a t^b) = delta^{ab}/2; structure constants f^{abc} = -2i tr([t^a,t^b] t^c)
// are real and totally antisymmetric; the gamma matrices are the Dirac basis
// for eta = diag(+,-,-,-), so {gamma^mu, gamma^nu} = 2 eta^{mu nu}.
struct GaugeData {
    int colors = 0;
    double coupling = 0.0;
    double quark_mass = 1.0;
    std::vector<CMatrix> generators;
    std::vector<double> structure;
    std::vector<CMatrix> gamma;

    int adjoint_dim() const { return colors * colors - 1; }
    double f(int a, int b, int c) const;
};

GaugeData build_gauge(int colors, double coupling = 0.0, double quark_mass = 1.0);

// Candidate truncated fields on one four-dimensional grid: quarks indexed by
// (color k, spinor component i), gluons by (adjoint color a, lower Lorentz
// index mu).  Vacuum-vacuum entries must be exactly zero.
struct QcdFieldSet {
    GridPtr grid;
    int colors = 0;
    std::vector<FieldOperator> quarks;
    std::vector<FieldOperator> gluons;
    VacuumProjector projector;

    QcdFieldSet() = default;
    QcdFieldSet(GridPtr g, int n_colors);

    FieldOperator& quark(int k, int i);
    const FieldOperator& quark(int k, int i) const;
    FieldOperator& gluon(int a, int mu);
    const FieldOperator& gluon(int a, int mu) const;
};

// Residual operators in the same component order as the field set, with the
// operator norm of every component.
struct ResidualSet {
    std::vector<FieldOperator> components;
    std::vector<double> norms;

    double max_norm() const;
};

// gamma^mu_{i,i'} [P_mu, psi^k_{i'}] + m psi^k_i
//   + g_s gamma^mu_{i,i'} t^a_{k,k'} (G^a_mu psi^{k'}_{i'}
//                                     - Pi <0|G^a_mu psi^{k'}_{i'}|0>),
// one component per (color, spinor) slot.  gamma^mu contracts the lower index
// on [P_mu, .] and on G^a_mu directly, so no metric factor appears here.
ResidualSet quark_residual(const QcdFieldSet& fields, const GaugeData& gauge);

// Maxwell-like double commutators [P^nu,[P_nu,G^a_mu]] - [P_mu,[P^nu,G^a_nu]],
// minus the i g_s f^{abc} cubic block, minus the g_s^2 f^{abc} f^{cde} quartic
// block, plus the g_s psi^dagger gamma^0 gamma_mu t^a psi bilinear; every
// nonlinear block is vacuum-subtracted through the projector.
// Index-position sign table (storage is lower-index, eta = diag(+,-,-,-)):
//   - each contracted nu pair carries one factor eta_nu: both double
//     commutators, all three cubic terms, and the G^b_nu G^{d nu} pair of the
//     quartic block;
//   - the free index mu appears lower on G^a_mu, [P_mu, .] and the cubic
//     block, but the quartic block is written with G^{e mu} raised and the
//     bilinear with gamma_mu lowered, so those two blocks carry one extra
//     factor eta_mu.
ResidualSet gluon_residual(const QcdFieldSet& fields, const GaugeData& gauge);

// Writes <stem>.manifest plus one operator text file per component into dir
// and returns the manifest path; the manifest maps index pairs to file names.
std::filesystem::path save_field_set(const std::filesystem::path& dir,
                                     const std::string& stem,
                                     const QcdFieldSet& fields);

QcdFieldSet load_field_set(const std::filesystem::path& manifest_path);

}  // namespace opfield::qcd
