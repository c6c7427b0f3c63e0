#include "opfield/phi3.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace opfield::phi3 {

namespace {

void check_config(const Phi3Config& cfg) {
    if (!cfg.grid) throw std::invalid_argument("phi3: config has no grid");
    if (cfg.mass <= 0.0) throw std::invalid_argument("phi3: mass must be positive");
    if (cfg.shell_floor <= 0.0) throw std::invalid_argument("phi3: shell floor must be positive");
    if (cfg.tol <= 0.0) throw std::invalid_argument("phi3: tolerance must be positive");
    if (cfg.sig.dim() != cfg.grid->dim)
        throw std::invalid_argument("phi3: signature dimension does not match the grid");
}

// On-shell factors with the equations' sign convention m^2 - eta(dpi)^2.
Eigen::VectorXd mass_factors_point(const Phi3Config& cfg) {
    const auto& grid = *cfg.grid;
    Eigen::VectorXd a(grid.size());
    for (int p = 0; p < grid.size(); ++p) {
        double sq = 0.0;
        for (int mu = 0; mu < grid.dim; ++mu)
            sq += cfg.sig(mu) * grid.momenta(p, mu) * grid.momenta(p, mu);
        a(p) = cfg.mass * cfg.mass - sq;
    }
    return a;
}

Eigen::MatrixXd mass_factors_pair(const Phi3Config& cfg) {
    const auto& grid = *cfg.grid;
    Eigen::MatrixXd a(grid.size(), grid.size());
    for (int p = 0; p < grid.size(); ++p)
        for (int q = 0; q < grid.size(); ++q) {
            double sq = 0.0;
            for (int mu = 0; mu < grid.dim; ++mu) {
                const double d = grid.momenta(p, mu) - grid.momenta(q, mu);
                sq += cfg.sig(mu) * d * d;
            }
            a(p, q) = cfg.mass * cfg.mass - sq;
        }
    return a;
}

CMatrix projector_matrix(const VacuumProjector& pi, const GridPtr& grid) {
    const int n = grid->size();
    CMatrix m(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) m(p, q) = pi.kernel_entry(p, q, grid->weight);
    return m;
}

}  // namespace

Phi3Residual phi3_residual(const CVector& phi1_star, const CVector& phi2, const CMatrix& kernel,
                           const VacuumProjector& pi, const Phi3Config& cfg) {
    check_config(cfg);
    const int n = cfg.grid->size();
    if (phi1_star.size() != n || phi2.size() != n || kernel.rows() != n || kernel.cols() != n)
        throw std::invalid_argument("phi3_residual: field sizes do not match the grid");

    const double w = cfg.grid->weight;
    const Complex lam = cfg.coupling;
    const Eigen::VectorXd a1 = mass_factors_point(cfg);
    const Eigen::MatrixXd a3 = mass_factors_pair(cfg);

    Phi3Residual out;
    out.r1 = a1.cast<Complex>().cwiseProduct(phi1_star) -
             lam * w * CVector(kernel.transpose() * phi1_star);
    out.r2 = a1.cast<Complex>().cwiseProduct(phi2) - lam * w * CVector(kernel * phi2);
    const Complex vac_pair = w * phi1_star.cwiseProduct(phi2).sum();
    out.r3 = a3.cast<Complex>().cwiseProduct(kernel) -
             lam * (w * CMatrix(kernel * kernel) + CMatrix(phi2 * phi1_star.transpose()) -
                    vac_pair * projector_matrix(pi, cfg.grid));

    out.norm1 = std::sqrt(w) * out.r1.norm();
    out.norm2 = std::sqrt(w) * out.r2.norm();
    out.norm3 = w * out.r3.norm();

    out.shell_warning = cfg.mass * cfg.mass < cfg.shell_floor ||
                        a1.cwiseAbs().minCoeff() < cfg.shell_floor ||
                        a3.cwiseAbs().minCoeff() < cfg.shell_floor;
    return out;
}

CVector phi3_stacked_residual(const Phi3Residual& r, double weight) {
    const int n = static_cast<int>(r.r1.size());
    CVector stack(2 * n + n * n);
    stack.segment(0, n) = std::sqrt(weight) * r.r1;
    stack.segment(n, n) = std::sqrt(weight) * r.r2;
    for (int p = 0; p < n; ++p)
        stack.segment(2 * n + p * n, n) = weight * r.r3.row(p).transpose();
    return stack;
}

CMatrix phi3_jacobian(const CVector& phi1_star, const CVector& phi2, const CMatrix& kernel,
                      const VacuumProjector& pi, const Phi3Config& cfg) {
    check_config(cfg);
    const int n = cfg.grid->size();
    const int dim = 2 * n + n * n;
    const double w = cfg.grid->weight;
    const Complex lam = cfg.coupling;
    const Eigen::VectorXd a1 = mass_factors_point(cfg);
    const Eigen::MatrixXd a3 = mass_factors_pair(cfg);
    const CMatrix pimat = projector_matrix(pi, cfg.grid);

    const auto k_index = [n](int p, int q) { return 2 * n + p * n + q; };

    CMatrix jac = CMatrix::Zero(dim, dim);
    for (int p = 0; p < n; ++p) {
        jac(p, p) += a1(p);
        jac(n + p, n + p) += a1(p);
        for (int q = 0; q < n; ++q) {
            jac(p, q) -= lam * w * kernel(q, p);
            jac(p, k_index(q, p)) -= lam * w * phi1_star(q);
            jac(n + p, n + q) -= lam * w * kernel(p, q);
            jac(n + p, k_index(p, q)) -= lam * w * phi2(q);
        }
    }
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            const int row = k_index(p, q);
            jac(row, k_index(p, q)) += a3(p, q);
            for (int r = 0; r < n; ++r) {
                jac(row, k_index(p, r)) -= lam * w * kernel(r, q);
                jac(row, k_index(r, q)) -= lam * w * kernel(p, r);
                jac(row, r) += lam * pimat(p, q) * w * phi2(r);
                jac(row, n + r) += lam * pimat(p, q) * w * phi1_star(r);
            }
            jac(row, n + p) -= lam * phi1_star(q);
            jac(row, q) -= lam * phi2(p);
        }
    }

    jac.topRows(2 * n) *= std::sqrt(w);
    jac.bottomRows(n * n) *= w;
    return jac;
}

Phi3Result phi3_solve(const Phi3Config& cfg) {
    check_config(cfg);
    if (!same_grid(*cfg.grid, *cfg.seed.grid))
        throw std::invalid_argument("phi3_solve: seed lives on a different grid");
    const int n = cfg.grid->size();
    const double w = cfg.grid->weight;
    const VacuumProjector pi;  // identity on the truncated space

    CVector phi1 = cfg.seed.vac_row;
    CVector phi2 = cfg.seed.vac_col;
    CMatrix kernel = cfg.seed.kernel;

    Phi3Result out{FieldOperator(cfg.grid), {}, 0, false, false, false};
    Phi3Residual res = phi3_residual(phi1, phi2, kernel, pi, cfg);
    out.residual_trace.push_back(res.total());
    out.shell_warning = res.shell_warning;

    while (out.iterations < cfg.max_iter && res.total() > cfg.tol) {
        const CMatrix jac = phi3_jacobian(phi1, phi2, kernel, pi, cfg);
        const CVector rhs = -phi3_stacked_residual(res, w);

        Eigen::ColPivHouseholderQR<CMatrix> qr(jac);
        CVector step(jac.cols());
        if (qr.rank() < jac.cols()) {
            out.regularized = true;
            const double ridge = 1e-12 * jac.squaredNorm() / jac.cols() + 1e-300;
            const CMatrix normal =
                CMatrix(jac.adjoint() * jac) + ridge * CMatrix::Identity(jac.cols(), jac.cols());
            step = normal.ldlt().solve(CVector(jac.adjoint() * rhs));
        } else {
            step = qr.solve(rhs);
        }

        // Backtracking: accept the first damping that strictly decreases the
        // stacked norm; a fully stalled search returns the best iterate found.
        double damp = 1.0;
        bool accepted = false;
        while (damp >= 1.0 / 65536.0) {
            const CVector p1 = phi1 + damp * step.segment(0, n);
            const CVector p2 = phi2 + damp * step.segment(n, n);
            CMatrix kk = kernel;
            for (int p = 0; p < n; ++p)
                kk.row(p) += damp * step.segment(2 * n + p * n, n).transpose();
            const Phi3Residual trial = phi3_residual(p1, p2, kk, pi, cfg);
            if (trial.total() < res.total() * (1.0 - 1e-12)) {
                phi1 = p1;
                phi2 = p2;
                kernel = kk;
                res = trial;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if (!accepted) break;
        out.shell_warning = out.shell_warning || res.shell_warning;
        out.residual_trace.push_back(res.total());
        ++out.iterations;
    }

    out.converged = res.total() <= cfg.tol;
    out.fields.vac_row = phi1;
    out.fields.vac_col = phi2;
    out.fields.kernel = kernel;
    return out;
}

}  // namespace opfield::phi3
