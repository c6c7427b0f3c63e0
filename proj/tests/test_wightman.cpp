#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/rng.hpp"
#include "opfield/wightman.hpp"
#include "support/util.hpp"

#include <complex>

using namespace opfield;
using namespace opfield::wightman;

namespace {

double contract_oracle(const Signature& sig, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
    double dot = 0.0;
    for (int mu = 0; mu < p.size(); ++mu) dot += sig(mu) * p(mu) * x(mu);
    return dot;
}

Eigen::VectorXd pt(std::initializer_list<double> coords) {
    Eigen::VectorXd x(static_cast<int>(coords.size()));
    int i = 0;
    for (double c : coords) x(i++) = c;
    return x;
}

}  // namespace

TEST_CASE("coincident two-point chain is the plain quadrature pairing") {
    Rng rng(501);
    const auto grid = build_grid(2, 3);
    const auto op = random_operator(rng, grid, 1.0);
    const auto sig = Signature::euclidean(2);

    const auto x = pt({0.4, -1.2});
    Complex oracle = 0.0;
    for (int i = 0; i < grid->size(); ++i) oracle += grid->weight * op.vac_row(i) * op.vac_col(i);
    CHECK(std::abs(connected_w(op, {x, x}, sig) - oracle) < 1e-13);

    FieldOperator dead = op;
    dead.vac_col.setZero();
    CHECK(connected_w(dead, {x, pt({2.0, 0.1})}, sig) == Complex(0.0));
}

TEST_CASE("three-point chain matches a direct double sum") {
    const auto grid = build_grid(1, 2);
    FieldOperator op(grid);
    op.vac_row << Complex(1.0, 0.5), Complex(-0.25, 0.0);
    op.vac_col << Complex(0.5, 0.0), Complex(-1.0, 0.25);
    op.kernel << Complex(0.2, 0.0), Complex(-0.3, 0.1), Complex(0.0, 0.4), Complex(0.9, 0.0);
    const auto sig = Signature::euclidean(1);

    const auto x1 = pt({0.3}), x2 = pt({-0.7}), x3 = pt({1.1});
    const double w = grid->weight;
    Complex oracle = 0.0;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const Complex ph1(0.0, contract_oracle(sig, grid->momenta.row(p), x1 - x2));
            const Complex ph2(0.0, contract_oracle(sig, grid->momenta.row(q), x2 - x3));
            oracle += w * w * op.vac_row(p) * std::exp(ph1) * op.kernel(p, q) * std::exp(ph2) *
                      op.vac_col(q);
        }
    }
    CHECK(std::abs(connected_w(op, {x1, x2, x3}, sig) - oracle) < 1e-14);
}

TEST_CASE("minkowski contraction flips spatial phase signs") {
    Rng rng(502);
    const auto grid = build_grid(2, 2);
    const auto op = random_operator(rng, grid, 1.0);
    const auto sig = Signature::minkowski(2);

    const auto x1 = pt({0.6, -0.9}), x2 = pt({-0.2, 0.35});
    Complex oracle = 0.0;
    for (int p = 0; p < grid->size(); ++p) {
        const double dot = grid->momenta(p, 0) * (x1(0) - x2(0)) -
                           grid->momenta(p, 1) * (x1(1) - x2(1));
        oracle += grid->weight * op.vac_row(p) * std::exp(Complex(0.0, dot)) * op.vac_col(p);
    }
    CHECK(std::abs(connected_w(op, {x1, x2}, sig) - oracle) < 1e-14);
}

TEST_CASE("connected chain rejects short or mismatched input") {
    Rng rng(503);
    const auto op = random_operator(rng, build_grid(1, 2), 1.0);
    const auto sig = Signature::euclidean(1);
    CHECK_THROWS_AS(connected_w(op, {pt({0.0})}, sig), std::invalid_argument);
    CHECK_THROWS_AS(connected_w(op, {pt({0.0, 1.0}), pt({0.0, 1.0})}, sig), std::invalid_argument);
}

TEST_CASE("recursion bases follow the vacuum expectation") {
    Rng rng(504);
    const auto grid = build_grid(1, 3);
    const auto sig = Signature::euclidean(1);
    auto op = random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true);

    CHECK(vacuum_npoint(op, {}, sig) == Complex(1.0));
    CHECK(vacuum_npoint(op, {pt({0.7})}, sig) == Complex(0.0));
    op.vac_vac = Complex(0.3, -0.1);
    CHECK(vacuum_npoint(op, {pt({0.7})}, sig) == Complex(0.3, -0.1));

    op.vac_vac = 0.0;
    const auto x1 = pt({0.7}), x2 = pt({-0.4});
    CHECK(std::abs(vacuum_npoint(op, {x1, x2}, sig) - connected_w(op, {x1, x2}, sig)) < 1e-14);
}

TEST_CASE("brute force at the origin is a matrix power") {
    Rng rng(505);
    const auto grid = build_grid(1, 4);
    const auto op = random_operator(rng, grid, 0.7);
    const auto sig = Signature::euclidean(1);

    const CMatrix full = full_matrix(op);
    CMatrix power = CMatrix::Identity(full.rows(), full.cols());
    PointList points;
    for (int n = 1; n <= 4; ++n) {
        power = power * full;
        points.push_back(pt({0.0}));
        CHECK(std::abs(brute_force_npoint(op, points, sig) - power(0, 0)) < 1e-12);
    }
}

TEST_CASE("recursion equals the conjugated-phase product for vanishing vacuum part") {
    Rng rng(506);
    for (int rep = 0; rep < 200; ++rep) {
        const auto grid = rep % 3 == 0   ? build_grid(1, 4)
                          : rep % 3 == 1 ? build_grid(2, 3)
                                         : build_grid(2, 4);
        const auto sig = rep % 2 == 0 ? Signature::euclidean(grid->dim)
                                      : Signature::minkowski(grid->dim);
        auto op = scaled_to_norm(random_operator(rng, grid, 1.0, /*zero_vac_vac=*/true), 1.0);
        op.vac_vac = 0.0;  // scaling keeps it zero; stated for clarity

        PointList points;
        const int n = 2 + rep % 4;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd x(grid->dim);
            for (int mu = 0; mu < grid->dim; ++mu) x(mu) = 4.0 * rng.uniform() - 2.0;
            points.push_back(x);
        }
        CAPTURE(rep);
        CHECK(std::abs(vacuum_npoint(op, points, sig) - brute_force_npoint(op, points, sig)) <
              1e-10);
    }
}

TEST_CASE("both evaluators are translation invariant") {
    Rng rng(507);
    const auto grid = build_grid(2, 3);
    const auto sig = Signature::minkowski(2);
    const auto op = scaled_to_norm(random_operator(rng, grid, 1.0, true), 1.0);

    const PointList points = {pt({0.2, -0.6}), pt({1.4, 0.3}), pt({-0.8, 0.9})};
    const auto shift = pt({-2.3, 0.55});
    PointList moved;
    for (const auto& x : points) moved.push_back(x + shift);

    CHECK(std::abs(vacuum_npoint(op, points, sig) - vacuum_npoint(op, moved, sig)) < 1e-10);
    CHECK(std::abs(brute_force_npoint(op, points, sig) - brute_force_npoint(op, moved, sig)) <
          1e-10);
}

TEST_CASE("adjoint operator conjugates the reversed two-point value") {
    Rng rng(508);
    const auto grid = build_grid(1, 5);
    const auto sig = Signature::euclidean(1);
    const auto op = random_operator(rng, grid, 1.0);
    const auto flip = adjoint(op);

    const auto x1 = pt({0.9}), x2 = pt({-1.3});
    CHECK(std::abs(connected_w(op, {x1, x2}, sig) -
                   std::conj(connected_w(flip, {x2, x1}, sig))) < 1e-12);
    CHECK(std::abs(brute_force_npoint(op, {x1, x2}, sig) -
                   std::conj(brute_force_npoint(flip, {x2, x1}, sig))) < 1e-12);
}

TEST_CASE("euclidean coincident two-point value of a self-paired field is real") {
    Rng rng(509);
    const auto grid = build_grid(2, 3);
    auto op = random_operator(rng, grid, 1.0, true);
    op.vac_row = op.vac_col.conjugate();
    const auto sig = Signature::euclidean(2);

    WightmanTable table;
    table.points = {pt({0.5, 0.5}), pt({0.5, 0.5})};
    table.order = static_cast<int>(table.points.size());
    table.value = connected_w(op, table.points, sig);
    CHECK(table.value.imag() == 0.0);
    CHECK(table.value.real() > 0.0);
}
