#pragma once

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace opfield {

// Diagonal spacetime metric: Euclidean = identity, Minkowski = diag(+1, -1, ..., -1).
class Signature {
public:
    static Signature euclidean(int dim);
    static Signature minkowski(int dim);

    int dim() const { return static_cast<int>(diag_.size()); }
    double operator()(int axis) const { return diag_(axis); }
    const Eigen::VectorXd& diagonal() const { return diag_; }
    bool is_euclidean() const { return (diag_.array() == 1.0).all(); }

private:
    explicit Signature(Eigen::VectorXd d) : diag_(std::move(d)) {}
    Eigen::VectorXd diag_;
};

// Midpoint discretization of the compactified momentum cube (0, pi)^d.
// Point j has cube coordinates coords(j, mu) = pi*(i_mu + 1/2)/n and physical
// momenta momenta(j, mu) = tan(coords(j, mu) - pi/2); every point carries the
// uniform quadrature weight (pi/n)^d.  Points are ordered row-major with axis
// 0 slowest.  Momenta are stored mirror-antisymmetrically so the reflection
// i -> n-1-i negates every component exactly.
struct MomentumGrid {
    int dim = 0;
    int per_axis = 0;
    double weight = 0.0;
    Eigen::MatrixXd coords;
    Eigen::MatrixXd momenta;

    int size() const { return static_cast<int>(coords.rows()); }
    int axis_index(int point, int axis) const;
    int reflect_point(int point) const;
};

using GridPtr = std::shared_ptr<const MomentumGrid>;

GridPtr build_grid(int dim, int per_axis);

bool same_grid(const MomentumGrid& a, const MomentumGrid& b);

// Diagonal of the translation generator along one axis; the vacuum component
// (not part of the grid) has eigenvalue 0.
Eigen::VectorXd translation_generator(const MomentumGrid& grid, int axis);

// Momentum map of the fractional-part translation generator,
// ctg({|p|}) * p / (pi * |p|) with {.} the fractional part of |p|.
Eigen::VectorXd kl_momentum(const Eigen::VectorXd& p);

// min over ordered basis pairs (vacuum included) of |m^2 + sum_mu eta_mu dp_mu^2|,
// i.e. the smallest magnitude among the mass-shell denominators.
double min_shell_gap(const MomentumGrid& grid, double mass, const Signature& sig);

// Point permutations of the hyperoctahedral symmetry group of the grid (axis
// permutations combined with per-axis reflections); momenta transform by
// signed permutation under each map.
std::vector<std::vector<int>> hyperoctahedral_point_maps(const MomentumGrid& grid);

}  // namespace opfield
