#include "opfield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace opfield {

namespace {
constexpr double kPi = std::numbers::pi;
}

Signature Signature::euclidean(int dim) {
    if (dim < 1) throw std::invalid_argument("Signature: dimension must be positive");
    return Signature(Eigen::VectorXd::Ones(dim));
}

Signature Signature::minkowski(int dim) {
    if (dim < 1) throw std::invalid_argument("Signature: dimension must be positive");
    Eigen::VectorXd d = -Eigen::VectorXd::Ones(dim);
    d(0) = 1.0;
    return Signature(std::move(d));
}

int MomentumGrid::axis_index(int point, int axis) const {
    int stride = 1;
    for (int mu = dim - 1; mu > axis; --mu) stride *= per_axis;
    return (point / stride) % per_axis;
}

int MomentumGrid::reflect_point(int point) const {
    int out = 0;
    for (int mu = 0; mu < dim; ++mu)
        out = out * per_axis + (per_axis - 1 - axis_index(point, mu));
    return out;
}

GridPtr build_grid(int dim, int per_axis) {
    if (dim < 1 || per_axis < 1)
        throw std::invalid_argument("build_grid: dim and per_axis must be positive");
    long long total = 1;
    for (int mu = 0; mu < dim; ++mu) {
        total *= per_axis;
        if (total > (1 << 22))
            throw std::invalid_argument("build_grid: grid too large");
    }
    const int n = per_axis;
    const int num_points = static_cast<int>(total);

    // Upper half mirrors the lower half with a sign flip so the reflection
    // invariant holds exactly; an odd middle point sits at momentum 0.
    Eigen::VectorXd axis_coord(n), axis_mom(n);
    for (int i = 0; i < n; ++i) axis_coord(i) = kPi * (i + 0.5) / n;
    for (int i = 0; i < n / 2; ++i) {
        axis_mom(i) = std::tan(axis_coord(i) - kPi / 2.0);
        axis_mom(n - 1 - i) = -axis_mom(i);
    }
    if (n % 2 == 1) axis_mom(n / 2) = 0.0;

    auto g = std::make_shared<MomentumGrid>();
    g->dim = dim;
    g->per_axis = n;
    g->weight = std::pow(kPi / n, dim);
    g->coords.resize(num_points, dim);
    g->momenta.resize(num_points, dim);
    for (int j = 0; j < num_points; ++j) {
        int rem = j;
        for (int mu = dim - 1; mu >= 0; --mu) {
            const int i = rem % n;
            rem /= n;
            g->coords(j, mu) = axis_coord(i);
            g->momenta(j, mu) = axis_mom(i);
        }
    }
    return g;
}

bool same_grid(const MomentumGrid& a, const MomentumGrid& b) {
    return a.dim == b.dim && a.per_axis == b.per_axis;
}

Eigen::VectorXd translation_generator(const MomentumGrid& grid, int axis) {
    if (axis < 0 || axis >= grid.dim)
        throw std::invalid_argument("translation_generator: axis out of range");
    return grid.momenta.col(axis);
}

Eigen::VectorXd kl_momentum(const Eigen::VectorXd& p) {
    const double r = p.norm();
    if (!(r > 0.0)) throw std::domain_error("kl_momentum: |p| must be positive");
    const double frac = r - std::floor(r);
    if (frac == 0.0) throw std::domain_error("kl_momentum: cotangent argument is singular");
    const double ctg = std::cos(frac) / std::sin(frac);
    return (ctg / (kPi * r)) * p;
}

double min_shell_gap(const MomentumGrid& grid, double mass, const Signature& sig) {
    if (sig.dim() != grid.dim)
        throw std::invalid_argument("min_shell_gap: signature dimension mismatch");
    const int n = grid.size();
    auto lam = [&](int b, int mu) { return b == 0 ? 0.0 : grid.momenta(b - 1, mu); };
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            double q = mass * mass;
            for (int mu = 0; mu < grid.dim; ++mu) {
                const double dp = lam(i, mu) - lam(j, mu);
                q += sig(mu) * dp * dp;
            }
            best = std::min(best, std::abs(q));
        }
    }
    return best;
}

std::vector<std::vector<int>> hyperoctahedral_point_maps(const MomentumGrid& grid) {
    const int d = grid.dim;
    const int n = grid.per_axis;
    const int num_points = grid.size();
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> maps;
    do {
        for (int signs = 0; signs < (1 << d); ++signs) {
            std::vector<int> map(num_points);
            for (int j = 0; j < num_points; ++j) {
                int out = 0;
                for (int mu = 0; mu < d; ++mu) {
                    int i = grid.axis_index(j, perm[mu]);
                    if ((signs >> mu) & 1) i = n - 1 - i;
                    out = out * n + i;
                }
                map[j] = out;
            }
            maps.push_back(std::move(map));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return maps;
}

}  // namespace opfield
