#pragma once

#include "opfield/operator.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace opfield::gns {

using opfield::CMatrix;
using opfield::Complex;
using opfield::CVector;

struct IncompleteTableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveFunctionalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite table of vacuum expectation values of ordered field products at a
// fixed list of sample points; keys are index words into the point list.
// max_order is the word-length bound L used for reconstruction; values may
// cover higher orders than 2L (they are needed up to 2L+2 for exact boundary
// handling).
struct MomentTable {
    int max_order = 0;
    Eigen::MatrixXd points;  // P x d sample coordinates
    std::map<std::vector<int>, Complex> values;

    int num_points() const { return static_cast<int>(points.rows()); }
    bool has(const std::vector<int>& word) const { return values.count(word) > 0; }
    Complex value(const std::vector<int>& word) const;
    // max |w(reverse t)* - w(t)|; a positive functional keeps this at 0.
    double hermiticity_defect() const;
};

// Words of length <= max_len over {0..num_points-1}, ordered by length then
// lexicographically; this fixed order indexes Gram rows everywhere below.
std::vector<std::vector<int>> enumerate_words(int num_points, int max_len);

CMatrix build_gram(const MomentTable& table);

struct Quotient {
    CMatrix basis;  // words x rank; columns v_i / sqrt(eig_i) are orthonormal in G
    Eigen::VectorXd eigenvalues;
    double rank_tolerance = 0.0;
    int reduced_dim = 0;
};

// Spectral quotient by the numerical null space; eigenvalues significantly
// below -rank_tolerance mean the table is not a positive functional.
Quotient quotient_null_space(const CMatrix& gram);

struct CyclicRepresentation {
    int dim = 0;
    CVector vacuum;             // quotient coordinates of the empty word
    std::vector<CMatrix> field; // compressed left-multiplication per sample point
    bool truncation_flagged = false;
    double boundary_leakage = -1.0;  // max squared norm lost on boundary columns
};

CyclicRepresentation represent_field(const MomentTable& table, const Quotient& q);

Complex reconstructed_moment(const CyclicRepresentation& rep, const std::vector<int>& word);

struct WickMoments {
    MomentTable table;
    bool two_point_psd_warning = false;
};

// Gaussian (quasi-free) moments of a Hermitian two-point matrix: sums over
// perfect pairings of ordered two-point values; odd orders vanish.  The
// returned max_order records the generated coverage.
WickMoments wick_moments(const CMatrix& two_point, const Eigen::MatrixXd& points, int order);

void save_moment_table(std::ostream& out, const MomentTable& table);
MomentTable load_moment_table(std::istream& in);

}  // namespace opfield::gns
