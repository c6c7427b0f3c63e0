#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

namespace opfield::intertwiner {

using Complex = std::complex<double>;

// Exact Gaussian-integer coefficient; the basis recurrence only ever
// multiplies by -i and subtracts, so every basis coefficient stays in Z[i].
struct GaussInt {
    long long re = 0;
    long long im = 0;

    friend GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
    friend GaussInt operator-(GaussInt a, GaussInt b) { return {a.re - b.re, a.im - b.im}; }
    friend bool operator==(GaussInt a, GaussInt b) = default;
    Complex to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

inline GaussInt times_minus_i(GaussInt a) { return {a.im, -a.re}; }
inline Complex times_minus_i(Complex a) { return {a.imag(), -a.real()}; }
inline bool is_zero(GaussInt a) { return a.re == 0 && a.im == 0; }
inline bool is_zero(Complex a) { return a == Complex(0.0); }

// Piecewise polynomial supported on integer unit intervals [z, z+1) with
// ascending-power coefficient lists per piece.
template <class C>
struct PiecewisePoly {
    std::map<long long, std::vector<C>> pieces;

    void normalize() {
        for (auto it = pieces.begin(); it != pieces.end();) {
            auto& coeffs = it->second;
            while (!coeffs.empty() && is_zero(coeffs.back())) coeffs.pop_back();
            it = coeffs.empty() ? pieces.erase(it) : std::next(it);
        }
    }

    int degree() const {
        int deg = -1;
        for (const auto& [z, coeffs] : pieces)
            deg = std::max(deg, static_cast<int>(coeffs.size()) - 1);
        return deg;
    }
};

using ExactPoly = PiecewisePoly<GaussInt>;
using ComplexPoly = PiecewisePoly<Complex>;

template <class C>
PiecewisePoly<C> mul_minus_ip(const PiecewisePoly<C>& a) {
    PiecewisePoly<C> out;
    for (const auto& [z, coeffs] : a.pieces) {
        std::vector<C> lifted(coeffs.size() + 1, C{});
        for (std::size_t i = 0; i < coeffs.size(); ++i) lifted[i + 1] = times_minus_i(coeffs[i]);
        out.pieces.emplace(z, std::move(lifted));
    }
    out.normalize();
    return out;
}

template <class C>
PiecewisePoly<C> subtract(PiecewisePoly<C> a, const PiecewisePoly<C>& b) {
    for (const auto& [z, coeffs] : b.pieces) {
        auto& dst = a.pieces[z];
        if (dst.size() < coeffs.size()) dst.resize(coeffs.size(), C{});
        for (std::size_t i = 0; i < coeffs.size(); ++i) dst[i] = dst[i] - coeffs[i];
    }
    a.normalize();
    return a;
}

inline ComplexPoly to_complex(const ExactPoly& a) {
    ComplexPoly out;
    for (const auto& [z, coeffs] : a.pieces) {
        std::vector<Complex> c(coeffs.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) c[i] = coeffs[i].to_complex();
        out.pieces.emplace(z, std::move(c));
    }
    return out;
}

inline void add_scaled(ComplexPoly& acc, const ExactPoly& a, Complex scale) {
    for (const auto& [z, coeffs] : a.pieces) {
        auto& dst = acc.pieces[z];
        if (dst.size() < coeffs.size()) dst.resize(coeffs.size(), Complex(0.0));
        for (std::size_t i = 0; i < coeffs.size(); ++i) dst[i] += scale * coeffs[i].to_complex();
    }
}

inline Complex evaluate(const ComplexPoly& a, double x) {
    const auto it = a.pieces.find(static_cast<long long>(std::floor(x)));
    if (it == a.pieces.end()) return Complex(0.0);
    Complex acc(0.0);
    for (auto c = it->second.rbegin(); c != it->second.rend(); ++c) acc = acc * x + *c;
    return acc;
}

// Injection of positive-integer leading tuples into Z: iterated Cantor pairing
// down to one positive integer, then the zigzag 1,2,3,4,5,... -> 0,1,-1,2,-2,...
long long pairing_bijection(const std::vector<int>& leading);

// Indicator of [z, z+1) with z the paired image of the leading tuple; this is
// the level-1 element for that tuple.
ExactPoly base_element(const std::vector<int>& leading);

// Memoized basis elements e~_{n1..nk} built by the last-index recurrence
//   e~_{t, v+1} = (-ip) e~_{t, v} - sum_{j<k} e~_{t+e_j, v},
// so that -ip e~_idx = sum over all k positions of e~_{idx + e_j}.
class HermiteBasisTable {
public:
    explicit HermiteBasisTable(int arg_count);
    int arg_count() const { return k_; }
    const ExactPoly& element(const std::vector<int>& full_index);

private:
    int k_;
    std::map<std::vector<int>, ExactPoly> cache_;
};

// Element with the last index of full_index incremented by one.
ExactPoly raise_index(HermiteBasisTable& table, const std::vector<int>& full_index);

// Finite complex combination of basis tuples (all of length arg_count,
// entries >= 1).
struct MultiIndexCoefficients {
    int arg_count = 0;
    std::map<std::vector<int>, Complex> entries;
};

// Coefficient image of the total derivative: out_s = sum_j in_{s - e_j}.
MultiIndexCoefficients shift_coefficients(const MultiIndexCoefficients& c);

ComplexPoly v_map(HermiteBasisTable& table, const MultiIndexCoefficients& c);

// Max pointwise deviation between v_map(shift(c)) and (-ip) v_map(c), sampled
// per piece with more points than the polynomial degree.
double check_intertwining(HermiteBasisTable& table, const MultiIndexCoefficients& c);

}  // namespace opfield::intertwiner
