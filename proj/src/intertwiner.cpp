#include "opfield/intertwiner.hpp"

#include <algorithm>
#include <cmath>

namespace opfield::intertwiner {

namespace {

void validate_index(const std::vector<int>& idx, int k, const char* who) {
    if (static_cast<int>(idx.size()) != k)
        throw std::invalid_argument(std::string(who) + ": index tuple has wrong length");
    for (int v : idx)
        if (v < 1) throw std::invalid_argument(std::string(who) + ": indices must be positive");
}

}  // namespace

long long pairing_bijection(const std::vector<int>& leading) {
    if (leading.empty())
        throw std::invalid_argument("pairing_bijection: leading tuple must be nonempty");
    long long p = 0;
    bool first = true;
    for (int v : leading) {
        if (v < 1)
            throw std::invalid_argument("pairing_bijection: indices must be positive");
        if (first) {
            p = v;
            first = false;
        } else {
            const long long a = p - 1;
            const long long b = v - 1;
            p = (a + b) * (a + b + 1) / 2 + b + 1;
        }
        if (p > (1LL << 40)) throw std::invalid_argument("pairing_bijection: overflow");
    }
    return p % 2 == 0 ? p / 2 : -((p - 1) / 2);
}

ExactPoly base_element(const std::vector<int>& leading) {
    ExactPoly e;
    e.pieces.emplace(pairing_bijection(leading), std::vector<GaussInt>{GaussInt{1, 0}});
    return e;
}

HermiteBasisTable::HermiteBasisTable(int arg_count) : k_(arg_count) {
    if (arg_count < 2)
        throw std::invalid_argument("HermiteBasisTable: need at least two arguments");
}

const ExactPoly& HermiteBasisTable::element(const std::vector<int>& full_index) {
    validate_index(full_index, k_, "HermiteBasisTable::element");
    auto it = cache_.find(full_index);
    if (it != cache_.end()) return it->second;

    ExactPoly result;
    if (full_index.back() == 1) {
        std::vector<int> leading(full_index.begin(), full_index.end() - 1);
        result = base_element(leading);
    } else {
        std::vector<int> below = full_index;
        below.back() -= 1;
        result = mul_minus_ip(element(below));
        for (int j = 0; j + 1 < k_; ++j) {
            std::vector<int> raised = below;
            raised[j] += 1;
            result = subtract(result, element(raised));
        }
    }
    return cache_.emplace(full_index, std::move(result)).first->second;
}

ExactPoly raise_index(HermiteBasisTable& table, const std::vector<int>& full_index) {
    validate_index(full_index, table.arg_count(), "raise_index");
    std::vector<int> up = full_index;
    up.back() += 1;
    return table.element(up);
}

MultiIndexCoefficients shift_coefficients(const MultiIndexCoefficients& c) {
    MultiIndexCoefficients out;
    out.arg_count = c.arg_count;
    for (const auto& [idx, coeff] : c.entries) {
        validate_index(idx, c.arg_count, "shift_coefficients");
        for (int j = 0; j < c.arg_count; ++j) {
            std::vector<int> raised = idx;
            raised[j] += 1;
            out.entries[raised] += coeff;
        }
    }
    return out;
}

ComplexPoly v_map(HermiteBasisTable& table, const MultiIndexCoefficients& c) {
    if (c.arg_count != table.arg_count())
        throw std::invalid_argument("v_map: coefficient arity does not match the table");
    ComplexPoly out;
    for (const auto& [idx, coeff] : c.entries) {
        validate_index(idx, c.arg_count, "v_map");
        if (coeff == Complex(0.0)) continue;
        add_scaled(out, table.element(idx), coeff);
    }
    out.normalize();
    return out;
}

double check_intertwining(HermiteBasisTable& table, const MultiIndexCoefficients& c) {
    const ComplexPoly lhs = v_map(table, shift_coefficients(c));
    const ComplexPoly rhs = mul_minus_ip(v_map(table, c));

    std::vector<long long> zs;
    for (const auto& [z, coeffs] : lhs.pieces) zs.push_back(z);
    for (const auto& [z, coeffs] : rhs.pieces) zs.push_back(z);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    const int samples = std::max(lhs.degree(), rhs.degree()) + 2;
    double worst = 0.0;
    for (long long z : zs)
        for (int i = 0; i < samples; ++i) {
            const double x = static_cast<double>(z) + (i + 0.5) / samples;
            worst = std::max(worst, std::abs(evaluate(lhs, x) - evaluate(rhs, x)));
        }
    return worst;
}

}  // namespace opfield::intertwiner
