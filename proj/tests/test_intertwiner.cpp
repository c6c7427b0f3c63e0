#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/intertwiner.hpp"
#include "opfield/rng.hpp"

#include <set>

using namespace opfield::intertwiner;
using opfield::Rng;

namespace {

bool exact_equal(ExactPoly a, ExactPoly b) {
    a.normalize();
    b.normalize();
    return a.pieces == b.pieces;
}

}  // namespace

TEST_CASE("pairing_zigzag_for_single_index") {
    CHECK(pairing_bijection({1}) == 0);
    CHECK(pairing_bijection({2}) == 1);
    CHECK(pairing_bijection({3}) == -1);
    CHECK(pairing_bijection({4}) == 2);
    CHECK(pairing_bijection({5}) == -2);
}

TEST_CASE("pairing_is_injective_on_small_tuples") {
    std::set<long long> seen;
    for (int a = 1; a <= 6; ++a)
        for (int b = 1; b <= 6; ++b)
            CHECK(seen.insert(pairing_bijection({a, b})).second);
    // Different arities land in Z independently; same-arity collisions are the
    // correctness concern for a fixed table.
}

TEST_CASE("pairing_rejects_bad_tuples") {
    CHECK_THROWS_AS(pairing_bijection({}), std::invalid_argument);
    CHECK_THROWS_AS(pairing_bijection({0}), std::invalid_argument);
    CHECK_THROWS_AS(pairing_bijection({2, -1}), std::invalid_argument);
}

TEST_CASE("base_elements_are_unit_indicators") {
    const ExactPoly e1 = base_element({1});
    REQUIRE(e1.pieces.size() == 1);
    CHECK(e1.pieces.count(0) == 1);
    CHECK(e1.pieces.at(0) == std::vector<GaussInt>{GaussInt{1, 0}});

    const ExactPoly e2 = base_element({2});
    CHECK(e2.pieces.count(1) == 1);
}

TEST_CASE("first_raise_from_the_indicator") {
    HermiteBasisTable table(2);
    // e~_{1,2} = (-ip) 1_{[0,1)} - 1_{[1,2)}.
    const ExactPoly got = table.element({1, 2});
    ExactPoly expected;
    expected.pieces[0] = {GaussInt{0, 0}, GaussInt{0, -1}};
    expected.pieces[1] = {GaussInt{-1, 0}};
    CHECK(exact_equal(got, expected));

    CHECK(exact_equal(raise_index(table, {1, 1}), got));
}

TEST_CASE("recurrence_identity_is_exact") {
    // -ip e~_idx = sum_j e~_{idx + e_j} at the coefficient level, exactly.
    for (int k : {2, 3}) {
        HermiteBasisTable table(k);
        std::vector<std::vector<int>> indices;
        if (k == 2) {
            for (int a = 1; a <= 3; ++a)
                for (int v = 1; v <= 4; ++v) indices.push_back({a, v});
        } else {
            for (int a = 1; a <= 2; ++a)
                for (int b = 1; b <= 2; ++b)
                    for (int v = 1; v <= 4; ++v) indices.push_back({a, b, v});
        }
        for (const auto& idx : indices) {
            const ExactPoly lhs = mul_minus_ip(table.element(idx));
            ExactPoly sum;
            for (int j = 0; j < k; ++j) {
                std::vector<int> raised = idx;
                raised[j] += 1;
                sum = subtract(sum, subtract(ExactPoly{}, table.element(raised)));
            }
            CHECK(exact_equal(lhs, sum));
        }
    }
}

TEST_CASE("degree_grows_at_most_with_last_index") {
    HermiteBasisTable table(3);
    for (int v = 1; v <= 5; ++v) {
        const ExactPoly e = table.element({1, 2, v});
        CHECK(e.degree() <= v - 1);
    }
}

TEST_CASE("v_map_of_single_tuple_is_the_element") {
    HermiteBasisTable table(2);
    MultiIndexCoefficients c;
    c.arg_count = 2;
    c.entries[{2, 3}] = Complex(1.0);
    const ComplexPoly got = v_map(table, c);
    const ComplexPoly expected = to_complex(table.element({2, 3}));
    for (const auto& [z, coeffs] : expected.pieces)
        for (double x : {z + 0.25, z + 0.75})
            CHECK(std::abs(evaluate(got, x) - evaluate(expected, x)) == 0.0);
}

TEST_CASE("v_map_is_linear") {
    HermiteBasisTable table(2);
    Rng rng(101);
    MultiIndexCoefficients c1, c2, mix;
    c1.arg_count = c2.arg_count = mix.arg_count = 2;
    const Complex alpha(0.7, -0.3);
    for (int t = 0; t < 4; ++t) {
        std::vector<int> idx{1 + int(rng.uniform() * 3), 1 + int(rng.uniform() * 3)};
        const Complex a = rng.cnormal();
        const Complex b = rng.cnormal();
        c1.entries[idx] += a;
        c2.entries[idx] += b;
        mix.entries[idx] += alpha * a + b;
    }
    const ComplexPoly lhs = v_map(table, mix);
    ComplexPoly rhs = v_map(table, c1);
    for (auto& [z, coeffs] : rhs.pieces)
        for (auto& v : coeffs) v *= alpha;
    const ComplexPoly add = v_map(table, c2);
    for (double x = -3.2; x < 4.0; x += 0.37) {
        const Complex want = evaluate(rhs, x) + evaluate(add, x);
        CHECK(std::abs(evaluate(lhs, x) - want) < 1e-12);
    }
}

TEST_CASE("derivative_image_equals_momentum_multiplication") {
    HermiteBasisTable table(3);
    MultiIndexCoefficients c;
    c.arg_count = 3;
    c.entries[{1, 1, 2}] = Complex(0.5, 1.0);
    c.entries[{2, 1, 1}] = Complex(-1.0, 0.25);
    const ComplexPoly lhs = v_map(table, shift_coefficients(c));
    const ComplexPoly rhs = mul_minus_ip(v_map(table, c));
    for (double x = -6.0; x < 7.0; x += 0.21)
        CHECK(std::abs(evaluate(lhs, x) - evaluate(rhs, x)) < 1e-14);
}

TEST_CASE("check_intertwining_on_random_sets") {
    Rng rng(202);
    for (int trial = 0; trial < 25; ++trial) {
        const int k = trial % 2 == 0 ? 2 : 3;
        HermiteBasisTable table(k);
        MultiIndexCoefficients c;
        c.arg_count = k;
        const int terms = 1 + int(rng.uniform() * 4);
        for (int t = 0; t < terms; ++t) {
            std::vector<int> idx(k);
            for (int& v : idx) v = 1 + int(rng.uniform() * 3);
            c.entries[idx] += rng.cnormal();
        }
        CHECK(check_intertwining(table, c) < 1e-12);
    }
}

TEST_CASE("coefficient_validation") {
    HermiteBasisTable table(2);
    MultiIndexCoefficients bad;
    bad.arg_count = 2;
    bad.entries[{1}] = Complex(1.0);
    CHECK_THROWS_AS(v_map(table, bad), std::invalid_argument);

    MultiIndexCoefficients negative;
    negative.arg_count = 2;
    negative.entries[{1, 0}] = Complex(1.0);
    CHECK_THROWS_AS(v_map(table, negative), std::invalid_argument);

    CHECK_THROWS_AS(HermiteBasisTable(1), std::invalid_argument);
    CHECK_THROWS_AS(table.element({1, 2, 3}), std::invalid_argument);
}
