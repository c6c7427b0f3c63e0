#include "opfield/gns.hpp"

#include <Eigen/Eigenvalues>

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace opfield::gns {

namespace {

std::string word_to_string(const std::vector<int>& word) {
    std::string s = "(";
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(word[i]);
    }
    return s + ")";
}

std::vector<int> reversed(const std::vector<int>& word) {
    return {word.rbegin(), word.rend()};
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

Complex MomentTable::value(const std::vector<int>& word) const {
    for (int i : word) {
        if (i < 0 || i >= num_points())
            throw std::invalid_argument("moment table: point index out of range in word " +
                                        word_to_string(word));
    }
    auto it = values.find(word);
    if (it == values.end())
        throw IncompleteTableError("moment table is missing the entry for word " +
                                   word_to_string(word));
    return it->second;
}

double MomentTable::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& [word, v] : values) {
        auto it = values.find(reversed(word));
        if (it == values.end()) continue;
        worst = std::max(worst, std::abs(std::conj(it->second) - v));
    }
    return worst;
}

std::vector<std::vector<int>> enumerate_words(int num_points, int max_len) {
    if (num_points <= 0) throw std::invalid_argument("enumerate_words: need at least one point");
    if (max_len < 0) throw std::invalid_argument("enumerate_words: negative length bound");
    std::vector<std::vector<int>> words;
    words.push_back({});
    for (int len = 1; len <= max_len; ++len) {
        std::vector<int> word(len, 0);
        while (true) {
            words.push_back(word);
            int pos = len - 1;
            while (pos >= 0 && word[pos] == num_points - 1) word[pos--] = 0;
            if (pos < 0) break;
            ++word[pos];
        }
    }
    return words;
}

CMatrix build_gram(const MomentTable& table) {
    double scale = 0.0;
    for (const auto& [word, v] : table.values) scale = std::max(scale, std::abs(v));
    if (table.hermiticity_defect() > 1e-8 * (1.0 + scale))
        throw std::invalid_argument("moment table is not hermitian");

    const auto words = enumerate_words(table.num_points(), table.max_order);
    const int w = static_cast<int>(words.size());
    CMatrix gram(w, w);
    for (int r = 0; r < w; ++r) {
        const auto left = reversed(words[r]);
        for (int c = 0; c < w; ++c) gram(r, c) = table.value(concat(left, words[c]));
    }
    return 0.5 * (gram + CMatrix(gram.adjoint()));
}

Quotient quotient_null_space(const CMatrix& gram) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("quotient_null_space: eigendecomposition failed");

    Quotient q;
    q.eigenvalues = eig.eigenvalues();
    const double top = q.eigenvalues.size() > 0 ? q.eigenvalues.maxCoeff() : 0.0;
    q.rank_tolerance = 1e-8 * std::max(top, 0.0);
    if (q.eigenvalues.size() > 0 && q.eigenvalues.minCoeff() < -q.rank_tolerance)
        throw NotPositiveFunctionalError("gram matrix has eigenvalue " +
                                         std::to_string(q.eigenvalues.minCoeff()) +
                                         " below -" + std::to_string(q.rank_tolerance));

    std::vector<int> keep;
    for (int i = 0; i < q.eigenvalues.size(); ++i)
        if (q.eigenvalues(i) > q.rank_tolerance) keep.push_back(i);
    q.reduced_dim = static_cast<int>(keep.size());
    q.basis.resize(gram.rows(), q.reduced_dim);
    for (int c = 0; c < q.reduced_dim; ++c)
        q.basis.col(c) = eig.eigenvectors().col(keep[c]) / std::sqrt(q.eigenvalues(keep[c]));
    return q;
}

CyclicRepresentation represent_field(const MomentTable& table, const Quotient& q) {
    const int points = table.num_points();
    const int order = table.max_order;
    const auto words = enumerate_words(points, order);
    const int w = static_cast<int>(words.size());
    if (q.basis.rows() != w)
        throw std::invalid_argument("represent_field: quotient basis does not match the table");

    CyclicRepresentation rep;
    rep.dim = q.reduced_dim;

    CVector empty_overlaps(w);
    for (int r = 0; r < w; ++r) empty_overlaps(r) = table.value(reversed(words[r]));
    rep.vacuum = q.basis.adjoint() * empty_overlaps;

    rep.field.reserve(points);
    for (int i = 0; i < points; ++i) {
        CMatrix cross(w, w);
        for (int r = 0; r < w; ++r) {
            auto left = reversed(words[r]);
            left.push_back(i);
            for (int c = 0; c < w; ++c) {
                const auto key = concat(left, words[c]);
                if (table.has(key)) {
                    cross(r, c) = table.value(key);
                } else {
                    cross(r, c) = 0.0;  // boundary action truncated
                    rep.truncation_flagged = true;
                }
            }
        }
        rep.field.push_back(q.basis.adjoint() * cross * q.basis);
    }

    // With order-(2L+2) data available, measure how much of each boundary
    // column phi(x_i) xi(v), |v| = L, escapes the compressed space.
    if (!rep.truncation_flagged) {
        double leak = 0.0;
        bool measurable = true;
        for (int i = 0; i < points && measurable; ++i) {
            for (int c = 0; c < w && measurable; ++c) {
                if (static_cast<int>(words[c].size()) != order) continue;
                std::vector<int> grown = words[c];
                grown.insert(grown.begin(), i);
                const auto full_key = concat(reversed(grown), grown);
                if (!table.has(full_key)) {
                    measurable = false;
                    break;
                }
                CVector overlaps(w);
                for (int r = 0; r < w; ++r)
                    overlaps(r) = table.value(concat(reversed(words[r]), grown));
                const double full = table.value(full_key).real();
                const double captured = (q.basis.adjoint() * overlaps).squaredNorm();
                leak = std::max(leak, full - captured);
            }
        }
        if (measurable) rep.boundary_leakage = leak;
    }
    return rep;
}

Complex reconstructed_moment(const CyclicRepresentation& rep, const std::vector<int>& word) {
    CVector state = rep.vacuum;
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        if (*it < 0 || *it >= static_cast<int>(rep.field.size()))
            throw std::invalid_argument("reconstructed_moment: point index out of range");
        state = rep.field[*it] * state;
    }
    return rep.vacuum.dot(state);
}

namespace {

// Sum over perfect pairings: pair the first remaining slot with each later
// one, multiplying by the ordered two-point value.
Complex pairing_sum(const CMatrix& two_point, const std::vector<int>& word,
                    std::vector<bool>& used, std::size_t first) {
    while (first < word.size() && used[first]) ++first;
    if (first == word.size()) return 1.0;
    used[first] = true;
    Complex total = 0.0;
    for (std::size_t j = first + 1; j < word.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        total += two_point(word[first], word[j]) * pairing_sum(two_point, word, used, first + 1);
        used[j] = false;
    }
    used[first] = false;
    return total;
}

}  // namespace

WickMoments wick_moments(const CMatrix& two_point, const Eigen::MatrixXd& points, int order) {
    const int p = static_cast<int>(points.rows());
    if (two_point.rows() != p || two_point.cols() != p)
        throw std::invalid_argument("wick_moments: two-point matrix does not match the points");
    if ((two_point - CMatrix(two_point.adjoint())).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + two_point.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("wick_moments: two-point matrix must be hermitian");
    if (order < 0) throw std::invalid_argument("wick_moments: negative order");

    WickMoments out;
    out.table.max_order = order;
    out.table.points = points;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(two_point);
    if (eig.eigenvalues().size() > 0 &&
        eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().maxCoeff()))
        out.two_point_psd_warning = true;

    for (const auto& word : enumerate_words(std::max(p, 1), order)) {
        if (p == 0 && !word.empty()) break;
        if (word.size() % 2 == 1) {
            out.table.values[word] = 0.0;
        } else {
            std::vector<bool> used(word.size(), false);
            out.table.values[word] = pairing_sum(two_point, word, used, 0);
        }
    }
    return out;
}

void save_moment_table(std::ostream& out, const MomentTable& table) {
    const int p = table.num_points();
    const int d = static_cast<int>(table.points.cols());
    out << "moment-table " << table.max_order << " " << p << " " << d << "\n";
    char buf[64];
    for (int i = 0; i < p; ++i) {
        for (int a = 0; a < d; ++a) {
            std::snprintf(buf, sizeof(buf), "%.17g", table.points(i, a));
            out << (a ? " " : "") << buf;
        }
        out << "\n";
    }
    for (const auto& [word, v] : table.values) {
        for (int i : word) out << i << " ";
        std::snprintf(buf, sizeof(buf), "%.17g", v.real());
        out << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", v.imag());
        out << " " << buf << "\n";
    }
}

MomentTable load_moment_table(std::istream& in) {
    std::string tag;
    MomentTable table;
    int p = 0, d = 0;
    if (!(in >> tag) || tag != "moment-table")
        throw std::runtime_error("load_moment_table: bad header tag");
    if (!(in >> table.max_order >> p >> d) || table.max_order < 0 || p <= 0 || d <= 0)
        throw std::runtime_error("load_moment_table: bad header");
    table.points.resize(p, d);
    for (int i = 0; i < p; ++i)
        for (int a = 0; a < d; ++a)
            if (!(in >> table.points(i, a)))
                throw std::runtime_error("load_moment_table: truncated point list");
    in >> std::ws;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::vector<double> nums;
        double x;
        while (row >> x) nums.push_back(x);
        if (!row.eof() || nums.size() < 2)
            throw std::runtime_error("load_moment_table: bad entry line");
        std::vector<int> word;
        for (std::size_t i = 0; i + 2 < nums.size(); ++i) {
            const int idx = static_cast<int>(nums[i]);
            if (nums[i] != idx || idx < 0 || idx >= p)
                throw std::runtime_error("load_moment_table: bad point index");
            word.push_back(idx);
        }
        if (table.values.count(word))
            throw std::runtime_error("load_moment_table: duplicate word");
        table.values[word] = Complex(nums[nums.size() - 2], nums[nums.size() - 1]);
    }
    return table;
}

}  // namespace opfield::gns
