#include "opfield/qcd.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opfield::qcd {

namespace {

constexpr Complex kImag{0.0, 1.0};

void require_index(int v, int bound, const char* who) {
    if (v < 0 || v >= bound)
        throw std::invalid_argument(std::string(who) + ": index out of range");
}

void require_shape(const QcdFieldSet& fields, const char* who) {
    if (!fields.grid) throw std::invalid_argument(std::string(who) + ": null grid");
    if (fields.grid->dim != 4)
        throw std::invalid_argument(std::string(who) + ": grid must be four-dimensional");
    if (fields.colors < 2)
        throw std::invalid_argument(std::string(who) + ": need at least two colors");
    const std::size_t nq = static_cast<std::size_t>(fields.colors) * 4;
    const std::size_t ng = static_cast<std::size_t>(fields.colors * fields.colors - 1) * 4;
    if (fields.quarks.size() != nq || fields.gluons.size() != ng)
        throw std::invalid_argument(std::string(who) + ": component count does not match colors");
    for (const auto* block : {&fields.quarks, &fields.gluons})
        for (const FieldOperator& op : *block) {
            if (!op.grid || !same_grid(*op.grid, *fields.grid))
                throw GridMismatchError(std::string(who) + ": component lives on a different grid");
            if (op.vac_vac != Complex(0.0))
                throw std::invalid_argument(std::string(who) +
                                            ": field vacuum-vacuum entry must be zero");
        }
}

void require_gauge(const QcdFieldSet& fields, const GaugeData& gauge, const char* who) {
    require_shape(fields, who);
    if (gauge.colors != fields.colors)
        throw std::invalid_argument(std::string(who) +
                                    ": gauge data and field set disagree on color count");
    if (static_cast<int>(gauge.generators.size()) != gauge.adjoint_dim() ||
        gauge.gamma.size() != 4)
        throw std::invalid_argument(std::string(who) + ": malformed gauge data");
}

}  // namespace

double GaugeData::f(int a, int b, int c) const {
    const int adim = adjoint_dim();
    require_index(a, adim, "GaugeData::f");
    require_index(b, adim, "GaugeData::f");
    require_index(c, adim, "GaugeData::f");
    return structure[(static_cast<std::size_t>(a) * adim + b) * adim + c];
}

GaugeData build_gauge(int colors, double coupling, double quark_mass) {
    if (colors < 2) throw std::invalid_argument("build_gauge: need at least two colors");
    GaugeData g;
    g.colors = colors;
    g.coupling = coupling;
    g.quark_mass = quark_mass;

    for (int k = 1; k < colors; ++k) {
        for (int j = 0; j < k; ++j) {
            CMatrix sym = CMatrix::Zero(colors, colors);
            sym(j, k) = 0.5;
            sym(k, j) = 0.5;
            g.generators.push_back(std::move(sym));
            CMatrix asym = CMatrix::Zero(colors, colors);
            asym(j, k) = Complex(0.0, -0.5);
            asym(k, j) = Complex(0.0, 0.5);
            g.generators.push_back(std::move(asym));
        }
        CMatrix diag = CMatrix::Zero(colors, colors);
        const double scale = std::sqrt(1.0 / (2.0 * k * (k + 1.0)));
        for (int j = 0; j < k; ++j) diag(j, j) = scale;
        diag(k, k) = -scale * k;
        g.generators.push_back(std::move(diag));
    }

    const int adim = g.adjoint_dim();
    g.structure.assign(static_cast<std::size_t>(adim) * adim * adim, 0.0);
    for (int a = 0; a < adim; ++a)
        for (int b = 0; b < adim; ++b) {
            const CMatrix comm =
                g.generators[a] * g.generators[b] - g.generators[b] * g.generators[a];
            for (int c = 0; c < adim; ++c) {
                const Complex tr = (comm * g.generators[c]).trace();
                g.structure[(static_cast<std::size_t>(a) * adim + b) * adim + c] =
                    (-2.0 * kImag * tr).real();
            }
        }

    g.gamma.assign(4, CMatrix::Zero(4, 4));
    g.gamma[0](0, 0) = 1.0;
    g.gamma[0](1, 1) = 1.0;
    g.gamma[0](2, 2) = -1.0;
    g.gamma[0](3, 3) = -1.0;
    CMatrix sigma1 = CMatrix::Zero(2, 2), sigma2 = CMatrix::Zero(2, 2),
            sigma3 = CMatrix::Zero(2, 2);
    sigma1(0, 1) = 1.0;
    sigma1(1, 0) = 1.0;
    sigma2(0, 1) = Complex(0.0, -1.0);
    sigma2(1, 0) = Complex(0.0, 1.0);
    sigma3(0, 0) = 1.0;
    sigma3(1, 1) = -1.0;
    const CMatrix* sigma[3] = {&sigma1, &sigma2, &sigma3};
    for (int i = 0; i < 3; ++i) {
        g.gamma[1 + i].block(0, 2, 2, 2) = *sigma[i];
        g.gamma[1 + i].block(2, 0, 2, 2) = -*sigma[i];
    }
    return g;
}

QcdFieldSet::QcdFieldSet(GridPtr g, int n_colors) : grid(std::move(g)), colors(n_colors) {
    if (!grid) throw std::invalid_argument("QcdFieldSet: null grid");
    if (grid->dim != 4)
        throw std::invalid_argument("QcdFieldSet: grid must be four-dimensional");
    if (colors < 2) throw std::invalid_argument("QcdFieldSet: need at least two colors");
    quarks.assign(static_cast<std::size_t>(colors) * 4, FieldOperator(grid));
    gluons.assign(static_cast<std::size_t>(colors * colors - 1) * 4, FieldOperator(grid));
}

FieldOperator& QcdFieldSet::quark(int k, int i) {
    require_index(k, colors, "QcdFieldSet::quark");
    require_index(i, 4, "QcdFieldSet::quark");
    return quarks[static_cast<std::size_t>(k) * 4 + i];
}

const FieldOperator& QcdFieldSet::quark(int k, int i) const {
    require_index(k, colors, "QcdFieldSet::quark");
    require_index(i, 4, "QcdFieldSet::quark");
    return quarks[static_cast<std::size_t>(k) * 4 + i];
}

FieldOperator& QcdFieldSet::gluon(int a, int mu) {
    require_index(a, colors * colors - 1, "QcdFieldSet::gluon");
    require_index(mu, 4, "QcdFieldSet::gluon");
    return gluons[static_cast<std::size_t>(a) * 4 + mu];
}

const FieldOperator& QcdFieldSet::gluon(int a, int mu) const {
    require_index(a, colors * colors - 1, "QcdFieldSet::gluon");
    require_index(mu, 4, "QcdFieldSet::gluon");
    return gluons[static_cast<std::size_t>(a) * 4 + mu];
}

double ResidualSet::max_norm() const {
    double m = 0.0;
    for (double n : norms) m = std::max(m, n);
    return m;
}

ResidualSet quark_residual(const QcdFieldSet& fields, const GaugeData& gauge) {
    require_gauge(fields, gauge, "quark_residual");
    const int nc = fields.colors;
    const int adim = gauge.adjoint_dim();
    const double gs = gauge.coupling;
    const FieldOperator pi_op = fields.projector.as_operator(fields.grid);

    // G^a_mu psi^{k'}_{i'} with its vacuum subtraction, reused across (k, i).
    std::vector<FieldOperator> coupled;
    if (gs != 0.0) {
        coupled.reserve(static_cast<std::size_t>(adim) * 4 * nc * 4);
        for (int a = 0; a < adim; ++a)
            for (int mu = 0; mu < 4; ++mu)
                for (int k2 = 0; k2 < nc; ++k2)
                    for (int i2 = 0; i2 < 4; ++i2) {
                        FieldOperator p = compose(fields.gluon(a, mu), fields.quark(k2, i2));
                        p -= vacuum_expectation(p) * pi_op;
                        coupled.push_back(std::move(p));
                    }
    }

    ResidualSet out;
    out.components.reserve(static_cast<std::size_t>(nc) * 4);
    for (int k = 0; k < nc; ++k)
        for (int i = 0; i < 4; ++i) {
            FieldOperator r(fields.grid);
            for (int mu = 0; mu < 4; ++mu)
                for (int i2 = 0; i2 < 4; ++i2) {
                    const Complex gc = gauge.gamma[mu](i, i2);
                    if (gc == Complex(0.0)) continue;
                    r += gc * commutator_with_generator(fields.quark(k, i2), mu);
                }
            r += Complex(gauge.quark_mass) * fields.quark(k, i);
            if (gs != 0.0)
                for (int mu = 0; mu < 4; ++mu)
                    for (int i2 = 0; i2 < 4; ++i2) {
                        const Complex gc = gauge.gamma[mu](i, i2);
                        if (gc == Complex(0.0)) continue;
                        for (int a = 0; a < adim; ++a)
                            for (int k2 = 0; k2 < nc; ++k2) {
                                const Complex coef = gs * gc * gauge.generators[a](k, k2);
                                if (coef == Complex(0.0)) continue;
                                r += coef *
                                     coupled[((static_cast<std::size_t>(a) * 4 + mu) * nc + k2) *
                                                 4 +
                                             i2];
                            }
                    }
            out.components.push_back(std::move(r));
        }
    for (const FieldOperator& r : out.components) out.norms.push_back(operator_norm(r));
    return out;
}

ResidualSet gluon_residual(const QcdFieldSet& fields, const GaugeData& gauge) {
    require_gauge(fields, gauge, "gluon_residual");
    const int adim = gauge.adjoint_dim();
    const int nc = fields.colors;
    const double gs = gauge.coupling;
    const Signature sig = Signature::minkowski(4);
    const FieldOperator pi_op = fields.projector.as_operator(fields.grid);
    const int ng = adim * 4;

    // Pairwise gluon products, [P_mu, G] commutators and daggered-quark
    // bilinear products, precomputed once.
    std::vector<FieldOperator> gpair, dgluon, psi_pair;
    if (gs != 0.0) {
        gpair.reserve(static_cast<std::size_t>(ng) * ng);
        for (int x = 0; x < ng; ++x)
            for (int y = 0; y < ng; ++y)
                gpair.push_back(compose(fields.gluons[x], fields.gluons[y]));
        dgluon.reserve(static_cast<std::size_t>(ng) * 4);
        for (int x = 0; x < ng; ++x)
            for (int mu = 0; mu < 4; ++mu)
                dgluon.push_back(commutator_with_generator(fields.gluons[x], mu));
        const int nq = nc * 4;
        psi_pair.reserve(static_cast<std::size_t>(nq) * nq);
        for (int x = 0; x < nq; ++x) {
            const FieldOperator dag = adjoint(fields.quarks[x]);
            for (int y = 0; y < nq; ++y) psi_pair.push_back(compose(dag, fields.quarks[y]));
        }
    }
    const auto gslot = [](int a, int mu) { return a * 4 + mu; };

    ResidualSet out;
    out.components.reserve(static_cast<std::size_t>(ng));
    for (int a = 0; a < adim; ++a)
        for (int mu = 0; mu < 4; ++mu) {
            FieldOperator r(fields.grid);
            for (int nu = 0; nu < 4; ++nu)
                r += Complex(sig(nu)) *
                     commutator_with_generator(
                         commutator_with_generator(fields.gluon(a, mu), nu), nu);
            FieldOperator divergence(fields.grid);
            for (int nu = 0; nu < 4; ++nu)
                divergence +=
                    Complex(sig(nu)) * commutator_with_generator(fields.gluon(a, nu), nu);
            r -= commutator_with_generator(divergence, mu);

            if (gs != 0.0) {
                // The subtracted scalar is <0|block|0>: the full commutator
                // term has an exactly zero vacuum diagonal, so this equals the
                // printed <0|G^b_nu (P^nu G^c_mu + P_mu G^{c nu})|0>.
                FieldOperator cubic(fields.grid);
                for (int b = 0; b < adim; ++b)
                    for (int c = 0; c < adim; ++c) {
                        const double fab = gauge.f(a, b, c);
                        if (fab == 0.0) continue;
                        for (int nu = 0; nu < 4; ++nu) {
                            const Complex cw(sig(nu) * fab);
                            const FieldOperator& bnu = fields.gluon(b, nu);
                            cubic += cw * commutator_with_generator(
                                              gpair[static_cast<std::size_t>(gslot(b, nu)) * ng +
                                                    gslot(c, mu)],
                                              nu);
                            cubic += cw * compose(bnu, dgluon[static_cast<std::size_t>(
                                                                  gslot(c, mu)) *
                                                                  4 +
                                                              nu]);
                            cubic += cw * compose(bnu, dgluon[static_cast<std::size_t>(
                                                                  gslot(c, nu)) *
                                                                  4 +
                                                              mu]);
                        }
                    }
                cubic -= vacuum_expectation(cubic) * pi_op;
                r -= (kImag * gs) * cubic;

                FieldOperator quartic(fields.grid);
                for (int b = 0; b < adim; ++b)
                    for (int d = 0; d < adim; ++d)
                        for (int e = 0; e < adim; ++e) {
                            double ff = 0.0;
                            for (int c = 0; c < adim; ++c) ff += gauge.f(a, b, c) * gauge.f(c, d, e);
                            if (ff == 0.0) continue;
                            for (int nu = 0; nu < 4; ++nu) {
                                const FieldOperator& bop = fields.gluon(b, nu);
                                const FieldOperator& dop = fields.gluon(d, nu);
                                const FieldOperator& eop = fields.gluon(e, mu);
                                const FieldOperator& bd =
                                    gpair[static_cast<std::size_t>(gslot(b, nu)) * ng +
                                          gslot(d, nu)];
                                const FieldOperator triple = compose(bd, eop);
                                FieldOperator bracket = triple;
                                bracket -= vacuum_expectation(
                                               gpair[static_cast<std::size_t>(gslot(d, nu)) * ng +
                                                     gslot(e, mu)]) *
                                           bop;
                                bracket -= vacuum_expectation(bd) * eop;
                                bracket -= vacuum_expectation(
                                               gpair[static_cast<std::size_t>(gslot(b, nu)) * ng +
                                                     gslot(e, mu)]) *
                                           dop;
                                bracket -= vacuum_expectation(triple) * pi_op;
                                quartic += Complex(sig(mu) * sig(nu) * ff) * bracket;
                            }
                        }
                r -= Complex(gs * gs) * quartic;

                FieldOperator bilinear(fields.grid);
                const CMatrix gzero_gmu = gauge.gamma[0] * gauge.gamma[mu];
                for (int k = 0; k < nc; ++k)
                    for (int k2 = 0; k2 < nc; ++k2) {
                        const Complex tc = gauge.generators[a](k, k2);
                        if (tc == Complex(0.0)) continue;
                        for (int i = 0; i < 4; ++i)
                            for (int i2 = 0; i2 < 4; ++i2) {
                                const Complex gc = gzero_gmu(i, i2);
                                if (gc == Complex(0.0)) continue;
                                bilinear +=
                                    (Complex(sig(mu)) * tc * gc) *
                                    psi_pair[static_cast<std::size_t>(k * 4 + i) * (nc * 4) +
                                             (k2 * 4 + i2)];
                            }
                    }
                bilinear -= vacuum_expectation(bilinear) * pi_op;
                r += Complex(gs) * bilinear;
            }
            out.components.push_back(std::move(r));
        }
    for (const FieldOperator& r : out.components) out.norms.push_back(operator_norm(r));
    return out;
}

std::filesystem::path save_field_set(const std::filesystem::path& dir, const std::string& stem,
                                     const QcdFieldSet& fields) {
    require_shape(fields, "save_field_set");
    std::filesystem::create_directories(dir);
    const std::filesystem::path manifest_path = dir / (stem + ".manifest");
    std::ofstream manifest(manifest_path);
    if (!manifest)
        throw std::runtime_error("save_field_set: cannot open " + manifest_path.string());
    manifest << "opfield-qcd-manifest " << fields.colors << "\n";

    const auto dump = [&](const char* kind, int major, int minor, const FieldOperator& op) {
        const std::string name = stem + "_" + kind + "_" + std::to_string(major) + "_" +
                                 std::to_string(minor) + ".op";
        std::ofstream body(dir / name);
        if (!body)
            throw std::runtime_error("save_field_set: cannot open " + (dir / name).string());
        save_operator(body, op);
        manifest << kind << ' ' << major << ' ' << minor << ' ' << name << "\n";
    };
    for (int k = 0; k < fields.colors; ++k)
        for (int i = 0; i < 4; ++i) dump("psi", k, i, fields.quark(k, i));
    const int adim = fields.colors * fields.colors - 1;
    for (int a = 0; a < adim; ++a)
        for (int mu = 0; mu < 4; ++mu) dump("g", a, mu, fields.gluon(a, mu));

    if (fields.projector.is_identity()) {
        manifest << "projector identity\n";
    } else {
        const std::string name = stem + "_projector.op";
        std::ofstream body(dir / name);
        if (!body)
            throw std::runtime_error("save_field_set: cannot open " + (dir / name).string());
        save_operator(body, fields.projector.as_operator(fields.grid));
        manifest << "projector explicit " << name << "\n";
    }
    return manifest_path;
}

QcdFieldSet load_field_set(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in)
        throw std::runtime_error("load_field_set: cannot open " + manifest_path.string());
    std::string tag;
    int colors = 0;
    if (!(in >> tag) || tag != "opfield-qcd-manifest")
        throw std::runtime_error("load_field_set: missing format tag");
    if (!(in >> colors) || colors < 2)
        throw std::runtime_error("load_field_set: invalid color count");
    const std::filesystem::path base = manifest_path.parent_path();

    struct Entry {
        bool is_quark = false;
        int major = 0;
        int minor = 0;
        std::string file;
    };
    std::vector<Entry> entries;
    bool have_projector = false;
    std::string projector_file;
    std::string kind;
    while (in >> kind) {
        if (kind == "psi" || kind == "g") {
            Entry e;
            e.is_quark = kind == "psi";
            if (!(in >> e.major >> e.minor >> e.file))
                throw std::runtime_error("load_field_set: malformed manifest entry");
            entries.push_back(std::move(e));
        } else if (kind == "projector") {
            std::string mode;
            if (!(in >> mode))
                throw std::runtime_error("load_field_set: malformed projector entry");
            if (mode == "explicit") {
                if (!(in >> projector_file))
                    throw std::runtime_error("load_field_set: malformed projector entry");
                have_projector = true;
            } else if (mode != "identity") {
                throw std::runtime_error("load_field_set: unknown projector mode '" + mode + "'");
            }
        } else {
            throw std::runtime_error("load_field_set: unknown manifest entry '" + kind + "'");
        }
    }

    const auto load_file = [&](const std::string& name) {
        std::ifstream body(base / name);
        if (!body)
            throw std::runtime_error("load_field_set: cannot open " + (base / name).string());
        return load_operator(body).op;
    };

    const int adim = colors * colors - 1;
    QcdFieldSet fields;
    std::vector<char> seen_quark(static_cast<std::size_t>(colors) * 4, 0);
    std::vector<char> seen_gluon(static_cast<std::size_t>(adim) * 4, 0);
    for (const Entry& e : entries) {
        FieldOperator op = load_file(e.file);
        if (!fields.grid) {
            if (op.grid->dim != 4)
                throw std::runtime_error("load_field_set: components must live on a "
                                         "four-dimensional grid");
            fields = QcdFieldSet(op.grid, colors);
        }
        if (!same_grid(*op.grid, *fields.grid))
            throw GridMismatchError("load_field_set: component '" + e.file +
                                    "' lives on a different grid");
        op.grid = fields.grid;
        const int bound = e.is_quark ? colors : adim;
        if (e.major < 0 || e.major >= bound || e.minor < 0 || e.minor >= 4)
            throw std::runtime_error("load_field_set: manifest index out of range");
        std::vector<char>& seen = e.is_quark ? seen_quark : seen_gluon;
        if (seen[static_cast<std::size_t>(e.major) * 4 + e.minor])
            throw std::runtime_error("load_field_set: duplicate manifest entry");
        seen[static_cast<std::size_t>(e.major) * 4 + e.minor] = 1;
        (e.is_quark ? fields.quark(e.major, e.minor) : fields.gluon(e.major, e.minor)) =
            std::move(op);
    }
    for (char s : seen_quark)
        if (!s) throw std::runtime_error("load_field_set: missing quark component");
    for (char s : seen_gluon)
        if (!s) throw std::runtime_error("load_field_set: missing gluon component");

    if (have_projector) {
        FieldOperator op = load_file(projector_file);
        if (!same_grid(*op.grid, *fields.grid))
            throw GridMismatchError("load_field_set: projector lives on a different grid");
        fields.projector = VacuumProjector::explicit_kernel(op.kernel);
    }
    require_shape(fields, "load_field_set");
    return fields;
}

}  // namespace opfield::qcd
