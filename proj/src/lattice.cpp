#include "cheblat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace cheblat {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Cartesian: return "cartesian";
        case Family::Padua: return "padua";
        case Family::Hex: return "hex";
        case Family::BCC: return "bcc";
        case Family::FCC: return "fcc";
        case Family::CompositeOct7: return "oct7";
    }
    return "?";
}

Family family_from_string(std::string_view name) {
    if (name == "cartesian") return Family::Cartesian;
    if (name == "padua") return Family::Padua;
    if (name == "hex") return Family::Hex;
    if (name == "bcc") return Family::BCC;
    if (name == "fcc") return Family::FCC;
    if (name == "oct7") return Family::CompositeOct7;
    throw std::invalid_argument("unknown lattice family '" + std::string(name) + "'");
}

bool is_bravais(Family f) { return f != Family::CompositeOct7; }

// ---------------------------------------------------------------------------

MultiIndex::MultiIndex(std::initializer_list<int> v) : dim(static_cast<int>(v.size())) {
    if (v.size() > 3) throw std::invalid_argument("MultiIndex supports at most 3 axes");
    std::copy(v.begin(), v.end(), k.begin());
}

MultiIndex MultiIndex::zero(int d) {
    MultiIndex m;
    m.dim = d;
    return m;
}

std::int64_t MultiIndex::norm2() const {
    std::int64_t s = 0;
    for (int i = 0; i < dim; ++i) s += static_cast<std::int64_t>(k[i]) * k[i];
    return s;
}

double MultiIndex::norm() const { return std::sqrt(static_cast<double>(norm2())); }

bool operator<(const MultiIndex& a, const MultiIndex& b) {
    const auto na = a.norm2(), nb = b.norm2();
    if (na != nb) return na < nb;
    return a.k < b.k;
}

static std::int64_t pack(const MultiIndex& m) {
    return static_cast<std::int64_t>(m.k[0]) | (static_cast<std::int64_t>(m.k[1]) << 21) |
           (static_cast<std::int64_t>(m.k[2]) << 42);
}

// ---------------------------------------------------------------------------

std::int64_t ReciprocalBasis::det() const {
    const auto& q = Q;
    if (dim == 2) return q[0][0] * q[1][1] - q[0][1] * q[1][0];
    return q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) -
           q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
           q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
}

std::array<std::array<std::int64_t, 3>, 3> ReciprocalBasis::adjugate() const {
    std::array<std::array<std::int64_t, 3>, 3> a{};
    const auto& q = Q;
    if (dim == 2) {
        a[0][0] = q[1][1];
        a[0][1] = -q[0][1];
        a[1][0] = -q[1][0];
        a[1][1] = q[0][0];
        return a;
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // cofactor of (j, i)
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            a[i][j] = q[r0][c0] * q[r1][c1] - q[r0][c1] * q[r1][c0];
        }
    }
    return a;
}

std::array<std::array<double, 3>, 3> ReciprocalBasis::real_space() const {
    const auto adj = adjugate();
    const double s = 2.0 * std::numbers::pi / static_cast<double>(det());
    std::array<std::array<double, 3>, 3> P{};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) P[i][j] = s * static_cast<double>(adj[j][i]);
    return P;
}

bool ReciprocalBasis::exact_duality() const {
    const auto adj = adjugate();
    const auto D = det();
    if (D == 0) return false;
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            std::int64_t s = 0;
            for (int l = 0; l < dim; ++l) s += Q[i][l] * adj[l][j];
            if (s != (i == j ? D : 0)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------

std::vector<int> CartesianSublattice::counts() const {
    std::vector<int> c(dim);
    for (int a = 0; a < dim; ++a) c[a] = count(a);
    return c;
}

std::vector<BoundaryType> CartesianSublattice::boundaries() const {
    std::vector<BoundaryType> b(dim);
    for (int a = 0; a < dim; ++a) b[a] = boundary(a);
    return b;
}

std::size_t CartesianSublattice::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(count(a));
    return s;
}

// ---------------------------------------------------------------------------

namespace {

struct Folded {
    int kappa;
    int sign;
};

// cos(k theta) on the grid theta = 2 pi (z + s/2) / N equals sign * cos(kappa theta).
Folded fold(int k, int N, int s) {
    const int r = k % N, q = k / N;
    if (2 * r <= N) return {r, (s && (q & 1)) ? -1 : 1};
    return {N - r, (s && ((q + 1) & 1)) ? -1 : 1};
}

std::size_t flat_offset(const CartesianSublattice& sub, const std::array<int, 3>& kap) {
    std::size_t off = 0;
    for (int a = 0; a < sub.dim; ++a) off = off * static_cast<std::size_t>(sub.count(a)) + kap[a];
    return off;
}

std::array<int, 3> unflatten(const CartesianSublattice& sub, std::size_t off) {
    std::array<int, 3> kap{};
    for (int a = sub.dim - 1; a >= 0; --a) {
        const auto n = static_cast<std::size_t>(sub.count(a));
        kap[a] = static_cast<int>(off % n);
        off /= n;
    }
    return kap;
}

// Incremental orthogonalization used for rank tests on small integer columns.
class RankTracker {
public:
    explicit RankTracker(std::size_t m) : m_(m) {}
    std::size_t rank() const { return basis_.size(); }

    bool independent(const std::vector<double>& c) const {
        auto r = residual(c);
        double nr = 0, nc = 0;
        for (std::size_t i = 0; i < m_; ++i) {
            nr += r[i] * r[i];
            nc += c[i] * c[i];
        }
        return nc > 0 && nr > 1e-18 * std::max(1.0, nc) && std::sqrt(nr) > 1e-9;
    }

    bool add(const std::vector<double>& c) {
        if (!independent(c)) return false;
        auto r = residual(c);
        double nr = 0;
        for (double x : r) nr += x * x;
        nr = std::sqrt(nr);
        for (double& x : r) x /= nr;
        basis_.push_back(std::move(r));
        return true;
    }

private:
    std::vector<double> residual(const std::vector<double>& c) const {
        std::vector<double> r = c;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis_) {
                double d = 0;
                for (std::size_t i = 0; i < m_; ++i) d += q[i] * r[i];
                for (std::size_t i = 0; i < m_; ++i) r[i] -= d * q[i];
            }
        }
        return r;
    }

    std::size_t m_;
    std::vector<std::vector<double>> basis_;
};

bool same_column(const std::vector<double>& a, const std::vector<double>& b, int sign) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - sign * b[i]) > 1e-12) return false;
    return true;
}

bool is_zero(const std::vector<double>& c) {
    return std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; });
}

}  // namespace

void ChebyshevLattice::generate_points() {
    sub_begin_.clear();
    points_.clear();
    thetas_.clear();
    std::set<std::array<std::int64_t, 6>> seen;
    for (const auto& sub : subs_) {
        sub_begin_.push_back(points_.size());
        std::vector<Grid1D> grids;
        for (int a = 0; a < dim_; ++a) grids.push_back(nodes_1d(sub.count(a), sub.boundary(a)));
        const std::size_t total = sub.size();
        for (std::size_t off = 0; off < total; ++off) {
            const auto z = unflatten(sub, off);
            Point x{}, t{};
            std::array<std::int64_t, 6> key{};
            for (int a = 0; a < dim_; ++a) {
                x[a] = grids[a].xs[z[a]];
                t[a] = grids[a].thetas[z[a]];
                // theta / pi = (2z + s) / N as a reduced fraction
                std::int64_t num = 2 * z[a] + sub.shifts[a], den = sub.periods[a];
                const auto g = std::gcd(num, den);
                key[2 * a] = num / g;
                key[2 * a + 1] = den / g;
            }
            if (!seen.insert(key).second) {
                throw std::runtime_error("lattice construction produced a duplicate point");
            }
            points_.push_back(x);
            thetas_.push_back(t);
        }
    }
}

void ChebyshevLattice::generate_basis() {
    const int d = dim_;
    modulus_ = {0, 0, 0};
    for (const auto& sub : subs_)
        for (int a = 0; a < d; ++a) modulus_[a] = std::gcd(modulus_[a], sub.periods[a]);

    // Group every (sublattice, DCT mode) equation by its residue class.
    std::map<std::array<int, 3>, std::size_t> class_id;
    classes_.clear();
    class_lookup_.clear();
    eq_row_.assign(subs_.size(), {});
    for (std::size_t j = 0; j < subs_.size(); ++j) {
        const auto& sub = subs_[j];
        const std::size_t total = sub.size();
        eq_row_[j].resize(total);
        for (std::size_t off = 0; off < total; ++off) {
            const auto kap = unflatten(sub, off);
            std::array<int, 3> key{};
            for (int a = 0; a < d; ++a) key[a] = fold(kap[a], modulus_[a], 0).kappa;
            auto [it, fresh] = class_id.try_emplace(key, classes_.size());
            if (fresh) {
                AliasClass c;
                c.key = MultiIndex::zero(d);
                c.key.k = key;
                class_lookup_[pack(c.key)] = classes_.size();
                classes_.push_back(std::move(c));
            }
            auto& c = classes_[it->second];
            eq_row_[j][off] = {static_cast<std::uint32_t>(it->second),
                               static_cast<std::uint32_t>(c.eq_sublattice.size())};
            c.eq_sublattice.push_back(static_cast<int>(j));
            c.eq_offset.push_back(off);
        }
    }

    struct Element {
        std::vector<MultiIndex> members;
        std::vector<int> signs;
        std::vector<double> column;
        std::size_t cls;
    };
    std::vector<Element> elements;
    partial_ties_ = 0;

    std::vector<double> col;
    for (std::size_t ci = 0; ci < classes_.size(); ++ci) {
        const auto& cls = classes_[ci];
        const std::size_t m = cls.eq_sublattice.size();
        bool done = false;
        for (int Q = 2; Q <= 64 && !done; Q *= 2) {
            // Candidate frequencies folding onto this class.
            std::array<std::vector<int>, 3> per;
            for (int a = 0; a < d; ++a) {
                std::set<int> vals;
                for (int q = 0; q < Q; ++q) {
                    const int v1 = cls.key[a] + q * modulus_[a];
                    const int v2 = q * modulus_[a] - cls.key[a];
                    vals.insert(v1);
                    if (v2 >= 0) vals.insert(v2);
                }
                per[a].assign(vals.begin(), vals.end());
            }
            std::vector<MultiIndex> cands;
            MultiIndex cur = MultiIndex::zero(d);
            const auto recurse = [&](auto&& self, int a) -> void {
                if (a == d) {
                    cands.push_back(cur);
                    return;
                }
                for (int v : per[a]) {
                    cur.k[a] = v;
                    self(self, a + 1);
                }
            };
            recurse(recurse, 0);
            std::sort(cands.begin(), cands.end());

            std::int64_t bound = INT64_MAX;
            for (int a = 0; a < d; ++a) {
                const std::int64_t v = static_cast<std::int64_t>(Q) * modulus_[a] - cls.key[a];
                bound = std::min(bound, v * v);
            }

            RankTracker rank(m);
            std::vector<Element> chosen;
            std::int64_t max_sel = 0;
            int partial = 0;
            std::size_t i = 0;
            while (i < cands.size() && rank.rank() < m) {
                const auto n2 = cands[i].norm2();
                std::vector<Element> group;
                for (; i < cands.size() && cands[i].norm2() == n2; ++i) {
                    if (!response(cands[i], col)) continue;
                    if (is_zero(col)) continue;
                    bool merged = false;
                    for (auto& g : group) {
                        for (int s : {1, -1}) {
                            if (same_column(g.column, col, s)) {
                                g.members.push_back(cands[i]);
                                g.signs.push_back(s);
                                merged = true;
                                break;
                            }
                        }
                        if (merged) break;
                    }
                    if (!merged) group.push_back({{cands[i]}, {1}, col, ci});
                }
                if (group.empty()) continue;
                RankTracker trial = rank;
                std::size_t gained = 0;
                for (const auto& g : group)
                    if (trial.add(g.column)) ++gained;
                if (gained == 0) continue;
                if (gained == group.size()) {
                    for (auto& g : group) {
                        rank.add(g.column);
                        chosen.push_back(std::move(g));
                    }
                } else {
                    ++partial;
                    for (auto& g : group) {
                        if (rank.rank() < m && rank.add(g.column)) chosen.push_back(std::move(g));
                    }
                }
                max_sel = n2;
            }
            if (rank.rank() == m && max_sel < bound) {
                partial_ties_ += partial;
                for (auto& e : chosen) elements.push_back(std::move(e));
                done = true;
            }
        }
        if (!done) {
            throw std::runtime_error("lattice is not unisolvent: residue class (" +
                                     std::to_string(cls.key[0]) + "," + std::to_string(cls.key[1]) +
                                     (d == 3 ? "," + std::to_string(cls.key[2]) : "") +
                                     ") has no full-rank basis");
        }
    }

    std::sort(elements.begin(), elements.end(),
              [](const Element& a, const Element& b) { return a.members[0] < b.members[0]; });

    basis_.clear();
    ties_.clear();
    lookup_.clear();
    elem_class_.assign(elements.size(), {0, 0});
    for (auto& c : classes_) {
        c.elements.clear();
        c.response.assign(c.eq_sublattice.size() * c.eq_sublattice.size(), 0.0);
    }
    for (std::size_t b = 0; b < elements.size(); ++b) {
        auto& e = elements[b];
        BasisElement be;
        be.index = e.members[0];
        if (e.members.size() > 1) {
            be.tie = static_cast<int>(ties_.size());
            ties_.push_back({e.members, e.signs});
        }
        basis_.push_back(be);
        lookup_[pack(be.index)] = b;
        auto& c = classes_[e.cls];
        const std::size_t m = c.eq_sublattice.size();
        const std::size_t pos = c.elements.size();
        for (std::size_t r = 0; r < m; ++r) c.response[r * m + pos] = e.column[r];
        c.elements.push_back(b);
        elem_class_[b] = {e.cls, pos};
    }
    if (basis_.size() != points_.size()) {
        throw std::runtime_error("basis cardinality " + std::to_string(basis_.size()) +
                                 " does not match point count " + std::to_string(points_.size()));
    }
}

std::optional<std::size_t> ChebyshevLattice::response(const MultiIndex& k,
                                                      std::vector<double>& col) const {
    std::optional<std::size_t> cls;
    for (std::size_t j = 0; j < subs_.size(); ++j) {
        const auto& sub = subs_[j];
        std::array<int, 3> kap{};
        int sign = 1;
        bool inside = true;
        for (int a = 0; a < dim_; ++a) {
            const auto f = fold(k[a], sub.periods[a], sub.shifts[a]);
            if (f.kappa >= sub.count(a)) {
                inside = false;
                break;
            }
            kap[a] = f.kappa;
            sign *= f.sign;
        }
        if (!inside) continue;
        const auto [c, row] = eq_row_[j][flat_offset(sub, kap)];
        if (!cls) {
            cls = c;
            col.assign(classes_[c].eq_sublattice.size(), 0.0);
        }
        col[row] += sign;
    }
    if (!cls) {
        // Vanishes on every sublattice; report the residue class anyway.
        std::array<int, 3> key{};
        for (int a = 0; a < dim_; ++a) key[a] = fold(k[a], modulus_[a], 0).kappa;
        MultiIndex km = MultiIndex::zero(dim_);
        km.k = key;
        auto it = class_lookup_.find(pack(km));
        if (it != class_lookup_.end()) {
            col.assign(classes_[it->second].eq_sublattice.size(), 0.0);
            return it->second;
        }
    }
    return cls;
}

std::optional<std::size_t> ChebyshevLattice::find(const MultiIndex& k) const {
    if (k.dim != dim_) return std::nullopt;
    for (int a = 0; a < dim_; ++a)
        if (k[a] < 0 || k[a] >= (1 << 21)) return std::nullopt;
    auto it = lookup_.find(pack(k));
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
}

static double cos_product(const MultiIndex& k, const double* theta, int d) {
    double v = 1.0;
    for (int a = 0; a < d; ++a) v *= std::cos(k[a] * theta[a]);
    return v;
}

double ChebyshevLattice::basis_value(std::size_t b, const double* theta) const {
    const auto& e = basis_[b];
    if (e.tie < 0) return cos_product(e.index, theta, dim_);
    const auto& t = ties_[e.tie];
    double s = 0;
    for (std::size_t i = 0; i < t.members.size(); ++i)
        s += t.signs[i] * cos_product(t.members[i], theta, dim_);
    return s / static_cast<double>(t.members.size());
}

// ---------------------------------------------------------------------------

ChebyshevLattice build_custom(Family family, int dim, int resolution,
                              std::vector<CartesianSublattice> subs, ReciprocalBasis recip,
                              int order, std::vector<Point> cell_offsets) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
    if (subs.empty()) throw std::invalid_argument("lattice needs at least one sublattice");
    for (const auto& s : subs) {
        if (s.dim != dim) throw std::invalid_argument("sublattice dimension mismatch");
        for (int a = 0; a < dim; ++a) {
            if (s.periods[a] < 1 || (s.shifts[a] != 0 && s.shifts[a] != 1)) {
                throw std::invalid_argument("invalid sublattice period or shift");
            }
            if (s.boundary(a) == BoundaryType::TypeI && s.count(a) < 2) {
                throw std::invalid_argument("type-I axis needs at least two nodes");
            }
        }
    }
    ChebyshevLattice lat;
    lat.family_ = family;
    lat.dim_ = dim;
    lat.resolution_ = resolution;
    lat.subs_ = std::move(subs);
    lat.recip_ = recip;
    lat.order_ = order;
    lat.cell_offsets_ = std::move(cell_offsets);
    lat.generate_points();
    lat.generate_basis();
    return lat;
}

namespace {

CartesianSublattice grid(std::initializer_list<std::pair<int, int>> axes) {
    CartesianSublattice s;
    s.dim = static_cast<int>(axes.size());
    int a = 0;
    for (auto [N, sh] : axes) {
        s.periods[a] = N;
        s.shifts[a] = sh;
        ++a;
    }
    return s;
}

ReciprocalBasis recip2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, int scale) {
    ReciprocalBasis r;
    r.dim = 2;
    r.scale = scale;
    r.Q[0] = {a, b, 0};
    r.Q[1] = {c, d, 0};
    return r;
}

ReciprocalBasis recip3(const int (&rows)[3][3], std::int64_t mult, int scale) {
    ReciprocalBasis r;
    r.dim = 3;
    r.scale = scale;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.Q[i][j] = mult * rows[i][j];
    return r;
}

}  // namespace

ChebyshevLattice build(Family family, int dim, int resolution) {
    if (resolution < 1) {
        throw std::invalid_argument("resolution must be at least 1 (got " +
                                    std::to_string(resolution) + ")");
    }
    const int r = resolution;
    switch (family) {
        case Family::Cartesian: {
            if (dim != 2 && dim != 3) throw std::invalid_argument("cartesian lattices need dim 2 or 3");
            std::vector<int> counts(dim, r + 1);
            return build_cartesian(counts);
        }
        case Family::Hex: {
            if (dim != 2) throw std::invalid_argument("hex lattice is two-dimensional");
            const int n = r;
            return build_custom(family, 2, r,
                                {grid({{4 * n, 0}, {7 * n, 0}}), grid({{4 * n, 1}, {7 * n, 1}})},
                                recip2(8 * n, 0, 4 * n, 7 * n, n), 1);
        }
        case Family::Padua: {
            if (dim != 2) throw std::invalid_argument("padua lattice is two-dimensional");
            const int n = r;
            // Axis 0 always carries the even period so only axis 1 needs type V grids.
            const int N0 = (n % 2 == 0) ? n : n + 1;
            const int N1 = (n % 2 == 0) ? n + 1 : n;
            return build_custom(family, 2, r, {grid({{N0, 0}, {N1, 0}}), grid({{N0, 1}, {N1, 1}})},
                                recip2(N0, N1, N0, -N1, n), 1);
        }
        case Family::BCC: {
            if (dim != 3) throw std::invalid_argument("bcc lattice is three-dimensional");
            const int N = 2 * r;
            static const int rows[3][3] = {{1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
            return build_custom(family, 3, r,
                                {grid({{N, 0}, {N, 0}, {N, 0}}), grid({{N, 1}, {N, 1}, {N, 1}})},
                                recip3(rows, N, r), 1);
        }
        case Family::FCC: {
            if (dim != 3) throw std::invalid_argument("fcc lattice is three-dimensional");
            const int N = 2 * r;
            static const int rows[3][3] = {{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
            return build_custom(family, 3, r,
                                {grid({{N, 0}, {N, 0}, {N, 0}}), grid({{N, 1}, {N, 1}, {N, 0}}),
                                 grid({{N, 1}, {N, 0}, {N, 1}}), grid({{N, 0}, {N, 1}, {N, 1}})},
                                recip3(rows, N, r), 1);
        }
        case Family::CompositeOct7: {
            if (dim != 2) throw std::invalid_argument("oct7 lattice is two-dimensional");
            const int N = 2 * r;
            std::vector<Point> cell = {{0.5, 0, 0},   {0, 0.5, 0},    {0.5, 0.5, 0},
                                       {0.25, 0.25, 0}, {0.75, 0.25, 0}, {0.25, 0.75, 0},
                                       {0.75, 0.75, 0}};
            return build_custom(family, 2, r,
                                {grid({{N, 1}, {N, 0}}), grid({{N, 0}, {N, 1}}),
                                 grid({{N, 1}, {N, 1}}), grid({{2 * N, 1}, {2 * N, 1}})},
                                recip2(N, 0, 0, N, r), 7, std::move(cell));
        }
    }
    throw std::invalid_argument("unknown family");
}

ChebyshevLattice build_cartesian(std::span<const int> counts) {
    const int d = static_cast<int>(counts.size());
    if (d != 2 && d != 3) throw std::invalid_argument("cartesian lattices need dim 2 or 3");
    CartesianSublattice s;
    s.dim = d;
    ReciprocalBasis rb;
    rb.dim = d;
    int res = 0;
    for (int a = 0; a < d; ++a) {
        if (counts[a] < 2) throw std::invalid_argument("cartesian axes need at least 2 nodes");
        s.periods[a] = 2 * (counts[a] - 1);
        rb.Q[a][a] = s.periods[a];
        res = std::max(res, counts[a] - 1);
    }
    rb.scale = res;
    return build_custom(Family::Cartesian, d, res, {s}, rb, 1);
}

const ReciprocalBasis& reciprocal_basis(const ChebyshevLattice& lat) { return lat.reciprocal(); }

std::vector<MultiIndex> basis_indices(const ChebyshevLattice& lat) {
    std::vector<MultiIndex> out;
    out.reserve(lat.basis().size());
    for (const auto& e : lat.basis()) out.push_back(e.index);
    return out;
}

std::vector<CartesianSublattice> decompose(const ChebyshevLattice& lat) { return lat.sublattices(); }

}  // namespace cheblat
