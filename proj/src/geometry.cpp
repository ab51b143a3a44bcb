#include "cheblat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace cheblat {

namespace {

using Vec = std::array<double, 3>;

double dot(const Vec& a, const Vec& b, int d) {
    double s = 0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

// Reciprocal lattice vectors with |l| <= radius, excluding 0, sorted by norm.
std::vector<std::array<std::int64_t, 3>> lattice_vectors(const ReciprocalBasis& rb, double radius) {
    const int d = rb.dim;
    const auto adj = rb.adjugate();
    const double det = static_cast<double>(rb.det());
    // c = l Q^{-1}; |c_i| <= |l| * |column i of Q^{-1}|
    std::array<int, 3> bound{};
    for (int i = 0; i < d; ++i) {
        double col = 0;
        for (int l = 0; l < d; ++l) col += static_cast<double>(adj[l][i]) * adj[l][i];
        bound[i] = static_cast<int>(std::ceil(radius * std::sqrt(col) / std::abs(det))) + 1;
    }
    std::vector<std::array<std::int64_t, 3>> out;
    const double r2 = radius * radius * (1 + 1e-12);
    std::array<int, 3> c{};
    const auto rec = [&](auto&& self, int a) -> void {
        if (a == d) {
            std::array<std::int64_t, 3> v{};
            bool nonzero = false;
            for (int i = 0; i < d; ++i) {
                if (c[i]) nonzero = true;
                for (int j = 0; j < d; ++j) v[j] += static_cast<std::int64_t>(c[i]) * rb.Q[i][j];
            }
            double n2 = 0;
            for (int j = 0; j < d; ++j) n2 += static_cast<double>(v[j]) * v[j];
            if (nonzero && n2 <= r2) out.push_back(v);
            return;
        }
        for (int x = -bound[a]; x <= bound[a]; ++x) {
            c[a] = x;
            self(self, a + 1);
        }
    };
    rec(rec, 0);
    const auto n2 = [d](const std::array<std::int64_t, 3>& v) {
        std::int64_t s = 0;
        for (int j = 0; j < d; ++j) s += v[j] * v[j];
        return s;
    };
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        const auto na = n2(a), nb = n2(b);
        return na != nb ? na < nb : a < b;
    });
    return out;
}

double shortest(const ReciprocalBasis& rb) {
    double best = INFINITY;
    for (int i = 0; i < rb.dim; ++i) {
        double s = 0;
        for (int j = 0; j < rb.dim; ++j) s += static_cast<double>(rb.Q[i][j]) * rb.Q[i][j];
        best = std::min(best, std::sqrt(s));
    }
    // Rows need not be reduced; search the short vectors.
    const auto v = lattice_vectors(rb, best);
    double m = best;
    for (const auto& x : v) {
        double s = 0;
        for (int j = 0; j < rb.dim; ++j) s += static_cast<double>(x[j]) * x[j];
        m = std::min(m, std::sqrt(s));
    }
    return m;
}

struct Plane {
    Vec n;
    double b;  // <x, n> = b
};

std::vector<Plane> bisectors(const std::vector<std::array<std::int64_t, 3>>& ls, int d) {
    std::vector<Plane> out;
    for (const auto& l : ls) {
        Plane p{};
        for (int j = 0; j < d; ++j) p.n[j] = static_cast<double>(l[j]);
        p.b = 0.5 * dot(p.n, p.n, d);
        out.push_back(p);
    }
    return out;
}

// Minimum-norm point on the intersection of the given hyperplanes.
bool min_norm_point(const std::vector<const Plane*>& ps, int d, Vec& x) {
    const std::size_t k = ps.size();
    double G[3][3] = {}, rhs[3] = {};
    for (std::size_t i = 0; i < k; ++i) {
        rhs[i] = ps[i]->b;
        for (std::size_t j = 0; j < k; ++j) G[i][j] = dot(ps[i]->n, ps[j]->n, d);
    }
    // Gaussian elimination on the k x k Gram system.
    double scale = 0;
    for (std::size_t i = 0; i < k; ++i) scale = std::max(scale, G[i][i]);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(G[r][c]) > std::abs(G[p][c])) p = r;
        if (std::abs(G[p][c]) < 1e-10 * scale) return false;
        for (std::size_t j = 0; j < k; ++j) std::swap(G[c][j], G[p][j]);
        std::swap(rhs[c], rhs[p]);
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = G[r][c] / G[c][c];
            for (std::size_t j = c; j < k; ++j) G[r][j] -= f * G[c][j];
            rhs[r] -= f * rhs[c];
        }
    }
    double mu[3] = {};
    for (std::size_t r = k; r-- > 0;) {
        double s = rhs[r];
        for (std::size_t j = r + 1; j < k; ++j) s -= G[r][j] * mu[j];
        mu[r] = s / G[r][r];
    }
    x = {0, 0, 0};
    for (std::size_t i = 0; i < k; ++i)
        for (int j = 0; j < d; ++j) x[j] += mu[i] * ps[i]->n[j];
    return true;
}

// Strictly violated and weakly violated bisector counts at x.
std::pair<int, int> violations(const std::vector<Plane>& ps, const Vec& x, int d) {
    int strict = 0, weak = 0;
    for (const auto& p : ps) {
        const double v = dot(x, p.n, d) - p.b;
        const double tol = 1e-9 * p.b;
        if (v > tol) ++strict;
        if (v >= -tol) ++weak;
    }
    return {strict, weak};
}

template <class F>
void for_each_subset(std::size_t n, int maxk, F&& f) {
    std::vector<std::size_t> idx;
    const auto rec = [&](auto&& self, std::size_t start) -> void {
        if (!idx.empty()) f(idx);
        if (static_cast<int>(idx.size()) == maxk) return;
        for (std::size_t i = start; i < n; ++i) {
            idx.push_back(i);
            self(self, i + 1);
            idx.pop_back();
        }
    };
    rec(rec, 0);
}

// Vertices of the union of the first m zones: intersection points of d
// bisectors that lie in its closure.
std::vector<Vec> zone_vertices(const ReciprocalBasis& rb, int m) {
    const int d = rb.dim;
    const double lmin = shortest(rb);
    const auto ls = lattice_vectors(rb, std::max(m, 2) * lmin);
    const auto ps = bisectors(ls, d);
    std::vector<Vec> out;
    std::vector<const Plane*> sel;
    for_each_subset(ps.size(), d, [&](const std::vector<std::size_t>& idx) {
        if (static_cast<int>(idx.size()) != d) return;
        sel.clear();
        for (auto i : idx) sel.push_back(&ps[i]);
        Vec x;
        if (!min_norm_point(sel, d, x)) return;
        if (violations(ps, x, d).first <= m - 1) out.push_back(x);
    });
    return out;
}

}  // namespace

double ball_volume(int dim, double r) {
    if (dim == 1) return 2 * r;
    if (dim == 2) return std::numbers::pi * r * r;
    if (dim == 3) return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    throw std::invalid_argument("ball_volume: unsupported dimension");
}

double brillouin_inradius(const ReciprocalBasis& rb, int m) {
    if (m < 1) throw std::invalid_argument("brillouin order must be at least 1");
    const int d = rb.dim;
    const double lmin = shortest(rb);
    if (m == 1) return 0.5 * lmin;
    // The union lies inside the ball of radius m |l_min| / 2, so only
    // bisectors of vectors up to m |l_min| can bound it.
    const auto ls = lattice_vectors(rb, m * lmin);
    const auto ps = bisectors(ls, d);
    double best = INFINITY;
    std::vector<const Plane*> sel;
    for_each_subset(ps.size(), d, [&](const std::vector<std::size_t>& idx) {
        sel.clear();
        for (auto i : idx) sel.push_back(&ps[i]);
        Vec x;
        if (!min_norm_point(sel, d, x)) return;
        const double r = std::sqrt(dot(x, x, d));
        if (r >= best) return;
        if (violations(ps, x, d).second >= m) best = r;
    });
    return best;
}

double efficiency(const ChebyshevLattice& lat) {
    const auto& rb = lat.reciprocal();
    const int m = lat.brillouin_order();
    const double r = brillouin_inradius(rb, m);
    return ball_volume(rb.dim, r) / (m * std::abs(static_cast<double>(rb.det())));
}

double boundary_efficiency(const ChebyshevLattice& lat, int axis) {
    const auto& rb = lat.reciprocal();
    const int d = rb.dim;
    if (axis < 0 || axis >= d) throw std::invalid_argument("boundary_efficiency: axis out of range");
    const int m = lat.brillouin_order();
    const auto verts = zone_vertices(rb, m);
    double rb_in;
    if (d == 2) {
        rb_in = 0;
        for (const auto& v : verts) rb_in = std::max(rb_in, std::abs(v[1 - axis]));
    } else {
        // Convex hull of the projected vertices, then distance from the origin to its edges.
        std::vector<std::pair<double, double>> pts;
        for (const auto& v : verts) {
            std::array<double, 2> p{};
            int c = 0;
            for (int j = 0; j < 3; ++j)
                if (j != axis) p[c++] = v[j];
            pts.emplace_back(p[0], p[1]);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end(),
                              [](const auto& a, const auto& b) {
                                  return std::abs(a.first - b.first) < 1e-9 &&
                                         std::abs(a.second - b.second) < 1e-9;
                              }),
                  pts.end());
        const auto cross = [](const auto& o, const auto& a, const auto& b) {
            return (a.first - o.first) * (b.second - o.second) -
                   (a.second - o.second) * (b.first - o.first);
        };
        std::vector<std::pair<double, double>> hull(2 * pts.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
            hull[k++] = pts[i];
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
            while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
            hull[k++] = pts[i];
        }
        hull.resize(k - 1);
        rb_in = INFINITY;
        for (std::size_t i = 0; i < hull.size(); ++i) {
            const auto& a = hull[i];
            const auto& b = hull[(i + 1) % hull.size()];
            const double ex = b.first - a.first, ey = b.second - a.second;
            const double len = std::hypot(ex, ey);
            rb_in = std::min(rb_in, std::abs(a.first * ey - a.second * ex) / len);
        }
    }
    const double r = brillouin_inradius(rb, m);
    return efficiency(lat) * rb_in / r;
}

double euclidean_degree(const ChebyshevLattice& lat) {
    const int d = lat.dim();
    std::set<std::int64_t> plain;
    int maxc = 0;
    const auto key = [](const MultiIndex& k) {
        return static_cast<std::int64_t>(k[0]) | (static_cast<std::int64_t>(k[1]) << 21) |
               (static_cast<std::int64_t>(k[2]) << 42);
    };
    for (const auto& e : lat.basis()) {
        if (e.tie >= 0) continue;
        plain.insert(key(e.index));
        for (int a = 0; a < d; ++a) maxc = std::max(maxc, e.index[a]);
    }
    std::int64_t best = INT64_MAX;
    MultiIndex k = MultiIndex::zero(d);
    const int box = maxc + 1;
    const auto rec = [&](auto&& self, int a) -> void {
        if (a == d) {
            if (!plain.count(key(k))) best = std::min(best, k.norm2());
            return;
        }
        for (int v = 0; v <= box; ++v) {
            k[a] = v;
            self(self, a + 1);
        }
    };
    rec(rec, 0);
    return std::sqrt(static_cast<double>(best));
}

double discrete_efficiency(const ChebyshevLattice& lat) {
    const int d = lat.dim();
    return ball_volume(d, euclidean_degree(lat)) /
           (std::pow(2.0, d) * static_cast<double>(lat.size()));
}

BrillouinRegion brillouin_union(const ReciprocalBasis& rb, int m) {
    if (m < 1) throw std::invalid_argument("brillouin order must be at least 1");
    const int d = rb.dim;
    const double lmin = shortest(rb);
    // Every point of the union lies within m |l_min| / 2 of the origin.
    const int box = static_cast<int>(std::floor(m * lmin / 2)) + 1;
    const auto ls = lattice_vectors(rb, 2.0 * box * std::sqrt(static_cast<double>(d)));
    BrillouinRegion out;
    MultiIndex k = MultiIndex::zero(d);
    const auto rec = [&](auto&& self, int a) -> void {
        if (a == d) {
            const auto n0 = k.norm2();
            const double lim2 = 4.0 * static_cast<double>(n0);
            int closer = 0, tie = 0;
            for (const auto& l : ls) {
                std::int64_t l2 = 0, s = 0;
                for (int j = 0; j < d; ++j) {
                    l2 += l[j] * l[j];
                    s += (k[j] + l[j]) * (k[j] + l[j]);
                }
                if (static_cast<double>(l2) > lim2) break;
                if (s < n0) ++closer;
                else if (s == n0) ++tie;
            }
            const int rank = 1 + closer;
            if (rank <= m) {
                out.indices.push_back(k);
                out.on_boundary.push_back(tie > 0 && rank + tie > m);
            }
            return;
        }
        for (int v = 0; v <= box; ++v) {
            k[a] = v;
            self(self, a + 1);
        }
    };
    rec(rec, 0);
    return out;
}

AliasingClassInfo aliasing_class(const ChebyshevLattice& lat, const MultiIndex& k, double radius) {
    const int d = lat.dim();
    if (k.dim != d) throw std::invalid_argument("aliasing_class: index dimension mismatch");
    for (int a = 0; a < d; ++a)
        if (k[a] < 0) throw std::invalid_argument("aliasing_class: negative index");
    if (radius < 0) radius = k.norm();

    AliasingClassInfo info;
    info.canonical = k;
    std::vector<double> col, other;
    const auto cls = lat.response(k, col);
    if (!cls) return info;
    const auto& c = lat.classes()[*cls];
    const std::size_t m = c.size();
    bool zero = std::all_of(col.begin(), col.end(), [](double x) { return x == 0.0; });
    if (!zero) {
        for (std::size_t p = 0; p < m; ++p) {
            for (int s : {1, -1}) {
                bool eq = true;
                for (std::size_t r = 0; r < m && eq; ++r)
                    eq = std::abs(c.response[r * m + p] - s * col[r]) < 1e-12;
                if (eq) {
                    info.canonical = lat.basis()[c.elements[p]].index;
                    info.sign = s;
                    break;
                }
            }
            if (info.sign) break;
        }
    }
    if (zero) return info;

    const auto mod = lat.class_modulus();
    std::array<std::vector<int>, 3> per;
    for (int a = 0; a < d; ++a) {
        std::set<int> vals;
        for (int q = 0; q * mod[a] - c.key[a] <= radius; ++q) {
            const int v1 = c.key[a] + q * mod[a], v2 = q * mod[a] - c.key[a];
            if (v1 <= radius) vals.insert(v1);
            if (v2 >= 0 && v2 <= radius) vals.insert(v2);
        }
        per[a].assign(vals.begin(), vals.end());
    }
    MultiIndex j = MultiIndex::zero(d);
    const double r2 = radius * radius + 1e-9;
    const auto rec = [&](auto&& self, int a) -> void {
        if (a == d) {
            if (static_cast<double>(j.norm2()) > r2) return;
            lat.response(j, other);
            bool eq = false;
            for (int s : {1, -1}) {
                bool e = true;
                for (std::size_t r = 0; r < m && e; ++r) e = std::abs(other[r] - s * col[r]) < 1e-12;
                eq = eq || e;
            }
            if (eq) info.members.push_back(j);
            return;
        }
        for (int v : per[a]) {
            j[a] = v;
            self(self, a + 1);
        }
    };
    rec(rec, 0);
    std::sort(info.members.begin(), info.members.end());
    return info;
}

}  // namespace cheblat
