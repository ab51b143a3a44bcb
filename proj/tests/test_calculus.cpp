#include "cheblat/calculus.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cheblat;

namespace {

struct Config {
    Family f;
    int d;
    int r;
};

const Config kFamilies[] = {{Family::Cartesian, 2, 4}, {Family::Cartesian, 3, 3}, {Family::Padua, 2, 6},
                            {Family::Padua, 2, 7},     {Family::Hex, 2, 2},       {Family::BCC, 3, 2},
                            {Family::BCC, 3, 3},       {Family::FCC, 3, 2},       {Family::CompositeOct7, 2, 3}};

std::shared_ptr<const TransformPlan> make_plan(const Config& c) {
    return std::make_shared<TransformPlan>(build(c.f, c.d, c.r));
}

std::string label(const Config& c) {
    return std::string(to_string(c.f)) + " d=" + std::to_string(c.d) + " r=" + std::to_string(c.r);
}

std::vector<double> unit(std::size_t n, std::size_t i) {
    std::vector<double> e(n, 0.0);
    e[i] = 1.0;
    return e;
}

// T_k(x) and T_k'(x) = k U_{k-1}(x), straight from the recurrences.
double cheb_t(int k, double x) {
    double a = 1, b = x;
    if (k == 0) return a;
    for (int j = 2; j <= k; ++j) {
        const double c = 2 * x * b - a;
        a = b;
        b = c;
    }
    return b;
}

double cheb_dt(int k, double x) {
    if (k == 0) return 0;
    double a = 1, b = 2 * x;  // U_0, U_1
    if (k == 1) return 1;
    for (int j = 2; j <= k - 1; ++j) {
        const double c = 2 * x * b - a;
        a = b;
        b = c;
    }
    return k * b;
}

double pure_value(const MultiIndex& k, const double* x, int d, int deriv_axis) {
    double v = 1;
    for (int a = 0; a < d; ++a) v *= (a == deriv_axis) ? cheb_dt(k[a], x[a]) : cheb_t(k[a], x[a]);
    return v;
}

double element_derivative(const ChebyshevLattice& lat, std::size_t b, const double* x, int axis) {
    const auto& e = lat.basis()[b];
    const int d = lat.dim();
    if (e.tie < 0) return pure_value(e.index, x, d, axis);
    const auto& t = lat.ties()[e.tie];
    double s = 0;
    for (std::size_t i = 0; i < t.members.size(); ++i) s += t.signs[i] * pure_value(t.members[i], x, d, axis);
    return s / static_cast<double>(t.members.size());
}

// True when every Chebyshev term of d/dx_axis of element b is itself a plain basis element.
bool derivative_in_span(const ChebyshevLattice& lat, std::size_t b, int axis) {
    const auto& e = lat.basis()[b];
    std::vector<MultiIndex> ks;
    if (e.tie < 0) {
        ks.push_back(e.index);
    } else {
        ks = lat.ties()[e.tie].members;
    }
    for (auto k : ks) {
        for (int j = k[axis] - 1; j >= 0; j -= 2) {
            auto q = k;
            q[axis] = j;
            auto pos = lat.find(q);
            if (!pos || lat.basis()[*pos].tie >= 0) return false;
        }
    }
    return true;
}

std::vector<Point> random_points(int d, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<Point> xs(n);
    for (auto& x : xs)
        for (int a = 0; a < d; ++a) x[a] = U(rng);
    return xs;
}

double smooth(const double* x, int d) {
    double s = 0.3;
    for (int a = 0; a < d; ++a) s += (0.4 + 0.1 * a) * x[a];
    return std::exp(s) * std::cos(1.5 * x[0] - 0.5 * x[d - 1]);
}

}  // namespace

TEST(Evaluate, ConstantAndNodes) {
    for (const auto& c : kFamilies) {
        auto plan = make_plan(c);
        const auto& lat = plan->lattice();
        std::vector<double> ones(lat.size(), 1.0);
        auto p = interpolate(plan, ones);
        for (const auto& x : random_points(c.d, 10, 3)) EXPECT_NEAR(evaluate(p, {x.data(), size_t(c.d)}), 1.0, 1e-12);

        auto coeffs = std::vector<double>(lat.size());
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-1, 1);
        for (auto& v : coeffs) v = U(rng);
        Interpolant q(plan, coeffs);
        const auto at_nodes = plan->inverse(coeffs);
        const auto direct = evaluate_many(q, lat.points());
        for (std::size_t i = 0; i < lat.size(); ++i) EXPECT_NEAR(direct[i], at_nodes[i], 1e-11) << label(c);
    }
}

TEST(Evaluate, MatchesBasisValue) {
    auto plan = make_plan({Family::BCC, 3, 2});
    const auto& lat = plan->lattice();
    for (std::size_t b = 0; b < lat.size(); ++b) {
        Interpolant p(plan, unit(lat.size(), b));
        for (const auto& x : random_points(3, 3, b)) {
            Point th{std::acos(x[0]), std::acos(x[1]), std::acos(x[2])};
            EXPECT_NEAR(evaluate(p, {x.data(), 3}), lat.basis_value(b, th.data()), 1e-12);
        }
    }
}

TEST(Evaluate, Errors) {
    auto plan = make_plan({Family::Hex, 2, 1});
    Interpolant p(plan, std::vector<double>(plan->size(), 0.0));
    const double outside[] = {1.5, 0.0};
    const double wrong[] = {0.0, 0.0, 0.0};
    EXPECT_THROW(evaluate(p, outside), std::invalid_argument);
    EXPECT_THROW(evaluate(p, wrong), std::invalid_argument);
    EXPECT_THROW(Interpolant(plan, std::vector<double>(3)), std::invalid_argument);
}

TEST(Differentiate, SmallCartesianCases) {
    auto plan = std::make_shared<TransformPlan>(build_cartesian(std::vector<int>{6, 6}));
    const auto& lat = plan->lattice();
    const auto pos = [&](int i, int j) { return *lat.find(MultiIndex{i, j}); };
    DiffPlan dp(plan);

    auto d1 = dp.apply(unit(lat.size(), pos(1, 0)), 0);
    for (std::size_t b = 0; b < lat.size(); ++b) EXPECT_NEAR(d1[b], b == pos(0, 0) ? 1.0 : 0.0, 1e-15);

    // T_3' = 3 U_2 = 6 T_2 + 3 T_0
    auto d3 = dp.apply(unit(lat.size(), pos(0, 3)), 1);
    for (std::size_t b = 0; b < lat.size(); ++b) {
        const double want = b == pos(0, 2) ? 6.0 : b == pos(0, 0) ? 3.0 : 0.0;
        EXPECT_NEAR(d3[b], want, 1e-14);
    }
    auto d0 = dp.apply(unit(lat.size(), pos(0, 0)), 0);
    for (double v : d0) EXPECT_EQ(v, 0.0);
    EXPECT_EQ(dp.projected_outputs(0), 0u);
    EXPECT_THROW(dp.apply(d0, 2), std::invalid_argument);
}

TEST(Differentiate, Linearity) {
    auto plan = make_plan({Family::FCC, 3, 2});
    DiffPlan dp(plan);
    const std::size_t n = plan->size();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> a(n), b(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = U(rng);
        b[i] = U(rng);
        ab[i] = 2 * a[i] - 3 * b[i];
    }
    for (int axis = 0; axis < 3; ++axis) {
        auto da = dp.apply(a, axis), db = dp.apply(b, axis), dab = dp.apply(ab, axis);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(dab[i], 2 * da[i] - 3 * db[i], 1e-11);
    }
}

TEST(Differentiate, AnalyticPerBasisElement) {
    for (const auto& c : kFamilies) {
        auto plan = make_plan(c);
        const auto& lat = plan->lattice();
        DiffPlan dp(plan);
        const auto xs = random_points(c.d, 8, 17);
        std::size_t off_span = 0;
        for (int axis = 0; axis < c.d; ++axis) {
            for (std::size_t b = 0; b < lat.size(); ++b) {
                Interpolant p(plan, dp.apply(unit(lat.size(), b), axis));
                double scale = 1;
                for (const auto& x : xs) scale = std::max(scale, std::abs(element_derivative(lat, b, x.data(), axis)));
                if (derivative_in_span(lat, b, axis)) {
                    for (const auto& x : xs) {
                        EXPECT_NEAR(evaluate(p, {x.data(), size_t(c.d)}), element_derivative(lat, b, x.data(), axis),
                                    1e-12 * scale)
                            << label(c) << " element " << b << " axis " << axis;
                    }
                } else {
                    // Terms outside the span are replaced by their lattice interpolant,
                    // so agreement holds on the nodes.
                    ++off_span;
                    const auto vals = plan->inverse(p.coeffs());
                    for (std::size_t i = 0; i < lat.size(); ++i) {
                        EXPECT_NEAR(vals[i], element_derivative(lat, b, lat.points()[i].data(), axis), 1e-11 * scale)
                            << label(c) << " element " << b << " axis " << axis;
                    }
                }
            }
        }
        if (c.f != Family::BCC) EXPECT_EQ(off_span, 0u) << label(c);
    }
}

TEST(Differentiate, CentralDifferences) {
    const double h = 1e-5;
    for (const auto& c : kFamilies) {
        auto plan = make_plan(c);
        const auto& lat = plan->lattice();
        std::vector<double> s;
        for (const auto& x : lat.points()) s.push_back(smooth(x.data(), c.d));
        auto p = interpolate(plan, s);
        DiffPlan dp(plan);
        for (int axis = 0; axis < c.d; ++axis) {
            auto dpx = differentiate(dp, p, axis);
            for (auto x : random_points(c.d, 100, 23 + axis)) {
                for (int a = 0; a < c.d; ++a) x[a] *= 0.999;
                auto xp = x, xm = x;
                xp[axis] += h;
                xm[axis] -= h;
                const double fd = (evaluate(p, {xp.data(), size_t(c.d)}) - evaluate(p, {xm.data(), size_t(c.d)})) / (2 * h);
                EXPECT_NEAR(evaluate(dpx, {x.data(), size_t(c.d)}), fd, 1e-8) << label(c) << " axis " << axis;
            }
        }
    }
}

TEST(Integrals, ChebyshevIntegralAgainstGauss) {
    const auto gl = gauss_legendre(40);
    for (int m = 0; m <= 30; ++m) {
        double s = 0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * cheb_t(m, gl.nodes[i]);
        EXPECT_NEAR(chebyshev_integral(m), s, 1e-13) << m;
    }
    EXPECT_DOUBLE_EQ(chebyshev_integral(0), 2.0);
    EXPECT_DOUBLE_EQ(chebyshev_integral(2), -2.0 / 3.0);
    EXPECT_THROW(chebyshev_integral(-1), std::invalid_argument);
}

TEST(Integrals, BasisIntegrals) {
    auto lat = build_cartesian(std::vector<int>{5, 5});
    const auto I = basis_integrals(lat);
    EXPECT_DOUBLE_EQ(I[*lat.find(MultiIndex{0, 0})], 4.0);
    EXPECT_NEAR(I[*lat.find(MultiIndex{2, 0})], -4.0 / 3.0, 1e-15);
    EXPECT_EQ(I[*lat.find(MultiIndex{1, 2})], 0.0);
    EXPECT_EQ(I[*lat.find(MultiIndex{3, 3})], 0.0);
}

TEST(Quadrature, StencilExactOnBasis) {
    for (const auto& c : kFamilies) {
        auto plan = make_plan(c);
        const auto& lat = plan->lattice();
        const auto st = quadrature_stencil(*plan);
        double sum = 0;
        for (double w : st.weights) sum += w;
        EXPECT_NEAR(sum, std::pow(2.0, c.d), 1e-12) << label(c);
        const auto I = basis_integrals(lat);
        for (std::size_t b = 0; b < lat.size(); ++b) {
            std::vector<double> s;
            for (const auto& t : lat.thetas()) s.push_back(lat.basis_value(b, t.data()));
            EXPECT_NEAR(integrate(st, s), I[b], 1e-12) << label(c) << " element " << b;
        }
    }
}

TEST(Quadrature, SmoothFunctionAgainstGauss) {
    const auto gl = gauss_legendre(30, 3);
    double ref = 0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) ref += gl.weights[i] * smooth(gl.nodes[i].data(), 3);
    auto plan = make_plan({Family::BCC, 3, 8});
    const auto& lat = plan->lattice();
    std::vector<double> s;
    for (const auto& x : lat.points()) s.push_back(smooth(x.data(), 3));
    EXPECT_NEAR(integrate(quadrature_stencil(*plan), s), ref, 1e-9);
    EXPECT_THROW(integrate(quadrature_stencil(*plan), std::vector<double>(3)), std::invalid_argument);
}

TEST(Quadrature, IntegrateT2) {
    auto plan = std::make_shared<TransformPlan>(build_cartesian(std::vector<int>{7, 7}));
    const auto& lat = plan->lattice();
    std::vector<double> s;
    for (const auto& x : lat.points()) s.push_back(2 * x[0] * x[0] - 1);
    EXPECT_NEAR(integrate(quadrature_stencil(*plan), s), -4.0 / 3.0, 1e-13);
}

TEST(ClenshawCurtis, MatchesCardinalIntegrals) {
    for (int n : {2, 3, 5, 9, 17}) {
        const auto w = clenshaw_curtis_weights(n);
        const auto g = nodes_1d(n, BoundaryType::TypeI);
        const auto gl = gauss_legendre(n + 2);
        // Integrate each Lagrange cardinal polynomial with Gauss-Legendre.
        for (int j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
                double l = 1;
                for (int i = 0; i < n; ++i)
                    if (i != j) l *= (gl.nodes[q] - g.xs[i]) / (g.xs[j] - g.xs[i]);
                s += gl.weights[q] * l;
            }
            EXPECT_NEAR(w[j], s, 1e-13) << "n=" << n << " j=" << j;
        }
    }
}

TEST(GaussLegendre, KnownRules) {
    auto r1 = gauss_legendre(1);
    EXPECT_DOUBLE_EQ(r1.nodes[0], 0.0);
    EXPECT_DOUBLE_EQ(r1.weights[0], 2.0);
    auto r2 = gauss_legendre(2);
    EXPECT_NEAR(r2.nodes[0], -1 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.nodes[1], 1 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(r2.weights[0], 1.0, 1e-15);
    EXPECT_THROW(gauss_legendre(0), std::invalid_argument);
    EXPECT_THROW(gauss_legendre(3, 4), std::invalid_argument);
}

TEST(GaussLegendre, MonomialExactness) {
    for (int n = 1; n <= 20; ++n) {
        const auto r = gauss_legendre(n);
        for (int i = 1; i < n; ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            EXPECT_NEAR(s, exact, 1e-14) << "n=" << n << " p=" << p;
        }
    }
}

TEST(GaussLegendre, TensorRule) {
    for (int d = 1; d <= 3; ++d) {
        const auto t = gauss_legendre(4, d);
        EXPECT_EQ(t.nodes.size(), static_cast<std::size_t>(std::pow(4, d)));
        double s = 0, sx2 = 0;
        for (std::size_t i = 0; i < t.nodes.size(); ++i) {
            s += t.weights[i];
            sx2 += t.weights[i] * t.nodes[i][d - 1] * t.nodes[i][d - 1];
        }
        EXPECT_NEAR(s, std::pow(2.0, d), 1e-13);
        EXPECT_NEAR(sx2, std::pow(2.0, d - 1) * 2.0 / 3.0, 1e-13);
    }
}
