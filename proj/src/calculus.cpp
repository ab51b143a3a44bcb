#include "cheblat/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cheblat {

Interpolant::Interpolant(std::shared_ptr<const TransformPlan> plan, std::vector<double> coeffs)
    : plan_(std::move(plan)), coeffs_(std::move(coeffs)) {
    if (!plan_) throw std::invalid_argument("interpolant needs a transform plan");
    if (coeffs_.size() != plan_->size()) {
        throw std::invalid_argument("interpolant: " + std::to_string(coeffs_.size()) +
                                    " coefficients for a basis of " + std::to_string(plan_->size()));
    }
}

Interpolant interpolate(std::shared_ptr<const TransformPlan> plan, std::span<const double> samples) {
    auto c = plan->forward(samples);
    return Interpolant(std::move(plan), std::move(c));
}

namespace {

// cos(k theta_a) for k = 0..maxdeg via the three-term recurrence in x.
void chebyshev_table(double x, int maxdeg, std::vector<double>& t) {
    t.resize(static_cast<std::size_t>(maxdeg) + 1);
    t[0] = 1.0;
    if (maxdeg >= 1) t[1] = x;
    for (int k = 2; k <= maxdeg; ++k) t[k] = 2.0 * x * t[k - 1] - t[k - 2];
}

}  // namespace

void basis_values(const ChebyshevLattice& lat, std::span<const double> x, std::vector<double>& out) {
    const int d = lat.dim();
    if (static_cast<int>(x.size()) != d) {
        throw std::invalid_argument("evaluate: point has " + std::to_string(x.size()) +
                                    " coordinates, lattice dimension is " + std::to_string(d));
    }
    for (int a = 0; a < d; ++a) {
        if (!(x[a] >= -1.0 && x[a] <= 1.0)) {
            throw std::invalid_argument("evaluate: point lies outside [-1,1]^d");
        }
    }
    int maxdeg = 0;
    for (const auto& e : lat.basis()) {
        if (e.tie < 0) {
            for (int a = 0; a < d; ++a) maxdeg = std::max(maxdeg, e.index[a]);
        } else {
            for (const auto& m : lat.ties()[e.tie].members)
                for (int a = 0; a < d; ++a) maxdeg = std::max(maxdeg, m[a]);
        }
    }
    std::vector<double> tab[3];
    for (int a = 0; a < d; ++a) chebyshev_table(x[a], maxdeg, tab[a]);
    const auto term = [&](const MultiIndex& k) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= tab[a][k[a]];
        return v;
    };
    out.resize(lat.size());
    for (std::size_t b = 0; b < lat.basis().size(); ++b) {
        const auto& e = lat.basis()[b];
        if (e.tie < 0) {
            out[b] = term(e.index);
        } else {
            const auto& t = lat.ties()[e.tie];
            double v = 0;
            for (std::size_t i = 0; i < t.members.size(); ++i) v += t.signs[i] * term(t.members[i]);
            out[b] = v / static_cast<double>(t.members.size());
        }
    }
}

double evaluate(const Interpolant& p, std::span<const double> x) {
    thread_local std::vector<double> v;
    basis_values(p.lattice(), x, v);
    double s = 0;
    const auto& c = p.coeffs();
    for (std::size_t b = 0; b < v.size(); ++b) s += c[b] * v[b];
    return s;
}

std::vector<double> evaluate_many(const Interpolant& p, const std::vector<Point>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    const int d = p.dim();
    for (const auto& x : xs) out.push_back(evaluate(p, std::span<const double>(x.data(), d)));
    return out;
}

// ---------------------------------------------------------------------------

DiffPlan::DiffPlan(std::shared_ptr<const TransformPlan> plan) : plan_(std::move(plan)) {
    const auto& lat = plan_->lattice();
    const int d = lat.dim();
    for (std::size_t b = 0; b < lat.basis().size(); ++b) {
        const auto& e = lat.basis()[b];
        if (e.tie < 0) {
            pure_.push_back(e.index);
            pure_elem_.push_back(b);
            pure_weight_.push_back(1.0);
        } else {
            const auto& t = lat.ties()[e.tie];
            const double g = static_cast<double>(t.members.size());
            for (std::size_t i = 0; i < t.members.size(); ++i) {
                pure_.push_back(t.members[i]);
                pure_elem_.push_back(b);
                pure_weight_.push_back(t.signs[i] / g);
            }
        }
    }
    int maxdeg = 0;
    for (const auto& k : pure_)
        for (int a = 0; a < d; ++a) maxdeg = std::max(maxdeg, k[a]);

    // Stable counting sort by one coordinate.
    const auto bucket_sort = [&](std::vector<std::size_t>& order, int axis) {
        std::vector<std::size_t> count(static_cast<std::size_t>(maxdeg) + 2, 0);
        for (auto i : order) ++count[pure_[i][axis] + 1];
        for (std::size_t v = 1; v < count.size(); ++v) count[v] += count[v - 1];
        std::vector<std::size_t> out(order.size());
        for (auto i : order) out[count[pure_[i][axis]]++] = i;
        order.swap(out);
    };

    axes_.resize(d);
    for (int a = 0; a < d; ++a) {
        auto& ax = axes_[a];
        ax.perm.resize(pure_.size());
        for (std::size_t i = 0; i < pure_.size(); ++i) ax.perm[i] = i;
        // Least significant key first: the differentiation axis, then the rest.
        bucket_sort(ax.perm, a);
        for (int o = d - 1; o >= 0; --o)
            if (o != a) bucket_sort(ax.perm, o);

        const auto same_chain = [&](std::size_t i, std::size_t j) {
            for (int o = 0; o < d; ++o)
                if (o != a && pure_[i][o] != pure_[j][o]) return false;
            return true;
        };
        for (std::size_t i = 0; i < ax.perm.size(); ++i)
            if (i == 0 || !same_chain(ax.perm[i - 1], ax.perm[i])) ax.chain_begin.push_back(i);
        ax.chain_begin.push_back(ax.perm.size());

        const std::size_t nchains = ax.chain_begin.size() - 1;
        for (std::size_t c = 0; c < nchains; ++c) {
            const std::size_t last = ax.perm[ax.chain_begin[c + 1] - 1];
            const int top = pure_[last][a];
            ax.chain_max.push_back(top);
            ax.target_begin.push_back(ax.targets.size());
            MultiIndex k = pure_[last];
            for (int j = 0; j < top; ++j) {
                k[a] = j;
                Target t{static_cast<std::size_t>(-1), {}};
                auto pos = lat.find(k);
                if (pos && lat.basis()[*pos].tie < 0) {
                    t.pos = *pos;
                } else {
                    t.alias = plan_->alias_project(k);
                    ++ax.projected;
                }
                ax.targets.push_back(std::move(t));
            }
        }
        ax.target_begin.push_back(ax.targets.size());
    }
}

std::vector<double> DiffPlan::apply(std::span<const double> coeffs, int axis) const {
    const auto& lat = plan_->lattice();
    if (axis < 0 || axis >= lat.dim()) throw std::invalid_argument("differentiate: axis out of range");
    if (coeffs.size() != lat.size()) throw std::invalid_argument("differentiate: coefficient count mismatch");
    const auto& ax = axes_[axis];
    std::vector<double> out(lat.size(), 0.0);
    std::vector<double> c, dv;
    for (std::size_t ch = 0; ch + 1 < ax.chain_begin.size(); ++ch) {
        const int top = ax.chain_max[ch];
        if (top == 0) continue;
        c.assign(static_cast<std::size_t>(top) + 1, 0.0);
        for (std::size_t i = ax.chain_begin[ch]; i < ax.chain_begin[ch + 1]; ++i) {
            const std::size_t p = ax.perm[i];
            c[pure_[p][axis]] += pure_weight_[p] * coeffs[pure_elem_[p]];
        }
        // T_j' expansion: d_{j-1} = d_{j+1} + 2 j c_j, then halve d_0.
        dv.assign(static_cast<std::size_t>(top) + 2, 0.0);
        for (int j = top; j >= 1; --j) dv[j - 1] = dv[j + 1] + 2.0 * j * c[j];
        dv[0] *= 0.5;
        const std::size_t tb = ax.target_begin[ch];
        for (int j = 0; j < top; ++j) {
            if (dv[j] == 0.0) continue;
            const auto& t = ax.targets[tb + j];
            if (t.alias.empty() && t.pos != static_cast<std::size_t>(-1)) {
                out[t.pos] += dv[j];
            } else {
                for (const auto& [pos, w] : t.alias) out[pos] += w * dv[j];
            }
        }
    }
    return out;
}

Interpolant differentiate(const DiffPlan& plan, const Interpolant& p, int axis) {
    return Interpolant(p.plan_ptr(), plan.apply(p.coeffs(), axis));
}

Interpolant differentiate(const Interpolant& p, int axis) {
    DiffPlan plan(p.plan_ptr());
    return differentiate(plan, p, axis);
}

// ---------------------------------------------------------------------------

double chebyshev_integral(int m) {
    if (m < 0) throw std::invalid_argument("chebyshev_integral: negative degree");
    if (m % 2 == 1) return 0.0;
    return 2.0 / (1.0 - static_cast<double>(m) * m);
}

std::vector<double> basis_integrals(const ChebyshevLattice& lat) {
    const int d = lat.dim();
    const auto term = [d](const MultiIndex& k) {
        double v = 1.0;
        for (int a = 0; a < d; ++a) v *= chebyshev_integral(k[a]);
        return v;
    };
    std::vector<double> I;
    I.reserve(lat.size());
    for (const auto& e : lat.basis()) {
        if (e.tie < 0) {
            I.push_back(term(e.index));
        } else {
            const auto& t = lat.ties()[e.tie];
            double v = 0;
            for (std::size_t i = 0; i < t.members.size(); ++i) v += t.signs[i] * term(t.members[i]);
            I.push_back(v / static_cast<double>(t.members.size()));
        }
    }
    return I;
}

QuadratureStencil quadrature_stencil(const TransformPlan& plan) {
    QuadratureStencil s;
    s.lattice = plan.lattice_ptr();
    s.weights = plan.adjoint(basis_integrals(plan.lattice()));
    return s;
}

double integrate(const QuadratureStencil& stencil, std::span<const double> samples) {
    if (samples.size() != stencil.weights.size()) {
        throw std::invalid_argument("integrate: " + std::to_string(samples.size()) + " samples for " +
                                    std::to_string(stencil.weights.size()) + " weights");
    }
    double s = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) s += stencil.weights[i] * samples[i];
    return s;
}

Rule1d gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    Rule1d r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Refresh the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = 0.0;
    return r;
}

TensorRule gauss_legendre(int n, int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("gauss_legendre: dim must be 1, 2 or 3");
    const auto r = gauss_legendre(n);
    TensorRule t;
    t.dim = dim;
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    t.nodes.reserve(total);
    t.weights.reserve(total);
    for (std::size_t f = 0; f < total; ++f) {
        Point p{};
        double w = 1.0;
        std::size_t rem = f;
        for (int a = dim - 1; a >= 0; --a) {
            const std::size_t i = rem % n;
            rem /= n;
            p[a] = r.nodes[i];
            w *= r.weights[i];
        }
        t.nodes.push_back(p);
        t.weights.push_back(w);
    }
    return t;
}

std::vector<double> clenshaw_curtis_weights(int n) {
    Dct1d plan(n, BoundaryType::TypeI);
    std::vector<double> I(n), w(n);
    for (int k = 0; k < n; ++k) I[k] = chebyshev_integral(k);
    plan.analyze_transpose(I, w);
    return w;
}

}  // namespace cheblat
