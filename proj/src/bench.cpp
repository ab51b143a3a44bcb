#include "cheblat/bench.hpp"

#include "cheblat/calculus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace cheblat {

Rotation random_rotation(int dim, std::mt19937_64& rng) {
    Rotation R{};
    if (dim == 2) {
        std::uniform_real_distribution<double> U(0.0, 2.0 * std::numbers::pi);
        const double t = U(rng);
        R[0] = {std::cos(t), -std::sin(t), 0};
        R[1] = {std::sin(t), std::cos(t), 0};
        return R;
    }
    if (dim != 3) throw std::invalid_argument("random_rotation: dim must be 2 or 3");
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::Matrix3d G;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) G(i, j) = N(rng);
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(G);
    Eigen::Matrix3d Q = qr.householderQ();
    const Eigen::Matrix3d Rq = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the column signs so Q is Haar on O(3), then restrict to SO(3).
    for (int j = 0; j < 3; ++j)
        if (Rq(j, j) < 0) Q.col(j) *= -1.0;
    if (Q.determinant() < 0) Q.col(0) *= -1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) R[i][j] = Q(i, j);
    return R;
}

std::string_view to_string(TestKind k) {
    switch (k) {
        case TestKind::GaussianBump: return "gaussian";
        case TestKind::RungeRadial: return "runge";
        case TestKind::EssentialSingularity: return "essential";
        case TestKind::Constant: return "constant";
    }
    return "?";
}

TestKind test_kind_from_string(std::string_view s) {
    for (auto k : {TestKind::GaussianBump, TestKind::RungeRadial, TestKind::EssentialSingularity, TestKind::Constant})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown test function '" + std::string(s) + "'");
}

double TestFunction::operator()(const double* x) const {
    if (kind == TestKind::Constant) return 1.0;
    double r2 = 0;
    for (int i = 0; i < dim; ++i) {
        double y = 0;
        for (int j = 0; j < dim; ++j) y += R[i][j] * x[j];
        const double t = y - center[i];
        r2 += t * t;
    }
    switch (kind) {
        case TestKind::GaussianBump: return std::exp(-sharpness * r2);
        case TestKind::RungeRadial: return 1.0 / (1.0 + sharpness * std::sqrt(r2));
        case TestKind::EssentialSingularity: return r2 == 0.0 ? 0.0 : std::exp(-1.0 / (sharpness * r2));
        case TestKind::Constant: break;
    }
    return 1.0;
}

std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), 0x6c617474u};
    return std::mt19937_64(seq);
}

namespace {

TestFunction make_function(const ExperimentConfig& cfg, std::mt19937_64& rng) {
    TestFunction f;
    f.kind = cfg.kind;
    f.dim = cfg.dim;
    f.center = cfg.center;
    f.sharpness = cfg.sharpness;
    f.R = random_rotation(cfg.dim, rng);
    return f;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.dim != 2 && cfg.dim != 3) throw std::invalid_argument("experiment: dim must be 2 or 3");
    if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be at least 1");
    if (cfg.samples < 1) throw std::invalid_argument("experiment: sample budget must be positive");
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

ErrorRecord make_record(std::string family, int dim, int resolution, std::size_t npoints, double degree,
                        const std::vector<double>& errors, std::uint64_t seed) {
    auto [m, s] = mean_std(errors);
    return {std::move(family), dim, resolution, npoints, degree, m, s, static_cast<int>(errors.size()), seed};
}

}  // namespace

TestFunction trial_function(const ExperimentConfig& cfg, int trial) {
    auto rng = trial_rng(cfg.seed, trial);
    return make_function(cfg, rng);
}

std::vector<ErrorRecord> run_interp_convergence(const ExperimentConfig& cfg) {
    validate(cfg);
    if (cfg.metric == ErrorMetric::IntegralRelative)
        throw std::invalid_argument("interpolation benchmark needs an L2 error metric");
    const int d = cfg.dim;
    const double volume = std::pow(2.0, d);

    TensorRule grid;
    if (cfg.metric == ErrorMetric::L2Grid) {
        const int n = std::max(2, static_cast<int>(std::lround(std::pow(static_cast<double>(cfg.samples), 1.0 / d))));
        grid = gauss_legendre(n, d);
    }

    std::vector<ErrorRecord> out;
    std::vector<double> fvals, errors;
    std::vector<Point> probes;
    for (auto fam : cfg.families) {
        for (int r : cfg.resolutions) {
            auto plan = std::make_shared<const TransformPlan>(build(fam, d, r));
            const auto& lat = plan->lattice();
            errors.clear();
            for (int t = 0; t < cfg.trials; ++t) {
                auto rng = trial_rng(cfg.seed, t);
                const auto f = make_function(cfg, rng);
                fvals.resize(lat.size());
                for (std::size_t i = 0; i < lat.size(); ++i) fvals[i] = f(lat.points()[i].data());
                const auto p = interpolate(plan, fvals);
                double err2 = 0;
                if (cfg.metric == ErrorMetric::L2MonteCarlo) {
                    std::uniform_real_distribution<double> U(-1.0, 1.0);
                    probes.resize(cfg.samples);
                    for (auto& x : probes)
                        for (int a = 0; a < d; ++a) x[a] = U(rng);
                    for (const auto& x : probes) {
                        const double e = evaluate(p, {x.data(), static_cast<std::size_t>(d)}) - f(x.data());
                        err2 += e * e;
                    }
                    err2 *= volume / static_cast<double>(cfg.samples);
                } else {
                    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
                        const auto& x = grid.nodes[i];
                        const double e = evaluate(p, {x.data(), static_cast<std::size_t>(d)}) - f(x.data());
                        err2 += grid.weights[i] * e * e;
                    }
                }
                errors.push_back(std::sqrt(err2));
            }
            out.push_back(make_record(std::string(to_string(fam)), d, r, lat.size(), euclidean_degree(lat), errors,
                                      cfg.seed));
        }
    }
    return out;
}

double reference_integral(const TestFunction& f, int order, double tol) {
    const auto integrate_rule = [&](int n) {
        const auto rule = gauss_legendre(n, f.dim);
        double s = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(rule.nodes[i].data());
        return s;
    };
    const double a = integrate_rule(order);
    const double b = integrate_rule(order + std::max(8, order / 4));
    if (!(std::abs(a - b) <= tol * std::max(1.0, std::abs(b)))) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "reference integral did not converge: orders %d and %d differ by %.3g", order,
                      order + std::max(8, order / 4), std::abs(a - b));
        throw std::runtime_error(buf);
    }
    return b;
}

std::vector<ErrorRecord> run_quad_convergence(const ExperimentConfig& cfg) {
    validate(cfg);
    const int d = cfg.dim;

    struct Entry {
        Family fam;
        int r;
        std::shared_ptr<const TransformPlan> plan;
        QuadratureStencil stencil;
        double degree;
    };
    std::vector<Entry> lattices;
    double max_degree = 0;
    for (auto fam : cfg.families) {
        for (int r : cfg.resolutions) {
            auto plan = std::make_shared<const TransformPlan>(build(fam, d, r));
            const double deg = euclidean_degree(plan->lattice());
            max_degree = std::max(max_degree, deg);
            auto st = quadrature_stencil(*plan);
            lattices.push_back({fam, r, std::move(plan), std::move(st), deg});
        }
    }
    std::vector<int> gl = cfg.gauss_legendre_orders;
    if (gl.empty() && !lattices.empty()) {
        for (const auto& e : lattices) {
            if (e.fam != lattices.front().fam) break;
            const int n = std::max(1, static_cast<int>(std::lround(std::pow(double(e.plan->size()), 1.0 / d))));
            if (gl.empty() || gl.back() != n) gl.push_back(n);
        }
    }
    for (int n : gl) max_degree = std::max(max_degree, 2.0 * n);

    const int ref_order = std::max(24, static_cast<int>(std::ceil(max_degree)));
    std::vector<TestFunction> fs;
    std::vector<double> refs;
    for (int t = 0; t < cfg.trials; ++t) {
        fs.push_back(trial_function(cfg, t));
        refs.push_back(reference_integral(fs.back(), ref_order));
    }
    const auto rel = [](double q, double ref) { return std::abs(q - ref) / std::max(std::abs(ref), 1e-300); };

    std::vector<ErrorRecord> out;
    std::vector<double> samples, errors;
    for (const auto& e : lattices) {
        const auto& lat = e.plan->lattice();
        errors.clear();
        for (int t = 0; t < cfg.trials; ++t) {
            samples.resize(lat.size());
            for (std::size_t i = 0; i < lat.size(); ++i) samples[i] = fs[t](lat.points()[i].data());
            errors.push_back(rel(integrate(e.stencil, samples), refs[t]));
        }
        out.push_back(make_record(std::string(to_string(e.fam)), d, e.r, lat.size(), e.degree, errors, cfg.seed));
    }
    for (int n : gl) {
        const auto rule = gauss_legendre(n, d);
        errors.clear();
        for (int t = 0; t < cfg.trials; ++t) {
            double s = 0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * fs[t](rule.nodes[i].data());
            errors.push_back(rel(s, refs[t]));
        }
        out.push_back(make_record("gauss-legendre", d, n, rule.nodes.size(), 2.0 * n, errors, cfg.seed));
    }
    return out;
}

double lebesgue_estimate(const TransformPlan& plan, int density) {
    const auto& lat = plan.lattice();
    if (lat.size() > kLebesgueBudget) {
        throw std::length_error("lebesgue_estimate: " + std::to_string(lat.size()) + " points exceed the budget of " +
                                std::to_string(kLebesgueBudget));
    }
    const int d = lat.dim();
    if (density == 0) {
        int maxdeg = 0;
        for (const auto& e : lat.basis())
            for (int a = 0; a < d; ++a) maxdeg = std::max(maxdeg, e.index[a]);
        density = 4 * maxdeg + 9;
    }
    if (density < 2) throw std::invalid_argument("lebesgue_estimate: probe density must be at least 2");

    std::vector<double> axis(density);
    for (int j = 0; j < density; ++j) axis[j] = std::cos(std::numbers::pi * j / (density - 1));
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(density);

    std::vector<double> values, cardinal(lat.size());
    double best = 0;
    Point x{};
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rem = f;
        for (int a = d - 1; a >= 0; --a) {
            x[a] = axis[rem % density];
            rem /= density;
        }
        // l_i(x) = sum_b F_{b,i} C_b(x), i.e. the transpose of forward applied to C(x).
        basis_values(lat, {x.data(), static_cast<std::size_t>(d)}, values);
        plan.adjoint(values, cardinal);
        double s = 0;
        for (double v : cardinal) s += std::abs(v);
        best = std::max(best, s);
    }
    return best;
}

std::array<double, 2> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("fit_line: abscissae are all equal");
    const double b = sxy / sxx;
    return {my - b * mx, b};
}

void write_error_csv(std::ostream& os, const std::vector<ErrorRecord>& records) {
    os << kErrorCsvHeader << '\n';
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%zu,%.17g,%.17g,%.17g,%d,%llu\n", r.family.c_str(), r.dim,
                      r.resolution, r.npoints, r.euclidean_degree, r.error_mean, r.error_std, r.trials,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

void write_error_svg(std::ostream& os, const std::vector<ErrorRecord>& records) {
    constexpr double W = 640, H = 420, L = 70, R = 150, T = 20, B = 50;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    std::vector<std::string> order;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& r : records) {
        if (!(r.error_mean > 0)) continue;
        const double x = std::pow(static_cast<double>(r.npoints), 1.0 / r.dim);
        const double y = std::log10(r.error_mean);
        if (!series.count(r.family)) order.push_back(r.family);
        series[r.family].emplace_back(x, y);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (order.empty()) {
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    }
    if (x1 == x0) x1 = x0 + 1;
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
    if (y1 == y0) y1 = y0 + 1;
    const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double y) { return T + (y1 - y) / (y1 - y0) * (H - T - B); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n",
                  W, H);
    os << buf;
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"#000\"/>\n",
                  L, T, W - L - R, H - T - B);
    os << buf;
    for (double y = y0; y <= y1; y += 1) {
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">1e%d</text>\n", L - 6, py(y) + 4,
                      static_cast<int>(y));
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">npoints^(1/d)</text>\n",
                  (L + W - R) / 2, H - 15);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"start\">%.3g</text>\n", L, H - B + 16, x0);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%.3g</text>\n", W - R, H - B + 16, x1);
    os << buf;
    for (std::size_t s = 0; s < order.size(); ++s) {
        const char* c = colors[s % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[order[s]]) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
            os << buf;
        }
        os << "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s</text>\n", W - R + 10,
                      T + 16 + 16.0 * s, c, order[s].c_str());
        os << buf;
    }
    os << "</svg>\n";
}

}  // namespace cheblat
