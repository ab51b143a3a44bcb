#pragma once

#include "cheblat/lattice.hpp"
#include "cheblat/transform.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace cheblat {

using Rotation = std::array<std::array<double, 3>, 3>;

/// Haar-distributed rotation of R^dim (dim 2 or 3); unused entries are zero.
Rotation random_rotation(int dim, std::mt19937_64& rng);

enum class TestKind { GaussianBump, RungeRadial, EssentialSingularity, Constant };

std::string_view to_string(TestKind k);
TestKind test_kind_from_string(std::string_view s);

/// f(x) = g(R x) with g radial about `center`:
///   GaussianBump          exp(-w |y-a|^2)
///   RungeRadial           1 / (1 + w |y-a|)
///   EssentialSingularity  exp(-1 / (w |y-a|^2)), 0 at y = a
/// w is `sharpness` (1 reproduces the plain forms).
struct TestFunction {
    TestKind kind = TestKind::GaussianBump;
    int dim = 2;
    Point center{};
    Rotation R{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    double sharpness = 1.0;

    double operator()(const double* x) const;
};

enum class ErrorMetric { L2MonteCarlo, L2Grid, IntegralRelative };

struct ExperimentConfig {
    std::vector<Family> families;
    int dim = 2;
    std::vector<int> resolutions;
    int trials = 10;
    std::uint64_t seed = 1;
    TestKind kind = TestKind::GaussianBump;
    Point center{0.1, 0.2, 0.3};
    double sharpness = 1.0;
    ErrorMetric metric = ErrorMetric::L2MonteCarlo;
    std::size_t samples = 20000;  // Monte-Carlo budget, or total grid size for L2Grid
    /// Tensor Gauss-Legendre orders for the quadrature comparator series.
    std::vector<int> gauss_legendre_orders;
};

struct ErrorRecord {
    std::string family;
    int dim = 0;
    int resolution = 0;
    std::size_t npoints = 0;
    double euclidean_degree = 0;
    double error_mean = 0;
    double error_std = 0;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Random stream for one trial; depends only on (seed, trial).
std::mt19937_64 trial_rng(std::uint64_t seed, int trial);

/// The test function of one trial: fresh rotation, configured kind and center.
TestFunction trial_function(const ExperimentConfig& cfg, int trial);

std::vector<ErrorRecord> run_interp_convergence(const ExperimentConfig& cfg);

/// Relative quadrature errors per lattice, followed by the Gauss-Legendre series.
/// Throws std::runtime_error when a reference integral does not settle.
std::vector<ErrorRecord> run_quad_convergence(const ExperimentConfig& cfg);

/// Integral of f over [-1,1]^d by tensor Gauss-Legendre, checked against a
/// finer rule. Throws std::runtime_error if the two disagree beyond tol.
double reference_integral(const TestFunction& f, int order, double tol = 1e-13);

inline constexpr std::size_t kLebesgueBudget = 2000;

/// max over a probe grid of sum_i |l_i(x)|. The probe grid has `density`
/// Chebyshev-spaced points per axis (0 picks 4 * max degree + 9).
/// Throws std::length_error above kLebesgueBudget points.
double lebesgue_estimate(const TransformPlan& plan, int density = 0);

/// Least-squares line y = a + b x; returns {a, b}.
std::array<double, 2> fit_line(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr std::string_view kErrorCsvHeader =
    "family,dim,resolution,npoints,euclidean_degree,error_mean,error_std,trials,seed";

void write_error_csv(std::ostream& os, const std::vector<ErrorRecord>& records);
/// Log10 error against npoints^(1/d), one polyline per family.
void write_error_svg(std::ostream& os, const std::vector<ErrorRecord>& records);

}  // namespace cheblat
