#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace cheblat {

/// The four equispaced Chebyshev node families on [0, pi].
///
///   TypeI      theta_i = pi i / (n-1)          contains both endpoints
///   TypeII     theta_i = pi (2i+1) / (2n)      contains neither endpoint
///   TypeVminus theta_i = pi 2i / (2n-1)        contains x = +1 only
///   TypeVplus  theta_i = pi (2i+1) / (2n-1)    contains x = -1 only
enum class BoundaryType { TypeI, TypeII, TypeVminus, TypeVplus };

std::string_view to_string(BoundaryType b);
BoundaryType boundary_from_string(std::string_view name);

/// Full-torus period N of an n-point grid: the grid is theta = 2 pi (z + s/2) / N
/// restricted to [0, pi], with s the half-cell shift.
int torus_period(int n, BoundaryType b);
int torus_shift(BoundaryType b);
BoundaryType boundary_of(int period, int shift);
int node_count(int period, int shift);

struct Grid1D {
    int n = 0;
    BoundaryType boundary = BoundaryType::TypeI;
    std::vector<double> thetas;  // strictly increasing, in [0, pi]
    std::vector<double> xs;      // cos(thetas), descending
};

Grid1D nodes_1d(int n, BoundaryType boundary);

/// Complex DFT of fixed length. Thin RAII wrapper around an FFTW plan pair.
class FftPlan {
public:
    explicit FftPlan(int n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int size() const { return n_; }
    /// out_k = sum_j in_j exp(-2 pi i jk/n)
    void forward(const std::complex<double>* in, std::complex<double>* out) const;
    /// out_j = sum_k in_k exp(+2 pi i jk/n), unnormalized
    void backward(const std::complex<double>* in, std::complex<double>* out) const;

private:
    int n_;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

/// One-dimensional cosine transform on an n-point grid of the given family.
///
/// analyze() is normalized so that samples of cos(k theta) map to the unit
/// vector e_k for every k < n; synthesize() is its exact inverse, evaluating a
/// cosine series at the nodes. Plans are immutable; all methods are reentrant.
class Dct1d {
public:
    Dct1d(int n, BoundaryType boundary);

    int size() const { return n_; }
    int period() const { return period_; }
    BoundaryType boundary() const { return boundary_; }

    void analyze(std::span<const double> values, std::span<double> coeffs) const;
    void synthesize(std::span<const double> coeffs, std::span<double> values) const;
    /// Transpose of analyze().
    void analyze_transpose(std::span<const double> coeffs, std::span<double> values) const;

    /// Scratch-buffer variants used by the multi-dimensional driver.
    void analyze(const double* in, double* out, std::complex<double>* work) const;
    void synthesize(const double* in, double* out, std::complex<double>* work) const;
    void analyze_transpose(const double* in, double* out, std::complex<double>* work) const;
    std::size_t work_size() const { return 2 * static_cast<std::size_t>(period_); }

    double mode_weight(int k) const { return mode_weight_[k]; }
    double node_weight(int i) const { return node_weight_[i]; }

private:
    int n_;
    BoundaryType boundary_;
    int period_;
    int shift_;
    std::shared_ptr<const FftPlan> fft_;
    std::vector<double> mode_weight_;  // a_k
    std::vector<double> node_weight_;  // c_i: 1/2 on theta in {0, pi}
    std::vector<std::complex<double>> twiddle_;  // exp(i pi k s / N)
};

using SpectralVector = std::vector<double>;

SpectralVector dct_1d(std::span<const double> values, BoundaryType boundary);
std::vector<double> idct_1d(std::span<const double> coeffs, BoundaryType boundary);

enum class TypeVVariant { Vminus, Vplus };
/// Type-V transform through a length-(2n-1) complex FFT.
SpectralVector dct_typeV(std::span<const double> values, TypeVVariant variant);
std::vector<double> idct_typeV(std::span<const double> coeffs, TypeVVariant variant);

/// Dense row-major tensor; the last axis is contiguous.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s);
    std::size_t size() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
};

/// Separable cosine transform over a tensor-product grid.
class DctNd {
public:
    DctNd() = default;
    explicit DctNd(std::span<const Dct1d> axes);
    DctNd(std::span<const int> counts, std::span<const BoundaryType> boundaries);

    std::size_t size() const { return total_; }
    std::size_t rank() const { return axes_.size(); }
    const Dct1d& axis(std::size_t a) const { return axes_[a]; }
    std::span<const std::size_t> shape() const { return shape_; }

    void analyze(std::span<const double> values, std::span<double> coeffs) const;
    void synthesize(std::span<const double> coeffs, std::span<double> values) const;
    void analyze_transpose(std::span<const double> coeffs, std::span<double> values) const;

    /// Transform along the given axes only, in the given order.
    void analyze_axes(std::span<double> data, std::span<const std::size_t> order) const;

private:
    enum class Op { Analyze, Synthesize, AnalyzeT };
    void apply_axis(std::span<double> data, std::size_t axis, Op op) const;

    std::vector<Dct1d> axes_;
    std::vector<std::size_t> shape_;
    std::size_t total_ = 1;
};

Tensor dct_nd(const Tensor& values, std::span<const BoundaryType> boundaries);
Tensor idct_nd(const Tensor& coeffs, std::span<const BoundaryType> boundaries);

void require_finite(std::span<const double> values, std::string_view what);

}  // namespace cheblat
