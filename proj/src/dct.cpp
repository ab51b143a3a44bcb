#include "cheblat/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cheblat {

namespace {

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::string_view to_string(BoundaryType b) {
    switch (b) {
        case BoundaryType::TypeI: return "I";
        case BoundaryType::TypeII: return "II";
        case BoundaryType::TypeVminus: return "V-";
        case BoundaryType::TypeVplus: return "V+";
    }
    return "?";
}

BoundaryType boundary_from_string(std::string_view name) {
    if (name == "I") return BoundaryType::TypeI;
    if (name == "II") return BoundaryType::TypeII;
    if (name == "V-") return BoundaryType::TypeVminus;
    if (name == "V+") return BoundaryType::TypeVplus;
    throw std::invalid_argument("unknown boundary type '" + std::string(name) + "'");
}

int torus_period(int n, BoundaryType b) {
    switch (b) {
        case BoundaryType::TypeI: return 2 * (n - 1);
        case BoundaryType::TypeII: return 2 * n;
        case BoundaryType::TypeVminus:
        case BoundaryType::TypeVplus: return 2 * n - 1;
    }
    return 0;
}

int torus_shift(BoundaryType b) {
    return (b == BoundaryType::TypeII || b == BoundaryType::TypeVplus) ? 1 : 0;
}

BoundaryType boundary_of(int period, int shift) {
    if (period % 2 == 0) return shift ? BoundaryType::TypeII : BoundaryType::TypeI;
    return shift ? BoundaryType::TypeVplus : BoundaryType::TypeVminus;
}

int node_count(int period, int shift) { return (period - shift) / 2 + 1; }

static void check_count(int n, BoundaryType b) {
    const int min_n = (b == BoundaryType::TypeI) ? 2 : 1;
    if (n < min_n) {
        throw std::invalid_argument("node count " + std::to_string(n) + " is invalid for type " +
                                    std::string(to_string(b)) + " (minimum " +
                                    std::to_string(min_n) + ")");
    }
}

Grid1D nodes_1d(int n, BoundaryType boundary) {
    check_count(n, boundary);
    Grid1D g;
    g.n = n;
    g.boundary = boundary;
    const int N = torus_period(n, boundary);
    const int s = torus_shift(boundary);
    g.thetas.resize(n);
    g.xs.resize(n);
    for (int i = 0; i < n; ++i) {
        // (2i+s)/N in units of pi; endpoints are hit exactly.
        const int num = 2 * i + s;
        double t;
        if (num == 0) {
            t = 0.0;
        } else if (num == N) {
            t = std::numbers::pi;
        } else {
            t = std::numbers::pi * static_cast<double>(num) / static_cast<double>(N);
        }
        g.thetas[i] = t;
        if (num == 0) {
            g.xs[i] = 1.0;
        } else if (num == N) {
            g.xs[i] = -1.0;
        } else if (2 * num == N) {
            g.xs[i] = 0.0;
        } else {
            g.xs[i] = std::cos(t);
        }
    }
    return g;
}

// ---------------------------------------------------------------------------

FftPlan::FftPlan(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("FFT length must be positive");
    std::lock_guard lock(planner_mutex());
    auto* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* b = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd_ = fftw_plan_dft_1d(n, a, b, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
    if (!fwd_ || !bwd_) throw std::runtime_error("FFTW planning failed");
}

FftPlan::~FftPlan() {
    std::lock_guard lock(planner_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void FftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::backward(const std::complex<double>* in, std::complex<double>* out) const {
    fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

// ---------------------------------------------------------------------------

Dct1d::Dct1d(int n, BoundaryType boundary)
    : n_(n), boundary_(boundary), period_(0), shift_(torus_shift(boundary)) {
    check_count(n, boundary);
    period_ = torus_period(n, boundary);
    fft_ = std::make_shared<const FftPlan>(period_);

    mode_weight_.resize(n);
    for (int k = 0; k < n; ++k) {
        const int mult = 1 + (k == 0 ? 1 : 0) + (2 * k == period_ ? 1 : 0);
        mode_weight_[k] = 4.0 / (static_cast<double>(period_) * mult);
    }
    node_weight_.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        const int num = 2 * i + shift_;
        if (num == 0 || num == period_) node_weight_[i] = 0.5;
    }
    twiddle_.resize(n);
    for (int k = 0; k < n; ++k) {
        if (shift_ == 0) {
            twiddle_[k] = 1.0;
        } else {
            const double phase = std::numbers::pi * k / static_cast<double>(period_);
            twiddle_[k] = std::polar(1.0, phase);
        }
    }
}

void Dct1d::analyze(const double* in, double* out, std::complex<double>* work) const {
    std::complex<double>* buf = work;
    std::complex<double>* spec = work + period_;
    for (int i = 0; i < n_; ++i) buf[i] = node_weight_[i] * in[i];
    for (int i = n_; i < period_; ++i) buf[i] = 0.0;
    fft_->forward(buf, spec);
    for (int k = 0; k < n_; ++k) out[k] = mode_weight_[k] * (std::conj(twiddle_[k]) * spec[k]).real();
}

void Dct1d::synthesize(const double* in, double* out, std::complex<double>* work) const {
    std::complex<double>* buf = work;
    std::complex<double>* vals = work + period_;
    for (int k = 0; k < n_; ++k) buf[k] = in[k] * twiddle_[k];
    for (int k = n_; k < period_; ++k) buf[k] = 0.0;
    fft_->backward(buf, vals);
    for (int i = 0; i < n_; ++i) out[i] = vals[i].real();
}

void Dct1d::analyze_transpose(const double* in, double* out, std::complex<double>* work) const {
    std::complex<double>* buf = work;
    std::complex<double>* vals = work + period_;
    for (int k = 0; k < n_; ++k) buf[k] = mode_weight_[k] * in[k] * twiddle_[k];
    for (int k = n_; k < period_; ++k) buf[k] = 0.0;
    fft_->backward(buf, vals);
    for (int i = 0; i < n_; ++i) out[i] = node_weight_[i] * vals[i].real();
}

static void check_len(std::size_t got, int want, const char* what) {
    if (got != static_cast<std::size_t>(want)) {
        throw std::invalid_argument(std::string(what) + ": length " + std::to_string(got) +
                                    " does not match grid size " + std::to_string(want));
    }
}

void Dct1d::analyze(std::span<const double> values, std::span<double> coeffs) const {
    check_len(values.size(), n_, "dct");
    check_len(coeffs.size(), n_, "dct output");
    std::vector<std::complex<double>> work(work_size());
    analyze(values.data(), coeffs.data(), work.data());
}

void Dct1d::synthesize(std::span<const double> coeffs, std::span<double> values) const {
    check_len(coeffs.size(), n_, "idct");
    check_len(values.size(), n_, "idct output");
    std::vector<std::complex<double>> work(work_size());
    synthesize(coeffs.data(), values.data(), work.data());
}

void Dct1d::analyze_transpose(std::span<const double> coeffs, std::span<double> values) const {
    check_len(coeffs.size(), n_, "dct transpose");
    check_len(values.size(), n_, "dct transpose output");
    std::vector<std::complex<double>> work(work_size());
    analyze_transpose(coeffs.data(), values.data(), work.data());
}

void require_finite(std::span<const double> values, std::string_view what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw std::invalid_argument(std::string(what) + ": non-finite value at index " +
                                        std::to_string(i));
        }
    }
}

SpectralVector dct_1d(std::span<const double> values, BoundaryType boundary) {
    require_finite(values, "dct_1d");
    Dct1d plan(static_cast<int>(values.size()), boundary);
    SpectralVector out(values.size());
    plan.analyze(values, out);
    return out;
}

std::vector<double> idct_1d(std::span<const double> coeffs, BoundaryType boundary) {
    Dct1d plan(static_cast<int>(coeffs.size()), boundary);
    std::vector<double> out(coeffs.size());
    plan.synthesize(coeffs, out);
    return out;
}

static BoundaryType variant_type(TypeVVariant v) {
    return v == TypeVVariant::Vminus ? BoundaryType::TypeVminus : BoundaryType::TypeVplus;
}

SpectralVector dct_typeV(std::span<const double> values, TypeVVariant variant) {
    if (values.empty()) throw std::invalid_argument("dct_typeV: empty input");
    return dct_1d(values, variant_type(variant));
}

std::vector<double> idct_typeV(std::span<const double> coeffs, TypeVVariant variant) {
    if (coeffs.empty()) throw std::invalid_argument("idct_typeV: empty input");
    return idct_1d(coeffs, variant_type(variant));
}

// ---------------------------------------------------------------------------

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    std::size_t total = 1;
    for (auto e : shape) total *= e;
    data.assign(total, 0.0);
}

DctNd::DctNd(std::span<const Dct1d> axes) : axes_(axes.begin(), axes.end()) {
    for (const auto& a : axes_) {
        shape_.push_back(static_cast<std::size_t>(a.size()));
        total_ *= static_cast<std::size_t>(a.size());
    }
}

DctNd::DctNd(std::span<const int> counts, std::span<const BoundaryType> boundaries) {
    if (counts.size() != boundaries.size()) {
        throw std::invalid_argument("DctNd: counts and boundaries differ in rank");
    }
    axes_.reserve(counts.size());
    for (std::size_t a = 0; a < counts.size(); ++a) {
        axes_.emplace_back(counts[a], boundaries[a]);
        shape_.push_back(static_cast<std::size_t>(counts[a]));
        total_ *= static_cast<std::size_t>(counts[a]);
    }
}

void DctNd::apply_axis(std::span<double> data, std::size_t axis, Op op) const {
    const Dct1d& plan = axes_[axis];
    const std::size_t len = shape_[axis];
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape_.size(); ++a) stride *= shape_[a];
    const std::size_t outer = total_ / (len * stride);

    std::vector<std::complex<double>> work(plan.work_size());
    std::vector<double> line(len), res(len);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t t = 0; t < stride; ++t) {
            double* base = data.data() + o * len * stride + t;
            for (std::size_t i = 0; i < len; ++i) line[i] = base[i * stride];
            switch (op) {
                case Op::Analyze: plan.analyze(line.data(), res.data(), work.data()); break;
                case Op::Synthesize: plan.synthesize(line.data(), res.data(), work.data()); break;
                case Op::AnalyzeT: plan.analyze_transpose(line.data(), res.data(), work.data()); break;
            }
            for (std::size_t i = 0; i < len; ++i) base[i * stride] = res[i];
        }
    }
}

void DctNd::analyze(std::span<const double> values, std::span<double> coeffs) const {
    if (values.size() != total_ || coeffs.size() != total_) {
        throw std::invalid_argument("dct_nd: tensor size does not match grid shape");
    }
    std::copy(values.begin(), values.end(), coeffs.begin());
    for (std::size_t a = axes_.size(); a-- > 0;) apply_axis(coeffs, a, Op::Analyze);
}

void DctNd::synthesize(std::span<const double> coeffs, std::span<double> values) const {
    if (values.size() != total_ || coeffs.size() != total_) {
        throw std::invalid_argument("idct_nd: tensor size does not match grid shape");
    }
    std::copy(coeffs.begin(), coeffs.end(), values.begin());
    for (std::size_t a = axes_.size(); a-- > 0;) apply_axis(values, a, Op::Synthesize);
}

void DctNd::analyze_transpose(std::span<const double> coeffs, std::span<double> values) const {
    if (values.size() != total_ || coeffs.size() != total_) {
        throw std::invalid_argument("dct_nd transpose: tensor size does not match grid shape");
    }
    std::copy(coeffs.begin(), coeffs.end(), values.begin());
    for (std::size_t a = axes_.size(); a-- > 0;) apply_axis(values, a, Op::AnalyzeT);
}

void DctNd::analyze_axes(std::span<double> data, std::span<const std::size_t> order) const {
    if (data.size() != total_) throw std::invalid_argument("dct_nd: tensor size mismatch");
    for (auto a : order) {
        if (a >= axes_.size()) throw std::invalid_argument("dct_nd: axis out of range");
        apply_axis(data, a, Op::Analyze);
    }
}

static std::vector<int> counts_of(const Tensor& t, std::span<const BoundaryType> boundaries) {
    if (t.shape.size() != boundaries.size()) {
        throw std::invalid_argument("dct_nd: tensor rank " + std::to_string(t.shape.size()) +
                                    " does not match " + std::to_string(boundaries.size()) +
                                    " boundary types");
    }
    std::size_t total = 1;
    std::vector<int> counts;
    for (auto e : t.shape) {
        counts.push_back(static_cast<int>(e));
        total *= e;
    }
    if (total != t.data.size()) throw std::invalid_argument("dct_nd: shape does not match data");
    return counts;
}

Tensor dct_nd(const Tensor& values, std::span<const BoundaryType> boundaries) {
    auto counts = counts_of(values, boundaries);
    require_finite(values.data, "dct_nd");
    DctNd plan(counts, boundaries);
    Tensor out(values.shape);
    plan.analyze(values.data, out.data);
    return out;
}

Tensor idct_nd(const Tensor& coeffs, std::span<const BoundaryType> boundaries) {
    auto counts = counts_of(coeffs, boundaries);
    DctNd plan(counts, boundaries);
    Tensor out(coeffs.shape);
    plan.synthesize(coeffs.data, out.data);
    return out;
}

}  // namespace cheblat
