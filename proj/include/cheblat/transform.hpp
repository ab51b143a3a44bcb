#pragma once

#include "cheblat/dct.hpp"
#include "cheblat/lattice.hpp"

#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace cheblat {

/// Inverse of a class response matrix. Classes with identical response
/// patterns share one entry.
struct AliasingMatrix {
    MultiIndex class_key;             // first class that produced this pattern
    std::size_t m = 0;
    std::vector<double> response;     // A, row-major m x m
    std::vector<double> M;            // A^{-1}, row-major m x m
    std::vector<MultiIndex> members;  // basis indices of that first class
    double condition = 1.0;
    std::size_t uses = 0;
};

class TransformPlan {
public:
    explicit TransformPlan(std::shared_ptr<const ChebyshevLattice> lattice);
    explicit TransformPlan(ChebyshevLattice lattice);

    const ChebyshevLattice& lattice() const { return *lat_; }
    std::shared_ptr<const ChebyshevLattice> lattice_ptr() const { return lat_; }
    std::size_t size() const { return lat_->size(); }

    const std::vector<AliasingMatrix>& matrices() const { return table_; }
    std::size_t matrix_of_class(std::size_t c) const { return class_matrix_[c]; }

    /// Samples at lattice points -> interpolant coefficients (basis order).
    std::vector<double> forward(std::span<const double> samples) const;
    void forward(std::span<const double> samples, std::span<double> coeffs) const;
    /// Coefficients -> values at lattice points.
    std::vector<double> inverse(std::span<const double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> samples) const;
    /// Transpose of forward: <phi, forward(s)> = <adjoint(phi), s>.
    std::vector<double> adjoint(std::span<const double> functional) const;
    void adjoint(std::span<const double> functional, std::span<double> weights) const;

    /// Heterogeneous transform for Padua lattices; avoids type-V DCTs.
    std::vector<double> forward_padua(std::span<const double> samples) const;
    bool has_padua_path() const { return padua_ != nullptr; }

    /// Interpolant coefficients of the lattice samples of C_k, as sparse
    /// (basis position, value) pairs.
    std::vector<std::pair<std::size_t, double>> alias_project(const MultiIndex& k) const;

private:
    struct PaduaPath;
    void init();
    void init_padua();

    std::shared_ptr<const ChebyshevLattice> lat_;
    std::vector<DctNd> dcts_;
    std::vector<AliasingMatrix> table_;
    std::vector<std::size_t> class_matrix_;
    std::shared_ptr<const PaduaPath> padua_;
};

/// Dense Vandermonde solve V c = samples with V_ij = (basis element j)(point i).
std::vector<double> dense_oracle(const ChebyshevLattice& lat, std::span<const double> samples);
/// 2-norm condition number of the Vandermonde matrix.
double vandermonde_condition(const ChebyshevLattice& lat);

inline constexpr std::size_t kDenseOracleLimit = 2000;

}  // namespace cheblat
