#pragma once

#include "cheblat/dct.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cheblat {

enum class Family { Cartesian, Padua, Hex, BCC, FCC, CompositeOct7 };

std::string_view to_string(Family f);
Family family_from_string(std::string_view name);
bool is_bravais(Family f);

/// Per-axis Chebyshev degrees. Unused trailing entries are zero.
struct MultiIndex {
    std::array<int, 3> k{};
    int dim = 0;

    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> v);
    static MultiIndex zero(int dim);

    int operator[](int i) const { return k[i]; }
    int& operator[](int i) { return k[i]; }
    std::int64_t norm2() const;
    double norm() const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        return a.dim == b.dim && a.k == b.k;
    }
    /// Storage order: squared Euclidean degree, then lexicographic.
    friend bool operator<(const MultiIndex& a, const MultiIndex& b);
};

struct ReciprocalBasis {
    int dim = 0;
    std::array<std::array<std::int64_t, 3>, 3> Q{};  // rows are generators
    int scale = 1;

    std::int64_t det() const;
    std::array<std::array<std::int64_t, 3>, 3> adjugate() const;
    /// P = 2 pi Q^{-T}; P Q^T = 2 pi I.
    std::array<std::array<double, 3>, 3> real_space() const;
    /// Q adj(Q) == det(Q) I in integer arithmetic.
    bool exact_duality() const;
};

/// Tensor grid theta_i = 2 pi (z + s_i/2) / N_i restricted to [0, pi] per axis.
struct CartesianSublattice {
    int dim = 0;
    std::array<int, 3> periods{};
    std::array<int, 3> shifts{};

    int count(int axis) const { return node_count(periods[axis], shifts[axis]); }
    BoundaryType boundary(int axis) const { return boundary_of(periods[axis], shifts[axis]); }
    std::vector<int> counts() const;
    std::vector<BoundaryType> boundaries() const;
    std::size_t size() const;
};

/// Combination element (1/g) sum_i signs_i C_{members_i}; members_[0] is canonical.
struct TieGroup {
    std::vector<MultiIndex> members;
    std::vector<int> signs;
};

struct BasisElement {
    MultiIndex index;
    int tie = -1;  // index into ties(), or -1 for a plain C_k
};

/// One block of the interpolation system: the DCT coefficients of all
/// sublattices at the listed equations depend only on the listed basis
/// elements, through the m x m response matrix.
struct AliasClass {
    MultiIndex key;
    std::vector<int> eq_sublattice;
    std::vector<std::size_t> eq_offset;  // flat index into that sublattice's tensor
    std::vector<std::size_t> elements;   // basis positions
    std::vector<double> response;        // row-major, rows = equations

    std::size_t size() const { return elements.size(); }
};

using Point = std::array<double, 3>;

class ChebyshevLattice {
public:
    Family family() const { return family_; }
    int dim() const { return dim_; }
    int resolution() const { return resolution_; }
    std::size_t size() const { return points_.size(); }

    const std::vector<CartesianSublattice>& sublattices() const { return subs_; }
    std::size_t sublattice_begin(std::size_t j) const { return sub_begin_[j]; }

    const std::vector<Point>& points() const { return points_; }
    const std::vector<Point>& thetas() const { return thetas_; }

    const std::vector<BasisElement>& basis() const { return basis_; }
    const std::vector<TieGroup>& ties() const { return ties_; }
    const std::vector<AliasClass>& classes() const { return classes_; }
    /// (class, position within class) of a basis element.
    std::pair<std::size_t, std::size_t> class_of(std::size_t basis_pos) const {
        return elem_class_[basis_pos];
    }

    const ReciprocalBasis& reciprocal() const { return recip_; }
    /// Number of points per unit cell; the basis is the union of that many Brillouin zones.
    int brillouin_order() const { return order_; }
    /// Cell offsets in units of the translation spacing (composite lattices).
    const std::vector<Point>& cell_offsets() const { return cell_offsets_; }
    std::array<int, 3> class_modulus() const { return modulus_; }

    std::optional<std::size_t> find(const MultiIndex& k) const;

    /// Value of basis element b at angle vector theta.
    double basis_value(std::size_t b, const double* theta) const;

    /// DCT response of a pure C_k over the equations of its class.
    /// Returns the class position, or nullopt if the class has no equations.
    std::optional<std::size_t> response(const MultiIndex& k, std::vector<double>& col) const;

    /// Number of same-norm groups that could only be partially accepted.
    int partial_ties() const { return partial_ties_; }

private:
    friend ChebyshevLattice build_custom(Family, int, int, std::vector<CartesianSublattice>,
                                         ReciprocalBasis, int, std::vector<Point>);
    ChebyshevLattice() = default;
    void generate_points();
    void generate_basis();

    Family family_ = Family::Cartesian;
    int dim_ = 0;
    int resolution_ = 0;
    int order_ = 1;
    std::vector<CartesianSublattice> subs_;
    std::vector<std::size_t> sub_begin_;
    std::vector<Point> points_;
    std::vector<Point> thetas_;
    std::vector<BasisElement> basis_;
    std::vector<TieGroup> ties_;
    std::vector<AliasClass> classes_;
    std::vector<std::pair<std::size_t, std::size_t>> elem_class_;
    ReciprocalBasis recip_;
    std::vector<Point> cell_offsets_;
    std::array<int, 3> modulus_{};
    int partial_ties_ = 0;
    std::unordered_map<std::int64_t, std::size_t> lookup_;
    std::unordered_map<std::int64_t, std::size_t> class_lookup_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> eq_row_;  // [sub][offset] -> (class, row)
};

ChebyshevLattice build(Family family, int dim, int resolution);
/// Cartesian product of type-I grids with the given per-axis node counts.
ChebyshevLattice build_cartesian(std::span<const int> counts);
/// Lattice from an explicit sublattice list. Used for the named families and
/// for synthetic configurations in tests.
ChebyshevLattice build_custom(Family family, int dim, int resolution,
                              std::vector<CartesianSublattice> subs, ReciprocalBasis recip,
                              int order, std::vector<Point> cell_offsets = {});

const ReciprocalBasis& reciprocal_basis(const ChebyshevLattice& lat);
std::vector<MultiIndex> basis_indices(const ChebyshevLattice& lat);
std::vector<CartesianSublattice> decompose(const ChebyshevLattice& lat);

struct AliasingClassInfo {
    MultiIndex canonical;  // basis element the index folds onto
    int sign = 0;          // C_k == sign * element on the lattice; 0 if k is not a pure alias
    std::vector<MultiIndex> members;  // all indices up to the radius with C_j == +-C_k on the lattice
};

/// Indices indistinguishable (up to sign) from k on the lattice, with norm
/// at most `radius` (defaults to the norm of k).
AliasingClassInfo aliasing_class(const ChebyshevLattice& lat, const MultiIndex& k,
                                 double radius = -1.0);

struct BrillouinRegion {
    std::vector<MultiIndex> indices;   // non-negative orthant
    std::vector<bool> on_boundary;     // some other frequency ties the rank cutoff
};

/// Non-negative frequencies k whose rank 1 + #{l != 0 : |k + l| < |k|} is at most m.
BrillouinRegion brillouin_union(const ReciprocalBasis& recip, int m);

/// Inradius of the union of the first m Brillouin zones.
double brillouin_inradius(const ReciprocalBasis& recip, int m);

/// V_d(r) / (m |det Q|): inscribed ball volume over basis volume.
double efficiency(const ChebyshevLattice& lat);
/// Efficiency scaled by the inradius of the basis region projected along `axis`.
double boundary_efficiency(const ChebyshevLattice& lat, int axis);
/// Smallest norm of a non-negative index not represented in the basis.
double euclidean_degree(const ChebyshevLattice& lat);
/// V_d(euclidean_degree) / (2^d npoints).
double discrete_efficiency(const ChebyshevLattice& lat);

double ball_volume(int dim, double r);

}  // namespace cheblat
