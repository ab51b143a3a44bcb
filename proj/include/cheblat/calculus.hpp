#pragma once

#include "cheblat/lattice.hpp"
#include "cheblat/transform.hpp"

#include <memory>
#include <span>
#include <vector>

namespace cheblat {

class Interpolant {
public:
    Interpolant(std::shared_ptr<const TransformPlan> plan, std::vector<double> coeffs);

    const TransformPlan& plan() const { return *plan_; }
    std::shared_ptr<const TransformPlan> plan_ptr() const { return plan_; }
    const ChebyshevLattice& lattice() const { return plan_->lattice(); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    int dim() const { return lattice().dim(); }

private:
    std::shared_ptr<const TransformPlan> plan_;
    std::vector<double> coeffs_;
};

Interpolant interpolate(std::shared_ptr<const TransformPlan> plan, std::span<const double> samples);

/// Values of every basis element at x in [-1,1]^d, in basis order.
void basis_values(const ChebyshevLattice& lat, std::span<const double> x, std::vector<double>& out);

/// Value of the interpolant at x in [-1,1]^d.
double evaluate(const Interpolant& p, std::span<const double> x);
std::vector<double> evaluate_many(const Interpolant& p, const std::vector<Point>& xs);

/// Per-axis chain structure of the expanded (tie-free) index set.
class DiffPlan {
public:
    explicit DiffPlan(std::shared_ptr<const TransformPlan> plan);

    const TransformPlan& plan() const { return *plan_; }
    /// Expanded indices: every plain basis index plus every tie member.
    const std::vector<MultiIndex>& pure() const { return pure_; }
    /// pure() order sorted by the other axes, then by `axis`.
    const std::vector<std::size_t>& permutation(int axis) const { return axes_[axis].perm; }
    /// Chain boundaries into permutation(axis).
    const std::vector<std::size_t>& chains(int axis) const { return axes_[axis].chain_begin; }
    /// Number of derivative outputs that fall outside the basis and are
    /// mapped back by aliasing.
    std::size_t projected_outputs(int axis) const { return axes_[axis].projected; }

    std::vector<double> apply(std::span<const double> coeffs, int axis) const;

private:
    struct Target {
        std::size_t pos;  // basis position for plain outputs
        std::vector<std::pair<std::size_t, double>> alias;  // otherwise
    };
    struct Axis {
        std::vector<std::size_t> perm;
        std::vector<std::size_t> chain_begin;  // size = #chains + 1
        std::vector<int> chain_max;            // highest degree in the chain
        std::vector<std::size_t> target_begin; // into targets, per chain (degrees 0..max-1)
        std::vector<Target> targets;
        std::size_t projected = 0;
    };

    std::shared_ptr<const TransformPlan> plan_;
    std::vector<MultiIndex> pure_;
    std::vector<std::size_t> pure_elem_;    // basis element owning each pure index
    std::vector<double> pure_weight_;       // sign / g for tie members, 1 otherwise
    std::vector<Axis> axes_;
};

Interpolant differentiate(const Interpolant& p, int axis);
Interpolant differentiate(const DiffPlan& plan, const Interpolant& p, int axis);

/// Integral over [-1,1] of T_m.
double chebyshev_integral(int m);
/// Integral over [-1,1]^d of each basis element.
std::vector<double> basis_integrals(const ChebyshevLattice& lat);

struct QuadratureStencil {
    std::shared_ptr<const ChebyshevLattice> lattice;
    std::vector<double> weights;
};

QuadratureStencil quadrature_stencil(const TransformPlan& plan);
double integrate(const QuadratureStencil& stencil, std::span<const double> samples);

struct Rule1d {
    std::vector<double> nodes;
    std::vector<double> weights;
};

struct TensorRule {
    int dim = 0;
    std::vector<Point> nodes;
    std::vector<double> weights;
};

Rule1d gauss_legendre(int n);
TensorRule gauss_legendre(int n, int dim);
/// Clenshaw-Curtis weights on the n-point type-I grid (nodes ordered as nodes_1d).
std::vector<double> clenshaw_curtis_weights(int n);

}  // namespace cheblat
