#pragma once

#include <vector>

#include "dmpair/pairing.hpp"

namespace dmpair {

/// Superlevel-set machinery for piecewise-affine BV functions: at a regular
/// value t the reduced boundary of {u > t} consists of iso-line chords
/// inside cells and portions of jump segments where the traces straddle t,
/// all oriented by the interior normal of the superlevel set.
class LevelSetFamily {
public:
    explicit LevelSetFamily(const BVFunc& u);

    /// Values at which the structure of {u > t} changes: cell-vertex values
    /// of u and one-sided trace values at jump-segment endpoints.
    const std::vector<double>& critical_values() const { return critical_; }
    double min_value() const { return critical_.front(); }
    double max_value() const { return critical_.back(); }

    /// The reduced boundary of {u > t} inside the window, for regular t.
    /// Each segment's normal is the interior normal of the superlevel set.
    std::vector<OrientedSegment> boundary(double t) const;

private:
    const BVFunc* u_;
    std::vector<double> critical_;
};

struct CoareaResult {
    double lhs;  // (A, Du)(B)
    double rhs;  // integral over t of (A, D chi_{u>t})(B)
    double residual() const { return std::abs(lhs - rhs); }
};

/// The coarea disintegration of the pairing over superlevel sets,
/// evaluated on B. u must be piecewise affine; the t-integration uses
/// 32-point Gauss-Legendre on each interval between consecutive critical
/// values.
CoareaResult coarea_decompose(const PiecewiseVectorField& A, const BVFunc& u, const RegionSpec& B,
                              const QuadratureOptions& opt = {});

/// (A, D chi_{u>t}) as a measure for a regular value t.
GenMeasure superlevel_pairing(const PiecewiseVectorField& A, const BVFunc& u, double t);

/// Chain rule: the pairing (A, Dh(u)) assembled from h' and the jump
/// quotient, without forming h(u) as a BVFunc. `h` is an expression in the
/// variable x, locally Lipschitz on the range of u. theta_preserved is set
/// when h is non-decreasing on the sampled range (the density of the
/// pairing against |Dh(u)| then agrees with the one for u).
struct ChainRuleResult {
    PairingMeasure pairing;
    bool theta_preserved;
};
ChainRuleResult chain_rule(const PiecewiseVectorField& A, const BVFunc& u, const Expr& h);

/// Truncation at level k > 0: clamps u to [-k, k], splitting cells along
/// the iso-lines u = +-k. Requires the crossing pieces to be affine.
BVFunc truncate(const BVFunc& u, double k);

/// A formula/direct pair for the product identities; the contract of each
/// operation is that the two measures agree.
struct ProductPairingResult {
    GenMeasure formula;
    GenMeasure direct;
};

/// (uA, Du) = u*(A, Du) + ((u+ - u-)^2/4) Div A restricted to J_u,
/// checked against the direct pairing of the product field.
ProductPairingResult self_product_pairing(const PiecewiseVectorField& A, const BVFunc& u);

/// (vA, Du) = v*(A, Du) + ((u+ - u-)(v+ - v-)/4) Div A restricted to
/// J_u intersect J_v, checked against the direct pairing.
ProductPairingResult product_pairing(const BVFunc& v, const PiecewiseVectorField& A,
                                     const BVFunc& u);

/// Leibniz: (A, D(uv)) = v*(A, Du) + u*(A, Dv), checked against the direct
/// pairing of uv.
ProductPairingResult leibniz(const PiecewiseVectorField& A, const BVFunc& u, const BVFunc& v);

}  // namespace dmpair
