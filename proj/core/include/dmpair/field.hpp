#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dmpair/expr.hpp"
#include "dmpair/geometry.hpp"
#include "dmpair/measure.hpp"

namespace dmpair {

/// An internal interface of a partition: a maximal collinear overlap of two
/// cell boundaries. The normal points into plus_region.
struct InterfaceEdge {
    OrientedSegment seg;
    std::size_t plus_region;
    std::size_t minus_region;
};

/// An edge-conforming polygonal partition of the working window. Cells may
/// meet in partial edge overlaps (T-junctions are tolerated); interfaces
/// are extracted as pairwise collinear overlaps of cell boundaries.
class PolygonalPartition {
public:
    PolygonalPartition(Window window, std::vector<Polygon> cells);

    const Window& window() const { return window_; }
    const std::vector<Polygon>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    const std::vector<InterfaceEdge>& interfaces() const { return interfaces_; }

    /// Index of the cell whose interior contains p, if any.
    std::optional<std::size_t> locate_interior(const Vec2& p) const;

    /// Cell adjacent to the segment on the side sign * normal. The segment
    /// must run along cell boundaries or inside a single cell.
    std::size_t locate_side(const OrientedSegment& s, int sign) const;

    /// All partition vertices lying in the interior of the given segment
    /// (used to pre-split interfaces before trace evaluation).
    std::vector<Vec2> vertices_on(const Segment& s) const;

    bool same_cells(const PolygonalPartition& other) const;

private:
    Window window_;
    std::vector<Polygon> cells_;
    std::vector<InterfaceEdge> interfaces_;
};

/// A piecewise-smooth bounded vector field on the window: one smooth
/// 2-vector expression per cell. Models the divergence-measure class at
/// desk scale; all singular behaviour of Div sits on the internal
/// interfaces.
class PiecewiseVectorField {
public:
    PiecewiseVectorField(PolygonalPartition partition, std::vector<std::array<Expr, 2>> components);

    const PolygonalPartition& partition() const { return partition_; }
    const std::array<Expr, 2>& components(std::size_t region) const { return comps_[region]; }

    Vec2 value_in_region(std::size_t region, const Vec2& p) const;
    /// Field value at an interior point of a cell; on an interface the
    /// average of the two one-sided values (the precise representative).
    Vec2 value_at(const Vec2& p) const;

    /// Div A as a measure: the pointwise divergence as area density per
    /// cell plus the normal jump (A+ - A-) . nu as line density on every
    /// internal interface.
    GenMeasure divergence_measure() const;

    /// The approximate discontinuity set: internal interfaces carrying a
    /// genuine jump of A (identically-continuous interfaces are dropped,
    /// based on a 64-point sample per segment).
    OrientedInterface discontinuity_set() const;

    /// Sampled sup norm over all cells (quadrature nodes of each cell).
    double sample_sup_norm() const;

private:
    PolygonalPartition partition_;
    std::vector<std::array<Expr, 2>> comps_;
};

/// One jump segment of a BV function; the normal points to the side whose
/// trace is u_plus, and segments are split/oriented so u_plus > u_minus
/// along each of them.
struct JumpSegment {
    OrientedSegment seg;
    Expr u_plus;
    Expr u_minus;
    std::size_t plus_region;
    std::size_t minus_region;
};

/// A piecewise-smooth BV function on the window: one smooth expression per
/// cell. Jump data (J_u, one-sided traces, orientation) is derived at
/// construction.
class BVFunc {
public:
    BVFunc(PolygonalPartition partition, std::vector<Expr> values);

    const PolygonalPartition& partition() const { return partition_; }
    const Expr& region_expr(std::size_t region) const { return values_[region]; }
    const std::vector<Expr>& region_exprs() const { return values_; }

    /// J_u with traces; segments where the traces agree identically are
    /// dropped, segments where the trace difference changes sign are split
    /// at its roots.
    const std::vector<JumpSegment>& jump_set() const { return jumps_; }
    OrientedInterface jump_interface() const;

    double value_at(const Vec2& p) const;

    /// The precise representative: the cell value off interfaces, the
    /// average of the one-sided traces at interface-interior points.
    /// Throws at partition vertices (an H^1-null set, deliberately outside
    /// the domain).
    double precise_representative(const Vec2& p) const;

    /// The expression of u* along a segment: (u+ + u-)/2 on jump segments,
    /// the ambient cell expression elsewhere.
    Expr precise_expr_on(const OrientedSegment& s) const;

    /// One-sided trace expression along a segment running on cell
    /// boundaries or inside a single cell; sign selects the side of the
    /// segment normal.
    Expr side_expr(const OrientedSegment& s, int sign) const;

    /// Du component-wise: gradient area densities plus (u+ - u-) nu line
    /// densities on J_u.
    std::array<GenMeasure, 2> gradient_measure() const;
    /// |Du|(B).
    double total_variation_Du(const RegionSpec& B, const QuadratureOptions& opt = {}) const;

    /// Polar direction of Du at a |Du|-generic point: grad u / |grad u| in
    /// a cell, sign(u+ - u-) nu_u at a jump-interior point. Throws where
    /// grad u vanishes off J_u.
    Vec2 polar_direction(const Vec2& p) const;

    double sample_sup_norm() const;
    std::pair<double, double> sample_range() const;

private:
    PolygonalPartition partition_;
    std::vector<Expr> values_;
    std::vector<JumpSegment> jumps_;
};

/// The product u A as a field. Requires a shared partition, except when one
/// factor lives on a single cell covering the window.
PiecewiseVectorField product_field(const BVFunc& u, const PiecewiseVectorField& A);

/// The indicator of a convex polygon as a BVFunc whose partition refines
/// `base` against E (cells inside E carry 1, outside 0).
BVFunc indicator_bv(const Polygon& E, const PolygonalPartition& base);

/// A with the complement (or the inside) of a convex polygon zeroed out:
/// chi_E A resp. chi_{W \ E} A, on a partition refined against E.
PiecewiseVectorField masked_field(const PiecewiseVectorField& A, const Polygon& E,
                                  bool keep_inside);

/// Pointwise algebra on a shared partition.
BVFunc bv_product(const BVFunc& u, const BVFunc& v);
BVFunc bv_compose(const Expr& h, const BVFunc& u);  // h in the variable x
BVFunc bv_constant(const PolygonalPartition& partition, double c);

}  // namespace dmpair
