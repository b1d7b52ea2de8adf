#pragma once

#include <vector>

#include "dmpair/field.hpp"

namespace dmpair {

/// A weak normal trace on an oriented interface: one expression per
/// segment, valid at segment-interior points, together with the side tag.
/// For the piecewise-smooth class the weak trace coincides with the
/// classical one-sided limit dotted with the segment normal.
class TraceFunc {
public:
    struct SegmentTrace {
        OrientedSegment seg;
        Expr trace;
    };

    TraceFunc(std::vector<SegmentTrace> segments, int side)
        : segments_(std::move(segments)), side_(side)
    {
    }

    const std::vector<SegmentTrace>& segments() const { return segments_; }
    int side() const { return side_; }

    /// Trace value at a segment-interior point of the interface.
    double value(const Vec2& p) const;

    /// The trace as a measure density: trace * H^1 restricted to the
    /// interface.
    GenMeasure as_measure() const;

private:
    std::vector<SegmentTrace> segments_;
    int side_;
};

/// Split the interface at all vertices of the given partitions lying in
/// segment interiors (traces are never evaluated across a vertex).
OrientedInterface split_on_partition(const OrientedInterface& sigma,
                                     const PolygonalPartition& partition);

/// Tr^+/Tr^-(A, Sigma): the one-sided limit of A from the side into which
/// side*normal points, dotted with the normal. Segments must run along
/// partition edges or inside a single cell; segments through partition
/// vertices must be pre-split.
TraceFunc normal_trace(const PiecewiseVectorField& A, const OrientedInterface& sigma, int side);

/// Tr^|side|(uA, Sigma) = u^side Tr^side(A, Sigma) on J_u, and
/// u~ Tr^side(A, Sigma) away from it; computed as the side-matched product.
TraceFunc trace_of_scalar_product(const BVFunc& u, const PiecewiseVectorField& A,
                                  const OrientedInterface& sigma, int side);

/// Residual of the jump identity Div A restricted to Sigma =
/// (Tr^+ - Tr^-) H^1 restricted to Sigma, tested against phi.
double jump_identity_residual(const PiecewiseVectorField& A, const OrientedInterface& sigma,
                              const TestFunc& phi, const QuadratureOptions& opt = {});

/// Residual of the defining identity of the boundary trace on an open
/// polygon: <Tr(A, boundary), phi> = int_inside A . grad phi
/// + int_inside phi dDiv A, with the trace taken from inside against the
/// outward normal.
double trace_definition_check(const PiecewiseVectorField& A, const Polygon& omega_prime,
                              const TestFunc& phi, const QuadratureOptions& opt = {});

}  // namespace dmpair
