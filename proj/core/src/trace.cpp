#include "dmpair/trace.hpp"

#include <cmath>

namespace dmpair {

double TraceFunc::value(const Vec2& p) const
{
    for (const auto& st : segments_) {
        if (!on_segment(p, st.seg.a, st.seg.b)) continue;
        if ((p - st.seg.a).norm() <= kGeomEps || (p - st.seg.b).norm() <= kGeomEps) continue;
        return eval_at(st.trace, p);
    }
    throw Error("trace is defined at segment-interior points of the interface only");
}

GenMeasure TraceFunc::as_measure() const
{
    GenMeasure m;
    for (const auto& st : segments_) m.add_line(st.seg, st.trace);
    return m;
}

OrientedInterface split_on_partition(const OrientedInterface& sigma,
                                     const PolygonalPartition& partition)
{
    std::vector<Vec2> points;
    for (const auto& s : sigma.segments()) {
        for (const auto& v : partition.vertices_on(s.as_segment())) points.push_back(v);
    }
    return sigma.split_at(points);
}

TraceFunc normal_trace(const PiecewiseVectorField& A, const OrientedInterface& sigma, int side)
{
    if (side != +1 && side != -1) throw Error("trace side must be +1 or -1");
    std::vector<TraceFunc::SegmentTrace> out;
    out.reserve(sigma.size());
    for (const auto& s : sigma.segments()) {
        const std::size_t region = A.partition().locate_side(s, side);
        const Expr trace = A.components(region)[0] * Expr::constant(s.normal.x) +
                           A.components(region)[1] * Expr::constant(s.normal.y);
        out.push_back({s, trace});
    }
    return TraceFunc(std::move(out), side);
}

TraceFunc trace_of_scalar_product(const BVFunc& u, const PiecewiseVectorField& A,
                                  const OrientedInterface& sigma, int side)
{
    // The interface may cross vertices of u's partition even when it is
    // conforming for A; refine first.
    const OrientedInterface refined = split_on_partition(sigma, u.partition());
    TraceFunc base = normal_trace(A, refined, side);
    std::vector<TraceFunc::SegmentTrace> out;
    out.reserve(base.segments().size());
    for (const auto& st : base.segments()) {
        const Expr u_side = u.side_expr(st.seg, side);
        out.push_back({st.seg, u_side * st.trace});
    }
    return TraceFunc(std::move(out), side);
}

double jump_identity_residual(const PiecewiseVectorField& A, const OrientedInterface& sigma,
                              const TestFunc& phi, const QuadratureOptions& opt)
{
    const OrientedInterface refined = split_on_partition(sigma, A.partition());
    const double lhs = A.divergence_measure()
                           .restricted(RegionSpec::interface_restriction(refined))
                           .pair_test(phi, opt);

    const TraceFunc plus = normal_trace(A, refined, +1);
    const TraceFunc minus = normal_trace(A, refined, -1);
    GenMeasure jump;
    for (std::size_t i = 0; i < refined.size(); ++i) {
        jump.add_line(refined.segment(i),
                      plus.segments()[i].trace - minus.segments()[i].trace);
    }
    const double rhs = jump.pair_test(phi, opt);
    return std::abs(lhs - rhs);
}

double trace_definition_check(const PiecewiseVectorField& A, const Polygon& omega_prime,
                              const TestFunc& phi, const QuadratureOptions& opt)
{
    const OrientedInterface boundary =
        split_on_partition(reduced_boundary(omega_prime), A.partition());

    // Trace from inside against the outward normal. The reduced boundary is
    // oriented by the interior normal, so the inner side is +1 and the
    // outward-normal trace is the negated inner trace.
    const TraceFunc inner = normal_trace(A, boundary, +1);
    double lhs = 0.0;
    for (const auto& st : inner.segments()) {
        const PointFunc f = [&](const Vec2& p) {
            return -eval_at(st.trace, p) * eval_at(phi.expr(), p);
        };
        for (const auto& piece : clip_segment_to_polygon(st.seg.as_segment(), phi.support()))
            lhs += integrate_segment(f, piece.seg.a, piece.seg.b, opt);
    }

    // int_inside A . grad phi, cell by cell, clipped against both the open
    // polygon and the support of phi.
    double bulk = 0.0;
    for (std::size_t i = 0; i < A.partition().size(); ++i) {
        const Expr integrand =
            A.components(i)[0] * phi.dx() + A.components(i)[1] * phi.dy();
        const PointFunc f = [&](const Vec2& p) { return eval_at(integrand, p); };
        for (auto& piece : intersect_polygons(A.partition().cells()[i], omega_prime)) {
            const Polygon piece_poly(std::move(piece));
            for (auto& conv : intersect_polygons(piece_poly, phi.support())) {
                for (std::size_t k = 1; k + 1 < conv.size(); ++k) {
                    Triangle t{conv[0], conv[k], conv[k + 1]};
                    if (t.area() > kGeomEps * kGeomEps) bulk += integrate_triangle(f, t, opt);
                }
            }
        }
    }

    const double div_term = A.divergence_measure()
                                .restricted(RegionSpec::interior(omega_prime))
                                .pair_test(phi, opt);

    return std::abs(lhs - (bulk + div_term));
}

}  // namespace dmpair
