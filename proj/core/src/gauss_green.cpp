#include "dmpair/gauss_green.hpp"

namespace dmpair {

GaussGreenReport gauss_green(const PiecewiseVectorField& A, const BVFunc& u, const Polygon& E,
                             const QuadratureOptions& opt)
{
    OrientedInterface boundary = reduced_boundary(E);
    boundary = split_on_partition(boundary, A.partition());
    boundary = split_on_partition(boundary, u.partition());

    const TraceFunc alpha_plus = normal_trace(A, boundary, +1);
    const TraceFunc alpha_minus = normal_trace(A, boundary, -1);

    GaussGreenReport report;
    GenMeasure rhs_plus, rhs_minus;
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        const OrientedSegment& seg = boundary.segment(i);
        const Expr up = u.side_expr(seg, +1);
        const Expr um = u.side_expr(seg, -1);
        rhs_plus.add_line(seg, alpha_plus.segments()[i].trace * up);
        rhs_minus.add_line(seg, alpha_minus.segments()[i].trace * um);

        const Vec2 mid = seg.midpoint();
        report.edges.push_back({seg, eval_at(alpha_plus.segments()[i].trace, mid),
                                eval_at(alpha_minus.segments()[i].trace, mid), eval_at(up, mid),
                                eval_at(um, mid)});
    }
    const RegionSpec whole = RegionSpec::window();
    report.rhs_interior = -rhs_plus.eval_on(whole, opt);
    report.rhs_closure = -rhs_minus.eval_on(whole, opt);

    GenMeasure interior_measure = multiply_by_precise(A.divergence_measure(), u);
    interior_measure += pairing_measure(A, u).total();
    report.lhs_interior = interior_measure.eval_on(RegionSpec::interior(E), opt);
    report.lhs_closure = interior_measure.eval_on(RegionSpec::interior_plus_boundary(E), opt);
    return report;
}

NormalTraceMeasures normal_trace_measures(const PiecewiseVectorField& A, const Polygon& E)
{
    OrientedInterface boundary = split_on_partition(reduced_boundary(E), A.partition());

    NormalTraceMeasures out;
    out.sigma_i = normal_trace(A, boundary, +1).as_measure();
    out.sigma_e = normal_trace(A, boundary, -1).as_measure();

    // Independent route: both masked fields and the indicator refine A's
    // partition against E the same way, so the pairings use the shared
    // partition path.
    const BVFunc chi = indicator_bv(E, A.partition());
    out.sigma_i_product =
        scale(2.0, pairing_measure(masked_field(A, E, true), chi).total());
    out.sigma_e_product =
        scale(2.0, pairing_measure(masked_field(A, E, false), chi).total());
    return out;
}

}  // namespace dmpair
