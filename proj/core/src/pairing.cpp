#include "dmpair/pairing.hpp"

#include <cmath>

namespace dmpair {

namespace {

// Area part of the pairing: A . grad u on intersections of the two
// partitions (cells coincide in the common case of a shared partition).
GenMeasure pairing_area_part(const PiecewiseVectorField& A, const BVFunc& u)
{
    GenMeasure ac;
    const bool shared = A.partition().same_cells(u.partition());
    for (std::size_t j = 0; j < u.partition().size(); ++j) {
        const Expr ux = u.region_expr(j).diff(Var::X);
        const Expr uy = u.region_expr(j).diff(Var::Y);
        if (ux.is_constant(0.0) && uy.is_constant(0.0)) continue;
        if (shared) {
            ac.add_area(u.partition().cells()[j],
                        A.components(j)[0] * ux + A.components(j)[1] * uy);
            continue;
        }
        for (std::size_t i = 0; i < A.partition().size(); ++i) {
            const Expr density = A.components(i)[0] * ux + A.components(i)[1] * uy;
            for (auto& piece :
                 intersect_polygons(A.partition().cells()[i], u.partition().cells()[j])) {
                ac.add_area(Polygon(std::move(piece)), density);
            }
        }
    }
    return ac;
}

}  // namespace

PairingMeasure pairing_measure(const PiecewiseVectorField& A, const BVFunc& u)
{
    GenMeasure ac = pairing_area_part(A, u);

    GenMeasure jump;
    std::vector<PairingMeasure::JumpDensity> densities;
    for (const auto& j : u.jump_set()) {
        // Traces of A may change expression across its own partition
        // vertices; split first.
        const OrientedInterface pieces = split_on_partition(
            OrientedInterface({j.seg}), A.partition());
        for (const auto& piece : pieces.segments()) {
            const std::size_t rp = A.partition().locate_side(piece, +1);
            const std::size_t rm = A.partition().locate_side(piece, -1);
            const Expr nx = Expr::constant(piece.normal.x);
            const Expr ny = Expr::constant(piece.normal.y);
            const Expr tr_plus = A.components(rp)[0] * nx + A.components(rp)[1] * ny;
            const Expr tr_minus = A.components(rm)[0] * nx + A.components(rm)[1] * ny;
            const Expr alpha_star = (tr_plus + tr_minus) * Expr::constant(0.5);
            const Expr height = j.u_plus - j.u_minus;
            jump.add_line(piece, alpha_star * height);
            densities.push_back({piece, alpha_star, height});
        }
    }

    return PairingMeasure(std::move(ac), std::move(jump), GenMeasure{}, std::move(densities));
}

double theta(const PiecewiseVectorField& A, const BVFunc& u, const Vec2& x)
{
    // Jump points first: x may sit on J_u which is not interior to any cell.
    for (const auto& j : u.jump_set()) {
        if (!on_segment(x, j.seg.a, j.seg.b)) continue;
        if ((x - j.seg.a).norm() <= kGeomEps || (x - j.seg.b).norm() <= kGeomEps) continue;
        const OrientedInterface pieces =
            split_on_partition(OrientedInterface({j.seg}), A.partition());
        for (const auto& piece : pieces.segments()) {
            if (!on_segment(x, piece.a, piece.b)) continue;
            const std::size_t rp = A.partition().locate_side(piece, +1);
            const std::size_t rm = A.partition().locate_side(piece, -1);
            const double tr_plus = A.value_in_region(rp, x).dot(piece.normal);
            const double tr_minus = A.value_in_region(rm, x).dot(piece.normal);
            const double height = eval_at(j.u_plus, x) - eval_at(j.u_minus, x);
            return 0.5 * (tr_plus + tr_minus) * (height > 0.0 ? 1.0 : -1.0);
        }
    }
    const Vec2 dir = u.polar_direction(x);  // throws where grad u = 0 off J_u
    if (auto r = A.partition().locate_interior(x)) {
        return A.value_in_region(*r, x).dot(dir);
    }
    // x on the discontinuity set of A but off J_u: the approximate limit of
    // A exists only if the jump there vanishes; refuse rather than average.
    throw Error("theta undefined: the field has no approximate limit at this point");
}

GenMeasure multiply_by_precise(const GenMeasure& m, const BVFunc& u)
{
    GenMeasure out;
    const auto& cells = u.partition().cells();
    for (const auto& piece : m.area_part()) {
        for (std::size_t j = 0; j < cells.size(); ++j) {
            for (auto& conv : intersect_polygons(piece.cell, cells[j])) {
                out.add_area(Polygon(std::move(conv)), piece.density * u.region_expr(j));
            }
        }
    }
    for (const auto& piece : m.line_part()) {
        const OrientedInterface pieces =
            split_on_partition(OrientedInterface({piece.seg}), u.partition());
        for (const auto& sub : pieces.segments()) {
            out.add_line(sub, piece.density * u.precise_expr_on(sub));
        }
    }
    for (const auto& a : m.atom_part()) {
        out.add_atom(a.point, a.weight * u.precise_representative(a.point));
    }
    if (!m.cantor_part().empty())
        throw Error("multiply_by_precise does not support Cantor parts in 2D");
    return out;
}

double anzellotti_identity_residual(const PiecewiseVectorField& A, const BVFunc& u,
                                    const TestFunc& phi, const QuadratureOptions& opt)
{
    const PiecewiseVectorField uA = product_field(u, A);
    const double lhs = uA.divergence_measure().pair_test(phi, opt);
    const double term_div = multiply_by_precise(A.divergence_measure(), u).pair_test(phi, opt);
    const double term_pairing = pairing_measure(A, u).total().pair_test(phi, opt);
    return std::abs(lhs - term_div - term_pairing);
}

}  // namespace dmpair
