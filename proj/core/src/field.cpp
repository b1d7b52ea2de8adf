#include "dmpair/field.hpp"

#include <algorithm>
#include <cmath>

namespace dmpair {

namespace {

constexpr int kTraceSamples = 64;
constexpr double kJumpTol = 1e-12;

// Sample |f| along the segment; true if it stays below tol everywhere.
bool identically_zero_on(const Expr& f, const OrientedSegment& s, double tol = kJumpTol)
{
    for (int i = 0; i <= kTraceSamples; ++i) {
        const Vec2 p = s.point_at(double(i) / kTraceSamples);
        if (std::abs(eval_at(f, p)) > tol) return false;
    }
    return true;
}

// Roots of f along the open segment, isolated by sign changes on a 64-point
// grid and refined by bisection. Coincidences finer than the grid are a
// reported limitation of the piecewise class.
std::vector<double> roots_on_segment(const Expr& f, const OrientedSegment& s)
{
    std::vector<double> roots;
    double prev_t = 0.0;
    double prev_v = eval_at(f, s.point_at(0.0));
    for (int i = 1; i <= kTraceSamples; ++i) {
        const double t = double(i) / kTraceSamples;
        const double v = eval_at(f, s.point_at(t));
        if ((prev_v < 0.0) != (v < 0.0) && prev_v != 0.0 && v != 0.0) {
            double lo = prev_t, hi = t, flo = prev_v;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = eval_at(f, s.point_at(mid));
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        } else if (v == 0.0 && t < 1.0) {
            roots.push_back(t);
        }
        prev_t = t;
        prev_v = v;
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-10; }),
                roots.end());
    return roots;
}

}  // namespace

PolygonalPartition::PolygonalPartition(Window window, std::vector<Polygon> cells)
    : window_(window), cells_(std::move(cells))
{
    if (cells_.empty()) throw GeometryError("partition needs at least one cell");
    double total = 0.0;
    for (const auto& c : cells_) total += c.area();
    if (std::abs(total - window_.area()) > 1e-8 * window_.area())
        throw GeometryError("partition cells do not cover the window");

    // Interfaces: maximal collinear overlaps between boundaries of cell
    // pairs, oriented by the interior normal of the lower-indexed cell.
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        for (std::size_t j = i + 1; j < cells_.size(); ++j) {
            for (std::size_t ei = 0; ei < cells_[i].size(); ++ei) {
                const Segment si = cells_[i].edge(ei);
                for (std::size_t ej = 0; ej < cells_[j].size(); ++ej) {
                    const Segment sj = cells_[j].edge(ej);
                    const auto ov = collinear_overlap(si, sj);
                    if (!ov) continue;
                    const Vec2 nu = (si.b - si.a).normalized().perp();  // interior normal of cell i
                    interfaces_.push_back({{ov->a, ov->b, nu}, i, j});
                }
            }
        }
    }
}

std::optional<std::size_t> PolygonalPartition::locate_interior(const Vec2& p) const
{
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i].classify(p) == PointClass::Interior) return i;
    }
    return std::nullopt;
}

std::size_t PolygonalPartition::locate_side(const OrientedSegment& s, int sign) const
{
    const Vec2 mid = s.midpoint();
    const double scale = std::max({1.0, window_.width(), window_.height()});
    for (double delta : {1e-7 * scale, 1e-9 * scale}) {
        const Vec2 probe = mid + s.normal * (sign * delta);
        if (auto r = locate_interior(probe)) {
            // Sanity: the located cell must reach the whole segment.
            if (cells_[*r].contains_closed(s.a) && cells_[*r].contains_closed(s.b)) return *r;
        }
    }
    throw GeometryError("could not locate a partition cell adjacent to the segment");
}

std::vector<Vec2> PolygonalPartition::vertices_on(const Segment& s) const
{
    std::vector<Vec2> out;
    for (const auto& cell : cells_) {
        for (const auto& v : cell.vertices()) {
            if (!on_segment(v, s.a, s.b)) continue;
            if ((v - s.a).norm() <= kGeomEps || (v - s.b).norm() <= kGeomEps) continue;
            const bool seen = std::any_of(out.begin(), out.end(),
                                          [&](const Vec2& w) { return (w - v).norm() <= kGeomEps; });
            if (!seen) out.push_back(v);
        }
    }
    return out;
}

bool PolygonalPartition::same_cells(const PolygonalPartition& other) const
{
    if (cells_.size() != other.cells_.size()) return false;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const auto& a = cells_[i].vertices();
        const auto& b = other.cells_[i].vertices();
        if (a.size() != b.size()) return false;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if ((a[k] - b[k]).norm() > kGeomEps) return false;
        }
    }
    return true;
}

PiecewiseVectorField::PiecewiseVectorField(PolygonalPartition partition,
                                           std::vector<std::array<Expr, 2>> components)
    : partition_(std::move(partition)), comps_(std::move(components))
{
    if (comps_.size() != partition_.size())
        throw Error("need exactly one component pair per partition cell");
}

Vec2 PiecewiseVectorField::value_in_region(std::size_t region, const Vec2& p) const
{
    return {eval_at(comps_[region][0], p), eval_at(comps_[region][1], p)};
}

Vec2 PiecewiseVectorField::value_at(const Vec2& p) const
{
    if (auto r = partition_.locate_interior(p)) return value_in_region(*r, p);
    // On an internal interface: average the one-sided values.
    for (const auto& e : partition_.interfaces()) {
        if (!on_segment(p, e.seg.a, e.seg.b)) continue;
        const Vec2 vp = value_in_region(e.plus_region, p);
        const Vec2 vm = value_in_region(e.minus_region, p);
        return (vp + vm) * 0.5;
    }
    // Window boundary: use any cell whose closure contains p.
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        if (partition_.cells()[i].contains_closed(p)) return value_in_region(i, p);
    }
    throw GeometryError("point is outside the window");
}

GenMeasure PiecewiseVectorField::divergence_measure() const
{
    GenMeasure div;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        div.add_area(partition_.cells()[i],
                     comps_[i][0].diff(Var::X) + comps_[i][1].diff(Var::Y));
    }
    // Jump part (A+ - A-) . nu; the expression is orientation-invariant.
    for (const auto& e : partition_.interfaces()) {
        const Expr jump_normal =
            (comps_[e.plus_region][0] - comps_[e.minus_region][0]) * Expr::constant(e.seg.normal.x) +
            (comps_[e.plus_region][1] - comps_[e.minus_region][1]) * Expr::constant(e.seg.normal.y);
        if (identically_zero_on(jump_normal, e.seg)) continue;
        div.add_line(e.seg, jump_normal);
    }
    return div;
}

OrientedInterface PiecewiseVectorField::discontinuity_set() const
{
    std::vector<OrientedSegment> segs;
    for (const auto& e : partition_.interfaces()) {
        const Expr j0 = comps_[e.plus_region][0] - comps_[e.minus_region][0];
        const Expr j1 = comps_[e.plus_region][1] - comps_[e.minus_region][1];
        if (identically_zero_on(j0, e.seg) && identically_zero_on(j1, e.seg)) continue;
        segs.push_back(e.seg);
    }
    return OrientedInterface(std::move(segs));
}

double PiecewiseVectorField::sample_sup_norm() const
{
    double sup = 0.0;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        for (const auto& t : triangulate(partition_.cells()[i])) {
            for (const Vec2& p : {t.a, t.b, t.c, t.centroid(), (t.a + t.b) * 0.5,
                                  (t.b + t.c) * 0.5, (t.c + t.a) * 0.5}) {
                sup = std::max(sup, value_in_region(i, p).norm());
            }
        }
    }
    return sup;
}

BVFunc::BVFunc(PolygonalPartition partition, std::vector<Expr> values)
    : partition_(std::move(partition)), values_(std::move(values))
{
    if (values_.size() != partition_.size())
        throw Error("need exactly one expression per partition cell");

    for (const auto& e : partition_.interfaces()) {
        const Expr delta = values_[e.plus_region] - values_[e.minus_region];
        if (identically_zero_on(delta, e.seg)) continue;

        std::vector<double> cuts{0.0};
        for (double r : roots_on_segment(delta, e.seg)) cuts.push_back(r);
        cuts.push_back(1.0);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            OrientedSegment piece{e.seg.point_at(cuts[k]), e.seg.point_at(cuts[k + 1]),
                                  e.seg.normal};
            if (piece.length() <= kGeomEps) continue;
            const double mid_delta = eval_at(delta, piece.midpoint());
            if (std::abs(mid_delta) <= kJumpTol) continue;  // grazing piece, traces coincide
            if (mid_delta > 0.0) {
                jumps_.push_back({piece, values_[e.plus_region], values_[e.minus_region],
                                  e.plus_region, e.minus_region});
            } else {
                // Flip so that u+ > u- along the piece.
                jumps_.push_back({piece.flipped(), values_[e.minus_region],
                                  values_[e.plus_region], e.minus_region, e.plus_region});
            }
        }
    }
}

OrientedInterface BVFunc::jump_interface() const
{
    std::vector<OrientedSegment> segs;
    segs.reserve(jumps_.size());
    for (const auto& j : jumps_) segs.push_back(j.seg);
    return OrientedInterface(std::move(segs));
}

double BVFunc::value_at(const Vec2& p) const
{
    if (auto r = partition_.locate_interior(p)) return eval_at(values_[*r], p);
    return precise_representative(p);
}

double BVFunc::precise_representative(const Vec2& p) const
{
    if (auto r = partition_.locate_interior(p)) return eval_at(values_[*r], p);
    for (const auto& cell : partition_.cells()) {
        for (const auto& v : cell.vertices()) {
            if ((p - v).norm() <= kGeomEps)
                throw Error("precise representative is undefined at partition vertices");
        }
    }
    for (const auto& e : partition_.interfaces()) {
        if (!on_segment(p, e.seg.a, e.seg.b)) continue;
        return 0.5 * (eval_at(values_[e.plus_region], p) + eval_at(values_[e.minus_region], p));
    }
    // Window boundary.
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        if (partition_.cells()[i].contains_closed(p)) return eval_at(values_[i], p);
    }
    throw GeometryError("point is outside the window");
}

Expr BVFunc::precise_expr_on(const OrientedSegment& s) const
{
    // On a jump piece: (u+ + u-)/2. Elsewhere the two sides agree.
    const std::size_t plus = partition_.locate_side(s, +1);
    const std::size_t minus = partition_.locate_side(s, -1);
    return (values_[plus] + values_[minus]) * Expr::constant(0.5);
}

Expr BVFunc::side_expr(const OrientedSegment& s, int sign) const
{
    return values_[partition_.locate_side(s, sign)];
}

std::array<GenMeasure, 2> BVFunc::gradient_measure() const
{
    std::array<GenMeasure, 2> grad;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        grad[0].add_area(partition_.cells()[i], values_[i].diff(Var::X));
        grad[1].add_area(partition_.cells()[i], values_[i].diff(Var::Y));
    }
    for (const auto& j : jumps_) {
        const Expr height = j.u_plus - j.u_minus;
        grad[0].add_line(j.seg, height * Expr::constant(j.seg.normal.x));
        grad[1].add_line(j.seg, height * Expr::constant(j.seg.normal.y));
    }
    return grad;
}

double BVFunc::total_variation_Du(const RegionSpec& B, const QuadratureOptions& opt) const
{
    // |Du|(B) = int |grad u| over B plus int (u+ - u-) over J_u intersect B.
    // |grad u| is not representable in the expression grammar (no square
    // root), so this is computed directly rather than through a GenMeasure.
    double sum = 0.0;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        const Expr gx = values_[i].diff(Var::X);
        const Expr gy = values_[i].diff(Var::Y);
        if (gx.is_constant(0.0) && gy.is_constant(0.0)) continue;
        // Reuse the measure clipping machinery to cut the cell against B.
        const GenMeasure cell_measure =
            GenMeasure::lebesgue(partition_.cells()[i], Expr::constant(1.0));
        const GenMeasure clipped = cell_measure.restricted(B);
        for (const auto& piece : clipped.area_part()) {
            const PointFunc f = [&](const Vec2& p) {
                return std::hypot(eval_at(gx, p), eval_at(gy, p));
            };
            for (const auto& t : triangulate(piece.cell)) sum += integrate_triangle(f, t, opt);
        }
    }
    GenMeasure jump_tv;
    for (const auto& j : jumps_) jump_tv.add_line(j.seg, j.u_plus - j.u_minus);
    sum += jump_tv.total_variation(B, opt);
    return sum;
}

Vec2 BVFunc::polar_direction(const Vec2& p) const
{
    if (auto r = partition_.locate_interior(p)) {
        const Vec2 g{eval_at(values_[*r].diff(Var::X), p), eval_at(values_[*r].diff(Var::Y), p)};
        if (g.norm() < 1e-12)
            throw Error("polar direction undefined where the gradient vanishes off the jump set");
        return g.normalized();
    }
    for (const auto& j : jumps_) {
        if (!on_segment(p, j.seg.a, j.seg.b)) continue;
        if ((p - j.seg.a).norm() <= kGeomEps || (p - j.seg.b).norm() <= kGeomEps) continue;
        // Jump pieces are oriented with u+ > u-, so the sign factor is +1.
        return j.seg.normal;
    }
    throw Error("polar direction undefined at this point");
}

double BVFunc::sample_sup_norm() const
{
    const auto range = sample_range();
    return std::max(std::abs(range.first), std::abs(range.second));
}

std::pair<double, double> BVFunc::sample_range() const
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < partition_.size(); ++i) {
        for (const auto& t : triangulate(partition_.cells()[i])) {
            for (const Vec2& p : {t.a, t.b, t.c, t.centroid(), (t.a + t.b) * 0.5,
                                  (t.b + t.c) * 0.5, (t.c + t.a) * 0.5}) {
                const double v = eval_at(values_[i], p);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    return {lo, hi};
}

PiecewiseVectorField product_field(const BVFunc& u, const PiecewiseVectorField& A)
{
    const auto& pu = u.partition();
    const auto& pa = A.partition();
    if (pu.same_cells(pa)) {
        std::vector<std::array<Expr, 2>> comps;
        comps.reserve(pu.size());
        for (std::size_t i = 0; i < pu.size(); ++i) {
            comps.push_back({u.region_expr(i) * A.components(i)[0],
                             u.region_expr(i) * A.components(i)[1]});
        }
        return PiecewiseVectorField(pu, std::move(comps));
    }
    if (pa.size() == 1) {
        std::vector<std::array<Expr, 2>> comps;
        comps.reserve(pu.size());
        for (std::size_t i = 0; i < pu.size(); ++i) {
            comps.push_back(
                {u.region_expr(i) * A.components(0)[0], u.region_expr(i) * A.components(0)[1]});
        }
        return PiecewiseVectorField(pu, std::move(comps));
    }
    if (pu.size() == 1) {
        std::vector<std::array<Expr, 2>> comps;
        comps.reserve(pa.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            comps.push_back(
                {u.region_expr(0) * A.components(i)[0], u.region_expr(0) * A.components(i)[1]});
        }
        return PiecewiseVectorField(pa, std::move(comps));
    }
    throw Error("product field requires a shared partition (or a single-cell factor)");
}

namespace {

// Split every cell of `base` against the convex polygon E. Returns the
// refined cells together with an inside/outside flag and the index of the
// originating cell.
struct RefinedCell {
    Polygon poly;
    std::size_t parent;
    bool inside;
};

std::vector<RefinedCell> refine_against(const PolygonalPartition& base, const Polygon& E)
{
    if (signed_area(E) <= 0.0) throw GeometryError("mask polygon must be counterclockwise");
    std::vector<RefinedCell> out;
    for (std::size_t ci = 0; ci < base.size(); ++ci) {
        for (const auto& tri : triangulate(base.cells()[ci])) {
            std::vector<std::vector<Vec2>> remaining{{tri.a, tri.b, tri.c}};
            // Peel off the outside wedges edge by edge; what survives all
            // half-plane clips is the inside part.
            for (std::size_t k = 0; k < E.size(); ++k) {
                const Segment e = E.edge(k);
                const Vec2 inward = (e.b - e.a).perp();
                const double c = inward.dot(e.a);
                std::vector<std::vector<Vec2>> next;
                for (const auto& piece : remaining) {
                    auto outside = clip_halfplane(piece, -inward, -c);
                    if (!outside.empty() && std::abs(signed_area(outside)) > 1e-14)
                        out.push_back({Polygon(outside), ci, false});
                    auto inside = clip_halfplane(piece, inward, c);
                    if (!inside.empty() && std::abs(signed_area(inside)) > 1e-14)
                        next.push_back(std::move(inside));
                }
                remaining = std::move(next);
            }
            for (auto& piece : remaining) out.push_back({Polygon(std::move(piece)), ci, true});
        }
    }
    return out;
}

}  // namespace

BVFunc indicator_bv(const Polygon& E, const PolygonalPartition& base)
{
    auto refined = refine_against(base, E);
    std::vector<Polygon> cells;
    std::vector<Expr> values;
    cells.reserve(refined.size());
    for (auto& rc : refined) {
        values.push_back(Expr::constant(rc.inside ? 1.0 : 0.0));
        cells.push_back(std::move(rc.poly));
    }
    return BVFunc(PolygonalPartition(base.window(), std::move(cells)), std::move(values));
}

PiecewiseVectorField masked_field(const PiecewiseVectorField& A, const Polygon& E,
                                  bool keep_inside)
{
    auto refined = refine_against(A.partition(), E);
    std::vector<Polygon> cells;
    std::vector<std::array<Expr, 2>> comps;
    cells.reserve(refined.size());
    for (auto& rc : refined) {
        if (rc.inside == keep_inside) {
            comps.push_back(A.components(rc.parent));
        } else {
            comps.push_back({Expr::constant(0.0), Expr::constant(0.0)});
        }
        cells.push_back(std::move(rc.poly));
    }
    return PiecewiseVectorField(PolygonalPartition(A.partition().window(), std::move(cells)),
                                std::move(comps));
}

BVFunc bv_product(const BVFunc& u, const BVFunc& v)
{
    if (!u.partition().same_cells(v.partition()))
        throw Error("bv_product requires a shared partition");
    std::vector<Expr> values;
    values.reserve(u.partition().size());
    for (std::size_t i = 0; i < u.partition().size(); ++i)
        values.push_back(u.region_expr(i) * v.region_expr(i));
    return BVFunc(u.partition(), std::move(values));
}

BVFunc bv_compose(const Expr& h, const BVFunc& u)
{
    std::vector<Expr> values;
    values.reserve(u.partition().size());
    for (std::size_t i = 0; i < u.partition().size(); ++i)
        values.push_back(h.substitute(Var::X, u.region_expr(i)));
    return BVFunc(u.partition(), std::move(values));
}

BVFunc bv_constant(const PolygonalPartition& partition, double c)
{
    return BVFunc(partition, std::vector<Expr>(partition.size(), Expr::constant(c)));
}

}  // namespace dmpair
