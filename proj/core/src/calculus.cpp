#include "dmpair/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace dmpair {

namespace {

bool affine_coefficients(const Expr& e, double& a, double& bx, double& by)
{
    if (!e.diff(Var::X).constant_value(bx)) return false;
    if (!e.diff(Var::Y).constant_value(by)) return false;
    a = e.eval(0.0, 0.0);
    return true;
}

void require_piecewise_affine(const BVFunc& u, const char* who)
{
    double a, bx, by;
    for (std::size_t i = 0; i < u.partition().size(); ++i) {
        if (!affine_coefficients(u.region_expr(i), a, bx, by))
            throw Error(std::string(who) + " requires a piecewise-affine function");
    }
}

}  // namespace

LevelSetFamily::LevelSetFamily(const BVFunc& u) : u_(&u)
{
    require_piecewise_affine(u, "level-set extraction");
    for (std::size_t i = 0; i < u.partition().size(); ++i) {
        const Expr& e = u.region_expr(i);
        for (const auto& v : u.partition().cells()[i].vertices())
            critical_.push_back(eval_at(e, v));
    }
    for (const auto& j : u.jump_set()) {
        for (const Vec2& p : {j.seg.a, j.seg.b}) {
            critical_.push_back(eval_at(j.u_plus, p));
            critical_.push_back(eval_at(j.u_minus, p));
        }
    }
    std::sort(critical_.begin(), critical_.end());
    critical_.erase(std::unique(critical_.begin(), critical_.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-11; }),
                    critical_.end());
    if (critical_.size() < 2) critical_.push_back(critical_.front() + 1.0);
}

std::vector<OrientedSegment> LevelSetFamily::boundary(double t) const
{
    std::vector<OrientedSegment> out;
    const auto& partition = u_->partition();
    const Window& w = partition.window();
    const double diam = std::hypot(w.width(), w.height());

    // Iso-line chords inside cells.
    for (std::size_t i = 0; i < partition.size(); ++i) {
        double a, bx, by;
        affine_coefficients(u_->region_expr(i), a, bx, by);
        const Vec2 grad{bx, by};
        if (grad.norm() < 1e-13) continue;  // cell constant: no chord at regular t
        // One point on the iso-line and its direction.
        const Vec2 nu = grad.normalized();  // interior normal of {u > t}
        const Vec2 dir = nu.perp();
        const Vec2 p0 = Vec2{0.0, 0.0} + nu * ((t - a) / grad.norm());
        const Vec2 center{0.5 * (w.xmin + w.xmax), 0.5 * (w.ymin + w.ymax)};
        const Vec2 anchor = p0 + dir * dir.dot(center - p0);
        const Segment long_seg{anchor - dir * diam, anchor + dir * diam};
        for (const auto& piece : clip_segment_to_polygon(long_seg, partition.cells()[i])) {
            if (piece.on_boundary) continue;  // grazing an edge: critical value
            out.push_back({piece.seg.a, piece.seg.b, nu});
        }
    }

    // Jump-segment pieces where the traces straddle t: u- < t < u+ on the
    // piece (the superlevel set lies on the + side there).
    for (const auto& j : u_->jump_set()) {
        // Both traces are affine along the segment; find the parameter
        // sub-interval where u_plus > t and u_minus < t.
        const auto line_values = [&](const Expr& e) {
            return std::make_pair(eval_at(e, j.seg.a), eval_at(e, j.seg.b));
        };
        const auto [pa, pb] = line_values(j.u_plus);
        const auto [ma, mb] = line_values(j.u_minus);
        double lo = 0.0, hi = 1.0;
        // u_plus(t') > t constraint.
        const double dp = pb - pa;
        if (std::abs(dp) < 1e-13) {
            if (pa <= t) continue;
        } else {
            const double root = (t - pa) / dp;
            if (dp > 0.0) lo = std::max(lo, root);
            else hi = std::min(hi, root);
        }
        // u_minus(t') < t constraint.
        const double dm = mb - ma;
        if (std::abs(dm) < 1e-13) {
            if (ma >= t) continue;
        } else {
            const double root = (t - ma) / dm;
            if (dm > 0.0) hi = std::min(hi, root);
            else lo = std::max(lo, root);
        }
        if (hi - lo < 1e-12) continue;
        out.push_back({j.seg.point_at(lo), j.seg.point_at(hi), j.seg.normal});
    }
    return out;
}

GenMeasure superlevel_pairing(const PiecewiseVectorField& A, const BVFunc& u, double t)
{
    // (A, D chi_{u>t}) = alpha* H^1 on the superlevel boundary: the jump
    // height of the indicator is 1 and the interior normal is the chosen
    // orientation.
    const LevelSetFamily family(u);
    GenMeasure m;
    for (const auto& seg : family.boundary(t)) {
        const OrientedInterface pieces =
            split_on_partition(OrientedInterface({seg}), A.partition());
        for (const auto& piece : pieces.segments()) {
            const std::size_t rp = A.partition().locate_side(piece, +1);
            const std::size_t rm = A.partition().locate_side(piece, -1);
            const Expr nx = Expr::constant(piece.normal.x);
            const Expr ny = Expr::constant(piece.normal.y);
            const Expr alpha_star = (A.components(rp)[0] * nx + A.components(rp)[1] * ny +
                                     A.components(rm)[0] * nx + A.components(rm)[1] * ny) *
                                    Expr::constant(0.5);
            m.add_line(piece, alpha_star);
        }
    }
    return m;
}

CoareaResult coarea_decompose(const PiecewiseVectorField& A, const BVFunc& u, const RegionSpec& B,
                              const QuadratureOptions& opt)
{
    const LevelSetFamily family(u);
    const double lhs = pairing_measure(A, u).total().eval_on(B, opt);

    // Integrate t |-> (A, D chi_{u>t})(B) between consecutive critical
    // values; the integrand is smooth there.
    double rhs = 0.0;
    const auto& crit = family.critical_values();
    for (std::size_t k = 0; k + 1 < crit.size(); ++k) {
        if (crit[k + 1] - crit[k] < 1e-11) continue;
        rhs += gauss_legendre_32(
            [&](double t) { return superlevel_pairing(A, u, t).eval_on(B, opt); }, crit[k],
            crit[k + 1]);
    }
    return {lhs, rhs};
}

ChainRuleResult chain_rule(const PiecewiseVectorField& A, const BVFunc& u, const Expr& h)
{
    const Expr hprime = h.diff(Var::X);

    GenMeasure ac;
    const bool shared = A.partition().same_cells(u.partition());
    for (std::size_t j = 0; j < u.partition().size(); ++j) {
        const Expr ux = u.region_expr(j).diff(Var::X);
        const Expr uy = u.region_expr(j).diff(Var::Y);
        if (ux.is_constant(0.0) && uy.is_constant(0.0)) continue;
        const Expr factor = hprime.substitute(Var::X, u.region_expr(j));
        if (shared) {
            ac.add_area(u.partition().cells()[j],
                        factor * (A.components(j)[0] * ux + A.components(j)[1] * uy));
            continue;
        }
        for (std::size_t i = 0; i < A.partition().size(); ++i) {
            const Expr density =
                factor * (A.components(i)[0] * ux + A.components(i)[1] * uy);
            for (auto& piece :
                 intersect_polygons(A.partition().cells()[i], u.partition().cells()[j]))
                ac.add_area(Polygon(std::move(piece)), density);
        }
    }

    GenMeasure jump;
    std::vector<PairingMeasure::JumpDensity> densities;
    for (const auto& j : u.jump_set()) {
        const OrientedInterface pieces =
            split_on_partition(OrientedInterface({j.seg}), A.partition());
        for (const auto& piece : pieces.segments()) {
            const std::size_t rp = A.partition().locate_side(piece, +1);
            const std::size_t rm = A.partition().locate_side(piece, -1);
            const Expr nx = Expr::constant(piece.normal.x);
            const Expr ny = Expr::constant(piece.normal.y);
            const Expr alpha_star = (A.components(rp)[0] * nx + A.components(rp)[1] * ny +
                                     A.components(rm)[0] * nx + A.components(rm)[1] * ny) *
                                    Expr::constant(0.5);
            // Jump factor (h(u+) - h(u-)) replaces the height (u+ - u-).
            const Expr height = h.substitute(Var::X, j.u_plus) - h.substitute(Var::X, j.u_minus);
            jump.add_line(piece, alpha_star * height);
            densities.push_back({piece, alpha_star, height});
        }
    }

    // Monotonicity of h on the sampled range of u decides theta transfer.
    const auto range = u.sample_range();
    bool monotone = true;
    for (int i = 0; i <= 64 && monotone; ++i) {
        const double s = range.first + (range.second - range.first) * i / 64.0;
        if (hprime.eval(s, 0.0) < -1e-12) monotone = false;
    }

    return {PairingMeasure(std::move(ac), std::move(jump), GenMeasure{}, std::move(densities)),
            monotone};
}

BVFunc truncate(const BVFunc& u, double k)
{
    if (k <= 0.0) throw Error("truncation level must be positive");
    std::vector<Polygon> cells;
    std::vector<Expr> values;
    for (std::size_t i = 0; i < u.partition().size(); ++i) {
        const Expr& e = u.region_expr(i);
        const Polygon& cell = u.partition().cells()[i];

        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& t : triangulate(cell)) {
            for (const Vec2& p : {t.a, t.b, t.c, t.centroid(), (t.a + t.b) * 0.5,
                                  (t.b + t.c) * 0.5, (t.c + t.a) * 0.5}) {
                const double v = eval_at(e, p);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }

        // Cells entirely within one clamp zone need no splitting.
        if (lo >= -k && hi <= k) {
            cells.push_back(cell);
            values.push_back(e);
            continue;
        }
        if (lo >= k) {
            cells.push_back(cell);
            values.push_back(Expr::constant(k));
            continue;
        }
        if (hi <= -k) {
            cells.push_back(cell);
            values.push_back(Expr::constant(-k));
            continue;
        }

        double a, bx, by;
        if (!affine_coefficients(e, a, bx, by))
            throw Error("truncation level crossed by a non-affine piece");
        const Vec2 grad{bx, by};

        // Split the cell along the iso-lines u = +k and u = -k:
        //   u >= k   <=>  grad . p >= k - a
        //   u <= -k  <=>  (-grad) . p >= k + a
        //   -k <= u <= k is the intersection of the two complements.
        for (const auto& tri : triangulate(cell)) {
            const std::vector<Vec2> t0{tri.a, tri.b, tri.c};
            const auto push = [&](std::vector<Vec2> piece, Expr value) {
                if (piece.size() >= 3 && std::abs(signed_area(piece)) > 1e-13) {
                    cells.push_back(Polygon(std::move(piece)));
                    values.push_back(std::move(value));
                }
            };
            push(clip_halfplane(t0, grad, k - a), Expr::constant(k));
            push(clip_halfplane(t0, -grad, k + a), Expr::constant(-k));
            push(clip_halfplane(clip_halfplane(t0, grad, -k - a), -grad, a - k), e);
        }
    }
    return BVFunc(PolygonalPartition(u.partition().window(), std::move(cells)),
                  std::move(values));
}

namespace {

// Div A restricted to the jump pieces, with each line density multiplied by
// a factor depending on the covering jump segments of u (and optionally v).
GenMeasure divergence_on_jumps(const PiecewiseVectorField& A, const BVFunc& u, const BVFunc* v)
{
    GenMeasure out;
    const GenMeasure div = A.divergence_measure();
    for (const auto& piece : div.line_part()) {
        for (const auto& ju : u.jump_set()) {
            const auto ov = collinear_overlap(piece.seg.as_segment(), ju.seg.as_segment());
            if (!ov) continue;
            if (v == nullptr) {
                // factor (u+ - u-)^2 / 4
                const Expr height = ju.u_plus - ju.u_minus;
                out.add_line({ov->a, ov->b, piece.seg.normal},
                             piece.density * height * height * Expr::constant(0.25));
            } else {
                // factor (u+ - u-)(v+ - v-) / 4 on J_u intersect J_v, with
                // v's traces side-matched to u's orientation.
                for (const auto& jv : v->jump_set()) {
                    const auto ov2 = collinear_overlap(*ov, jv.seg.as_segment());
                    if (!ov2) continue;
                    const OrientedSegment sub{ov2->a, ov2->b, ju.seg.normal};
                    const Expr vplus = v->side_expr(sub, +1);
                    const Expr vminus = v->side_expr(sub, -1);
                    out.add_line(sub, piece.density * (ju.u_plus - ju.u_minus) *
                                          (vplus - vminus) * Expr::constant(0.25));
                }
            }
        }
    }
    return out;
}

}  // namespace

ProductPairingResult self_product_pairing(const PiecewiseVectorField& A, const BVFunc& u)
{
    GenMeasure formula = multiply_by_precise(pairing_measure(A, u).total(), u);
    formula += divergence_on_jumps(A, u, nullptr);
    GenMeasure direct = pairing_measure(product_field(u, A), u).total();
    return {std::move(formula), std::move(direct)};
}

ProductPairingResult product_pairing(const BVFunc& v, const PiecewiseVectorField& A,
                                     const BVFunc& u)
{
    GenMeasure formula = multiply_by_precise(pairing_measure(A, u).total(), v);
    formula += divergence_on_jumps(A, u, &v);
    GenMeasure direct = pairing_measure(product_field(v, A), u).total();
    return {std::move(formula), std::move(direct)};
}

ProductPairingResult leibniz(const PiecewiseVectorField& A, const BVFunc& u, const BVFunc& v)
{
    GenMeasure formula = multiply_by_precise(pairing_measure(A, u).total(), v);
    formula += multiply_by_precise(pairing_measure(A, v).total(), u);
    GenMeasure direct = pairing_measure(A, bv_product(u, v)).total();
    return {std::move(formula), std::move(direct)};
}

}  // namespace dmpair
