#include "dmpair/measure.hpp"

#include <algorithm>
#include <cmath>

#include "dmpair/cantor.hpp"

namespace dmpair {

namespace {

double integrate_cell(const Polygon& cell, const PointFunc& f, const QuadratureOptions& opt)
{
    double sum = 0.0;
    for (const auto& t : triangulate(cell)) sum += integrate_triangle(f, t, opt);
    return sum;
}

double integrate_convex_piece(const std::vector<Vec2>& piece, const PointFunc& f,
                              const QuadratureOptions& opt)
{
    double sum = 0.0;
    for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
        Triangle t{piece[0], piece[i], piece[i + 1]};
        if (t.area() > kGeomEps * kGeomEps) sum += integrate_triangle(f, t, opt);
    }
    return sum;
}

// Split a segment at the sign changes of f (sampled on a 64-point grid,
// refined by bisection) so that |f| can be integrated piecewise smoothly.
std::vector<Segment> split_at_sign_changes(const Segment& s, const PointFunc& f)
{
    constexpr int kSamples = 64;
    std::vector<double> cuts{0.0, 1.0};
    double prev_t = 0.0;
    double prev_v = f(s.point_at(0.0));
    for (int i = 1; i <= kSamples; ++i) {
        const double t = double(i) / kSamples;
        const double v = f(s.point_at(t));
        if (prev_v == 0.0 || (prev_v < 0.0) != (v < 0.0)) {
            double lo = prev_t, hi = t, flo = prev_v;
            if (prev_v != 0.0 && v != 0.0) {
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = f(s.point_at(mid));
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
            }
            cuts.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_v = v;
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<Segment> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] - cuts[k] < 1e-12) continue;
        out.push_back({s.point_at(cuts[k]), s.point_at(cuts[k + 1])});
    }
    return out;
}

// The sub-segments of `seg` belonging to the region spec. Interior specs
// exclude portions running along the polygon boundary; InteriorPlusBoundary
// includes them.
std::vector<Segment> line_parts_in_spec(const Segment& seg, const RegionSpec& B)
{
    switch (B.kind()) {
        case RegionSpec::Kind::Window: return {seg};
        case RegionSpec::Kind::Interior: {
            std::vector<Segment> out;
            for (const auto& piece : clip_segment_to_polygon(seg, B.polygon()))
                if (!piece.on_boundary) out.push_back(piece.seg);
            return out;
        }
        case RegionSpec::Kind::InteriorPlusBoundary: {
            std::vector<Segment> out;
            for (const auto& piece : clip_segment_to_polygon(seg, B.polygon()))
                out.push_back(piece.seg);
            return out;
        }
        case RegionSpec::Kind::Interface: {
            std::vector<Segment> out;
            for (const auto& t : B.interface_set().segments()) {
                if (auto ov = collinear_overlap(seg, t.as_segment())) out.push_back(*ov);
            }
            return out;
        }
        case RegionSpec::Kind::Interval: {
            const Segment axis{{B.interval_lo(), 0.0}, {B.interval_hi(), 0.0}};
            std::vector<Segment> out;
            if (auto ov = collinear_overlap(seg, axis)) out.push_back(*ov);
            return out;
        }
    }
    return {};
}

// x-axis intervals of the carrier window [lo, hi] that belong to the spec.
std::vector<std::pair<double, double>> carrier_intervals_in_spec(double lo, double hi,
                                                                 const RegionSpec& B)
{
    switch (B.kind()) {
        case RegionSpec::Kind::Window: return {{lo, hi}};
        case RegionSpec::Kind::Interval: {
            const double a = std::max(lo, B.interval_lo());
            const double b = std::min(hi, B.interval_hi());
            if (b <= a) return {};
            return {{a, b}};
        }
        case RegionSpec::Kind::Interior:
        case RegionSpec::Kind::InteriorPlusBoundary: {
            std::vector<std::pair<double, double>> out;
            const Segment axis{{lo, 0.0}, {hi, 0.0}};
            for (const auto& piece : clip_segment_to_polygon(axis, B.polygon())) {
                if (B.kind() == RegionSpec::Kind::Interior && piece.on_boundary) continue;
                out.emplace_back(piece.seg.a.x, piece.seg.b.x);
            }
            return out;
        }
        case RegionSpec::Kind::Interface: return {};
    }
    return {};
}

double cantor_piece_integral(const CantorPiece& piece, const std::function<double(double)>& g,
                             double a, double b)
{
    const double lo = std::max(a, piece.clip_lo);
    const double hi = std::min(b, piece.clip_hi);
    if (hi <= lo) return 0.0;
    return piece.weight * piece.comp.mass *
           cantor_restricted_integral(g, piece.comp, lo, hi);
}

}  // namespace

TestFunc::TestFunc(Expr expr, Polygon support)
    : expr_(std::move(expr)),
      dx_(expr_.diff(Var::X)),
      dy_(expr_.diff(Var::Y)),
      support_(std::move(support))
{
    // The expression must vanish on the support boundary; sample each edge.
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const Segment e = support_.edge(i);
        for (int k = 0; k <= 8; ++k) {
            const Vec2 p = e.point_at(double(k) / 8.0);
            if (std::abs(eval_at(expr_, p)) > 1e-9)
                throw Error("test function does not vanish on its support boundary");
        }
    }
}

double TestFunc::value(const Vec2& p) const
{
    if (support_.classify(p) == PointClass::Exterior) return 0.0;
    return eval_at(expr_, p);
}

Vec2 TestFunc::gradient(const Vec2& p) const
{
    if (support_.classify(p) == PointClass::Exterior) return {0.0, 0.0};
    return {eval_at(dx_, p), eval_at(dy_, p)};
}

TestFunc TestFunc::bump(double x0, double x1, double y0, double y1)
{
    const Expr x = Expr::x();
    const Expr y = Expr::y();
    const Expr q = (x - x0) * (x1 - x) * (y - y0) * (y1 - y);
    // Peak of (x-x0)(x1-x) is (x1-x0)^2/4 at the midpoint.
    const double peak = std::pow(0.25 * (x1 - x0) * (x1 - x0) * 0.25 * (y1 - y0) * (y1 - y0), 2);
    return TestFunc(q.pow(2) * Expr::constant(1.0 / peak),
                    Polygon::rectangle(x0, x1, y0, y1));
}

GenMeasure GenMeasure::lebesgue(const Polygon& cell, Expr density)
{
    GenMeasure m;
    m.add_area(cell, std::move(density));
    return m;
}

GenMeasure GenMeasure::line(const OrientedSegment& seg, Expr density)
{
    GenMeasure m;
    m.add_line(seg, std::move(density));
    return m;
}

GenMeasure GenMeasure::hausdorff1(const OrientedInterface& sigma, double density)
{
    GenMeasure m;
    for (const auto& s : sigma.segments()) m.add_line(s, Expr::constant(density));
    return m;
}

GenMeasure GenMeasure::atom(const Vec2& p, double weight)
{
    GenMeasure m;
    m.add_atom(p, weight);
    return m;
}

GenMeasure GenMeasure::cantor(const CantorComponent& comp, Expr density, double weight)
{
    GenMeasure m;
    m.add_cantor(CantorPiece{comp, std::move(density), weight});
    return m;
}

void GenMeasure::add_area(Polygon cell, Expr density)
{
    if (density.is_constant(0.0)) return;
    area_.push_back({std::move(cell), std::move(density)});
}

void GenMeasure::add_line(OrientedSegment seg, Expr density)
{
    if (density.is_constant(0.0)) return;
    line_.push_back({seg, std::move(density)});
}

void GenMeasure::add_atom(Vec2 p, double weight) { atoms_.push_back({p, weight}); }

void GenMeasure::add_cantor(CantorPiece piece) { cantor_.push_back(std::move(piece)); }

double GenMeasure::eval_on(const RegionSpec& B, const QuadratureOptions& opt) const
{
    double sum = 0.0;
    const bool area_counts = B.kind() == RegionSpec::Kind::Window ||
                             B.kind() == RegionSpec::Kind::Interior ||
                             B.kind() == RegionSpec::Kind::InteriorPlusBoundary;
    if (area_counts) {
        for (const auto& piece : area_) {
            const PointFunc f = [&](const Vec2& p) { return eval_at(piece.density, p); };
            if (B.kind() == RegionSpec::Kind::Window) {
                sum += integrate_cell(piece.cell, f, opt);
            } else {
                for (const auto& conv : intersect_polygons(piece.cell, B.polygon()))
                    sum += integrate_convex_piece(conv, f, opt);
            }
        }
    }
    for (const auto& piece : line_) {
        const PointFunc f = [&](const Vec2& p) { return eval_at(piece.density, p); };
        for (const auto& part : line_parts_in_spec(piece.seg.as_segment(), B))
            sum += integrate_segment(f, part.a, part.b, opt);
    }
    for (const auto& a : atoms_) {
        if (B.contains(a.point)) sum += a.weight;
    }
    for (const auto& piece : cantor_) {
        const auto g = [&](double x) { return piece.density.eval(x, 0.0); };
        for (const auto& [a, b] : carrier_intervals_in_spec(piece.comp.lo, piece.comp.hi, B))
            sum += cantor_piece_integral(piece, g, a, b);
    }
    return sum;
}

double GenMeasure::pair_test(const TestFunc& phi, const QuadratureOptions& opt) const
{
    double sum = 0.0;
    for (const auto& piece : area_) {
        const PointFunc f = [&](const Vec2& p) {
            return eval_at(phi.expr(), p) * eval_at(piece.density, p);
        };
        // Clip to the support so we never evaluate phi's expression where the
        // function is declared zero.
        for (const auto& conv : intersect_polygons(piece.cell, phi.support()))
            sum += integrate_convex_piece(conv, f, opt);
    }
    for (const auto& piece : line_) {
        const PointFunc f = [&](const Vec2& p) {
            return eval_at(phi.expr(), p) * eval_at(piece.density, p);
        };
        for (const auto& part : clip_segment_to_polygon(piece.seg.as_segment(), phi.support()))
            sum += integrate_segment(f, part.seg.a, part.seg.b, opt);
    }
    for (const auto& a : atoms_) sum += a.weight * phi.value(a.point);
    for (const auto& piece : cantor_) {
        const auto g = [&](double x) {
            return phi.value({x, 0.0}) * piece.density.eval(x, 0.0);
        };
        sum += cantor_piece_integral(piece, g, piece.comp.lo, piece.comp.hi);
    }
    return sum;
}

double GenMeasure::total_variation(const RegionSpec& B, const QuadratureOptions& opt) const
{
    double sum = 0.0;
    const bool area_counts = B.kind() == RegionSpec::Kind::Window ||
                             B.kind() == RegionSpec::Kind::Interior ||
                             B.kind() == RegionSpec::Kind::InteriorPlusBoundary;
    if (area_counts) {
        for (const auto& piece : area_) {
            const PointFunc f = [&](const Vec2& p) { return std::abs(eval_at(piece.density, p)); };
            if (B.kind() == RegionSpec::Kind::Window) {
                sum += integrate_cell(piece.cell, f, opt);
            } else {
                for (const auto& conv : intersect_polygons(piece.cell, B.polygon()))
                    sum += integrate_convex_piece(conv, f, opt);
            }
        }
    }
    for (const auto& piece : line_) {
        const PointFunc f = [&](const Vec2& p) { return eval_at(piece.density, p); };
        for (const auto& part : line_parts_in_spec(piece.seg.as_segment(), B)) {
            // Integrate |density| exactly by splitting at its roots.
            for (const auto& smooth : split_at_sign_changes(part, f))
                sum += std::abs(integrate_segment(f, smooth.a, smooth.b, opt));
        }
    }
    for (const auto& a : atoms_) {
        if (B.contains(a.point)) sum += std::abs(a.weight);
    }
    for (const auto& piece : cantor_) {
        const auto g = [&](double x) { return std::abs(piece.density.eval(x, 0.0)); };
        for (const auto& [a, b] : carrier_intervals_in_spec(piece.comp.lo, piece.comp.hi, B)) {
            const double lo = std::max(a, piece.clip_lo);
            const double hi = std::min(b, piece.clip_hi);
            if (hi <= lo) continue;
            sum += std::abs(piece.weight) * piece.comp.mass *
                   cantor_restricted_integral(g, piece.comp, lo, hi);
        }
    }
    return sum;
}

GenMeasure GenMeasure::restricted(const RegionSpec& B) const
{
    GenMeasure out;
    const bool area_counts = B.kind() == RegionSpec::Kind::Window ||
                             B.kind() == RegionSpec::Kind::Interior ||
                             B.kind() == RegionSpec::Kind::InteriorPlusBoundary;
    if (area_counts) {
        for (const auto& piece : area_) {
            if (B.kind() == RegionSpec::Kind::Window) {
                out.area_.push_back(piece);
            } else {
                for (auto& conv : intersect_polygons(piece.cell, B.polygon()))
                    out.add_area(Polygon(std::move(conv)), piece.density);
            }
        }
    }
    for (const auto& piece : line_) {
        for (const auto& part : line_parts_in_spec(piece.seg.as_segment(), B))
            out.add_line({part.a, part.b, piece.seg.normal}, piece.density);
    }
    for (const auto& a : atoms_) {
        if (B.contains(a.point)) out.atoms_.push_back(a);
    }
    for (const auto& piece : cantor_) {
        for (const auto& [a, b] : carrier_intervals_in_spec(piece.comp.lo, piece.comp.hi, B)) {
            CantorPiece clipped = piece;
            clipped.clip_lo = std::max(piece.clip_lo, a);
            clipped.clip_hi = std::min(piece.clip_hi, b);
            if (clipped.clip_hi > clipped.clip_lo) out.cantor_.push_back(std::move(clipped));
        }
    }
    return out;
}

GenMeasure& GenMeasure::operator+=(const GenMeasure& other)
{
    area_.insert(area_.end(), other.area_.begin(), other.area_.end());
    line_.insert(line_.end(), other.line_.begin(), other.line_.end());
    atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    cantor_.insert(cantor_.end(), other.cantor_.begin(), other.cantor_.end());
    return *this;
}

GenMeasure add(const GenMeasure& a, const GenMeasure& b)
{
    GenMeasure out = a;
    out += b;
    return out;
}

GenMeasure scale(double c, const GenMeasure& m)
{
    GenMeasure out;
    const Expr factor = Expr::constant(c);
    for (const auto& piece : m.area_part()) out.add_area(piece.cell, factor * piece.density);
    for (const auto& piece : m.line_part()) out.add_line(piece.seg, factor * piece.density);
    for (const auto& a : m.atom_part()) out.add_atom(a.point, c * a.weight);
    for (const auto& piece : m.cantor_part()) {
        CantorPiece scaled = piece;
        scaled.weight *= c;
        out.add_cantor(std::move(scaled));
    }
    return out;
}

GenMeasure restrict_measure(const GenMeasure& m, const RegionSpec& B) { return m.restricted(B); }

}  // namespace dmpair
