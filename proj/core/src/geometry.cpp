#include "dmpair/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace dmpair {

Vec2 Vec2::normalized() const
{
    const double n = norm();
    if (n < kGeomEps) throw GeometryError("cannot normalize a near-zero vector");
    return {x / n, y / n};
}

double signed_area(const std::vector<Vec2>& vertices)
{
    double twice = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = vertices[i];
        const Vec2& q = vertices[(i + 1) % n];
        twice += p.cross(q);
    }
    return 0.5 * twice;
}

namespace {

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        const double v = (q - p).cross(r - p);
        if (v > kGeomEps) return 1;
        if (v < -kGeomEps) return -1;
        return 0;
    };
    const int o1 = orient(a, b, c);
    const int o2 = orient(a, b, d);
    const int o3 = orient(c, d, a);
    const int o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 == 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
    return distance_to_segment(p, a, b) <= kGeomEps;
}

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
{
    const std::size_t n = vertices_.size();
    if (n < 3) throw GeometryError("polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i) {
        if ((vertices_[i] - vertices_[(i + 1) % n]).norm() <= kGeomEps)
            throw GeometryError("polygon has coincident consecutive vertices");
    }
    area_ = signed_area(vertices_);
    if (area_ <= kGeomEps * kGeomEps)
        throw GeometryError("polygon must be counterclockwise with positive area");
    // Simplicity: no two non-adjacent edges may cross.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1)))
                throw GeometryError("polygon is self-intersecting");
        }
    }
}

Polygon Polygon::rectangle(double xmin, double xmax, double ymin, double ymax)
{
    return Polygon({{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}});
}

Polygon Polygon::from_window(const Window& w)
{
    return rectangle(w.xmin, w.xmax, w.ymin, w.ymax);
}

PointClass Polygon::classify(const Vec2& p) const
{
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if ((p - vertices_[i]).norm() <= kGeomEps) return PointClass::Vertex;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, vertex(i), vertex(i + 1))) return PointClass::Boundary;
    }
    // Crossing-number test; p is now strictly off the boundary.
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertex(i);
        const Vec2& b = vertex(i + 1);
        if ((a.y > p.y) != (b.y > p.y)) {
            const double t = (p.y - a.y) / (b.y - a.y);
            const double xint = a.x + t * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside ? PointClass::Interior : PointClass::Exterior;
}

double Polygon::corner_density(std::size_t i) const
{
    const Vec2 prev = vertex(i + vertices_.size() - 1);
    const Vec2 here = vertex(i);
    const Vec2 next = vertex(i + 1);
    const Vec2 u = (prev - here).normalized();
    const Vec2 v = (next - here).normalized();
    double angle = std::atan2(v.cross(u), v.dot(u));
    if (angle < 0) angle += 2.0 * M_PI;
    return angle / (2.0 * M_PI);
}

std::vector<Triangle> triangulate(const Polygon& p)
{
    std::vector<Vec2> verts = p.vertices();
    std::vector<Triangle> out;
    out.reserve(verts.size() - 2);

    const auto is_convex = [&](std::size_t i) {
        const std::size_t n = verts.size();
        const Vec2& a = verts[(i + n - 1) % n];
        const Vec2& b = verts[i];
        const Vec2& c = verts[(i + 1) % n];
        return (b - a).cross(c - b) > kGeomEps;
    };
    const auto point_in_triangle = [](const Vec2& q, const Vec2& a, const Vec2& b, const Vec2& c) {
        const double d1 = (b - a).cross(q - a);
        const double d2 = (c - b).cross(q - b);
        const double d3 = (a - c).cross(q - c);
        return d1 > kGeomEps && d2 > kGeomEps && d3 > kGeomEps;
    };

    // Ear clipping. O(n^2) but our polygons are tiny.
    std::size_t guard = 0;
    while (verts.size() > 3) {
        const std::size_t n = verts.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_convex(i)) continue;
            const Vec2& a = verts[(i + n - 1) % n];
            const Vec2& b = verts[i];
            const Vec2& c = verts[(i + 1) % n];
            bool ear = true;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
                if (point_in_triangle(verts[j], a, b, c)) {
                    ear = false;
                    break;
                }
            }
            if (!ear) continue;
            Triangle t{a, b, c};
            if (t.area() > kGeomEps * kGeomEps) out.push_back(t);
            verts.erase(verts.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            if (++guard > 4) throw GeometryError("triangulation failed (degenerate polygon)");
        } else {
            guard = 0;
        }
    }
    Triangle last{verts[0], verts[1], verts[2]};
    if (last.area() > kGeomEps * kGeomEps) out.push_back(last);
    return out;
}

OrientedInterface::OrientedInterface(std::vector<OrientedSegment> segments)
    : segments_(std::move(segments))
{
    for (auto& s : segments_) {
        if (s.length() <= kGeomEps) throw GeometryError("interface segment is degenerate");
        if (std::abs(s.normal.norm() - 1.0) > 1e-12)
            throw GeometryError("interface normal must be a unit vector");
        if (std::abs(s.normal.dot(s.b - s.a)) > kGeomEps * s.length())
            throw GeometryError("interface normal must be perpendicular to the segment");
    }
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        for (std::size_t j = i + 1; j < segments_.size(); ++j) {
            if (segments_properly_intersect(segments_[i].a, segments_[i].b, segments_[j].a,
                                            segments_[j].b))
                throw GeometryError("interface segments cross");
        }
    }
}

double OrientedInterface::total_length() const
{
    double len = 0.0;
    for (const auto& s : segments_) len += s.length();
    return len;
}

OrientedInterface OrientedInterface::flipped() const
{
    std::vector<OrientedSegment> out;
    out.reserve(segments_.size());
    for (const auto& s : segments_) out.push_back(s.flipped());
    return OrientedInterface(std::move(out));
}

OrientedInterface OrientedInterface::split_at(const std::vector<Vec2>& points) const
{
    std::vector<OrientedSegment> out;
    for (const auto& s : segments_) {
        std::vector<double> params{0.0, 1.0};
        const Vec2 d = s.b - s.a;
        const double len2 = d.dot(d);
        for (const auto& p : points) {
            if (!on_segment(p, s.a, s.b)) continue;
            const double t = (p - s.a).dot(d) / len2;
            if (t > kGeomEps && t < 1.0 - kGeomEps) params.push_back(t);
        }
        std::sort(params.begin(), params.end());
        for (std::size_t k = 0; k + 1 < params.size(); ++k) {
            if (params[k + 1] - params[k] < kGeomEps) continue;
            out.push_back({s.point_at(params[k]), s.point_at(params[k + 1]), s.normal});
        }
    }
    return OrientedInterface(std::move(out));
}

OrientedInterface reduced_boundary(const Polygon& p)
{
    std::vector<OrientedSegment> segs;
    segs.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Segment e = p.edge(i);
        // Counterclockwise order makes the +90 degree rotation of the edge
        // direction point into the polygon: the interior normal.
        const Vec2 nu = (e.b - e.a).normalized().perp();
        segs.push_back({e.a, e.b, nu});
    }
    return OrientedInterface(std::move(segs));
}

RegionSpec RegionSpec::window()
{
    RegionSpec r;
    r.kind_ = Kind::Window;
    return r;
}

RegionSpec RegionSpec::interior(Polygon p)
{
    RegionSpec r;
    r.kind_ = Kind::Interior;
    r.polygon_ = std::move(p);
    return r;
}

RegionSpec RegionSpec::interior_plus_boundary(Polygon p)
{
    RegionSpec r;
    r.kind_ = Kind::InteriorPlusBoundary;
    r.polygon_ = std::move(p);
    return r;
}

RegionSpec RegionSpec::interface_restriction(OrientedInterface sigma)
{
    RegionSpec r;
    r.kind_ = Kind::Interface;
    r.interface_ = std::move(sigma);
    return r;
}

RegionSpec RegionSpec::interval(double lo, double hi)
{
    if (hi < lo) throw GeometryError("interval with hi < lo");
    RegionSpec r;
    r.kind_ = Kind::Interval;
    r.lo_ = lo;
    r.hi_ = hi;
    return r;
}

const Polygon& RegionSpec::polygon() const
{
    if (kind_ != Kind::Interior && kind_ != Kind::InteriorPlusBoundary)
        throw GeometryError("RegionSpec has no polygon");
    return polygon_;
}

const OrientedInterface& RegionSpec::interface_set() const
{
    if (kind_ != Kind::Interface) throw GeometryError("RegionSpec has no interface");
    return interface_;
}

bool RegionSpec::contains(const Vec2& p) const
{
    switch (kind_) {
        case Kind::Window: return true;
        case Kind::Interior: return polygon_.classify(p) == PointClass::Interior;
        case Kind::InteriorPlusBoundary: {
            const PointClass c = polygon_.classify(p);
            return c == PointClass::Interior || c == PointClass::Boundary;
        }
        case Kind::Interface:
            for (const auto& s : interface_.segments()) {
                if (!on_segment(p, s.a, s.b)) continue;
                // Segment endpoints (interface vertices) are excluded.
                if ((p - s.a).norm() <= kGeomEps || (p - s.b).norm() <= kGeomEps) continue;
                return true;
            }
            return false;
        case Kind::Interval:
            return std::abs(p.y) <= kGeomEps && p.x >= lo_ - kGeomEps && p.x <= hi_ + kGeomEps;
    }
    return false;
}

double density_at(const Polygon& p, const Vec2& x)
{
    switch (p.classify(x)) {
        case PointClass::Interior: return 1.0;
        case PointClass::Exterior: return 0.0;
        case PointClass::Boundary: return 0.5;
        case PointClass::Vertex: {
            for (std::size_t i = 0; i < p.size(); ++i) {
                if ((x - p.vertex(i)).norm() <= kGeomEps) return p.corner_density(i);
            }
            return 0.5;  // unreachable
        }
    }
    return 0.0;
}

bool point_in_region(const RegionSpec& spec, const Vec2& x) { return spec.contains(x); }

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& subject, const Vec2& n, double c)
{
    std::vector<Vec2> out;
    const std::size_t m = subject.size();
    if (m == 0) return out;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& cur = subject[i];
        const Vec2& nxt = subject[(i + 1) % m];
        const double dc = n.dot(cur) - c;
        const double dn = n.dot(nxt) - c;
        const bool cin = dc >= -kGeomEps;
        const bool nin = dn >= -kGeomEps;
        if (cin) out.push_back(cur);
        if (cin != nin) {
            const double t = dc / (dc - dn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    // Drop duplicate points introduced by tangential clips.
    std::vector<Vec2> dedup;
    for (const auto& v : out) {
        if (dedup.empty() || (v - dedup.back()).norm() > kGeomEps) dedup.push_back(v);
    }
    while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= kGeomEps) dedup.pop_back();
    if (dedup.size() < 3) return {};
    return dedup;
}

std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip)
{
    std::vector<Vec2> poly = subject;
    const std::size_t m = clip.size();
    for (std::size_t i = 0; i < m && !poly.empty(); ++i) {
        const Vec2& a = clip[i];
        const Vec2& b = clip[(i + 1) % m];
        const Vec2 inward = (b - a).perp();  // ccw clip polygon: perp points inside
        poly = clip_halfplane(poly, inward, inward.dot(a));
    }
    if (poly.size() < 3 || std::abs(signed_area(poly)) < kGeomEps * kGeomEps) return {};
    return poly;
}

std::vector<std::vector<Vec2>> intersect_polygons(const Polygon& a, const Polygon& b)
{
    std::vector<std::vector<Vec2>> pieces;
    const auto tris_a = triangulate(a);
    const auto tris_b = triangulate(b);
    for (const auto& ta : tris_a) {
        const std::vector<Vec2> sa{ta.a, ta.b, ta.c};
        for (const auto& tb : tris_b) {
            const std::vector<Vec2> sb{tb.a, tb.b, tb.c};
            auto piece = clip_convex(sa, sb);
            if (!piece.empty()) pieces.push_back(std::move(piece));
        }
    }
    return pieces;
}

std::optional<std::pair<double, double>> overlap_parameters(const Segment& s, const Segment& t)
{
    const Vec2 d = s.b - s.a;
    const double len = d.norm();
    const Vec2 dir = d * (1.0 / len);
    // Both endpoints of t must lie on the line through s.
    const double off_a = (t.a - s.a).cross(dir);
    const double off_b = (t.b - s.a).cross(dir);
    if (std::abs(off_a) > kGeomEps || std::abs(off_b) > kGeomEps) return std::nullopt;
    double ta = (t.a - s.a).dot(dir) / len;
    double tb = (t.b - s.a).dot(dir) / len;
    if (ta > tb) std::swap(ta, tb);
    const double lo = std::max(0.0, ta);
    const double hi = std::min(1.0, tb);
    if (hi - lo <= kGeomEps / len) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::optional<Segment> collinear_overlap(const Segment& s, const Segment& t)
{
    const auto params = overlap_parameters(s, t);
    if (!params) return std::nullopt;
    return Segment{s.point_at(params->first), s.point_at(params->second)};
}

std::vector<ClippedPiece> clip_segment_to_polygon(const Segment& s, const Polygon& p)
{
    // Gather the crossing parameters of s with all polygon edges, then
    // classify each resulting sub-segment by its midpoint.
    std::vector<double> params{0.0, 1.0};
    const Vec2 d = s.b - s.a;
    const double len = d.norm();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Segment e = p.edge(i);
        const Vec2 r = e.b - e.a;
        const double denom = d.cross(r);
        if (std::abs(denom) > kGeomEps) {
            const double t = (e.a - s.a).cross(r) / denom;
            const double u = (e.a - s.a).cross(d) / denom;
            if (t > kGeomEps && t < 1.0 - kGeomEps && u > -kGeomEps && u < 1.0 + kGeomEps)
                params.push_back(t);
        } else {
            // Collinear edge: its endpoints delimit on-boundary pieces.
            if (auto ov = overlap_parameters(s, e)) {
                if (ov->first > kGeomEps && ov->first < 1.0 - kGeomEps) params.push_back(ov->first);
                if (ov->second > kGeomEps && ov->second < 1.0 - kGeomEps)
                    params.push_back(ov->second);
            }
        }
        // Vertices touching the segment also split it.
        if (on_segment(e.a, s.a, s.b)) {
            const double t = (e.a - s.a).dot(d) / (len * len);
            if (t > kGeomEps && t < 1.0 - kGeomEps) params.push_back(t);
        }
    }
    std::sort(params.begin(), params.end());
    std::vector<ClippedPiece> out;
    for (std::size_t k = 0; k + 1 < params.size(); ++k) {
        const double t0 = params[k];
        const double t1 = params[k + 1];
        if ((t1 - t0) * len <= kGeomEps) continue;
        const Vec2 mid = s.point_at(0.5 * (t0 + t1));
        const PointClass c = p.classify(mid);
        if (c == PointClass::Interior) {
            out.push_back({{s.point_at(t0), s.point_at(t1)}, false});
        } else if (c == PointClass::Boundary || c == PointClass::Vertex) {
            out.push_back({{s.point_at(t0), s.point_at(t1)}, true});
        }
    }
    return out;
}

}  // namespace dmpair
