#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dmpair/expr.hpp"

namespace dmpair {

class GeometryError : public Error {
public:
    using Error::Error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    /// Rotation by +90 degrees: (x, y) -> (-y, x).
    Vec2 perp() const { return {-y, x}; }
    Vec2 normalized() const;
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Geometric comparison tolerance at desk scale. All scenario geometry
/// lives in windows of diameter O(1..10), so an absolute snap tolerance
/// is appropriate.
constexpr double kGeomEps = 1e-9;

struct Segment {
    Vec2 a, b;
    double length() const { return (b - a).norm(); }
    Vec2 midpoint() const { return (a + b) * 0.5; }
    Vec2 point_at(double t) const { return a + (b - a) * t; }
    Vec2 direction() const { return (b - a).normalized(); }
};

/// A segment together with a unit normal. The normal fixes the orientation
/// used by traces: the "+" side is the side the normal points into.
struct OrientedSegment {
    Vec2 a, b;
    Vec2 normal;

    double length() const { return (b - a).norm(); }
    Vec2 midpoint() const { return (a + b) * 0.5; }
    Vec2 point_at(double t) const { return a + (b - a) * t; }
    Vec2 direction() const { return (b - a).normalized(); }
    OrientedSegment flipped() const { return {a, b, -normal}; }
    Segment as_segment() const { return {a, b}; }
};

struct Triangle {
    Vec2 a, b, c;
    double area() const { return 0.5 * (b - a).cross(c - a); }
    Vec2 centroid() const { return (a + b + c) * (1.0 / 3.0); }
};

/// Axis-aligned working window. Every scenario fixes one; all fields,
/// functions and measures live inside it, which keeps every integral finite.
struct Window {
    double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p) const
    {
        return p.x >= xmin - kGeomEps && p.x <= xmax + kGeomEps && p.y >= ymin - kGeomEps &&
               p.y <= ymax + kGeomEps;
    }
    std::vector<Vec2> corners() const
    {
        return {{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
    }
};

enum class PointClass { Interior, Boundary, Vertex, Exterior };

/// Simple polygon with counterclockwise vertex order and positive area.
class Polygon {
public:
    Polygon() = default;
    /// Throws GeometryError unless the vertex list is simple, free of
    /// repeated vertices and counterclockwise.
    explicit Polygon(std::vector<Vec2> vertices);

    static Polygon rectangle(double xmin, double xmax, double ymin, double ymax);
    static Polygon from_window(const Window& w);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Vec2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }

    double area() const { return area_; }
    Segment edge(std::size_t i) const { return {vertex(i), vertex(i + 1)}; }

    PointClass classify(const Vec2& p) const;
    bool contains_interior(const Vec2& p) const { return classify(p) == PointClass::Interior; }
    bool contains_closed(const Vec2& p) const { return classify(p) != PointClass::Exterior; }

    /// Interior angle at vertex i divided by 2*pi (the planar density of the
    /// polygon at its own corner).
    double corner_density(std::size_t i) const;

private:
    std::vector<Vec2> vertices_;
    double area_ = 0.0;
};

/// Shoelace area of a (not necessarily validated) ccw vertex loop.
double signed_area(const std::vector<Vec2>& vertices);
inline double signed_area(const Polygon& p) { return signed_area(p.vertices()); }

/// Fan/ear-clipping triangulation of a simple polygon. The triangle areas
/// sum to the polygon area up to rounding.
std::vector<Triangle> triangulate(const Polygon& p);

/// A countably rectifiable set at desk scale: finitely many oriented
/// segments, pairwise non-crossing except at shared endpoints. Carries
/// Sigma, J_u and reduced boundaries.
class OrientedInterface {
public:
    OrientedInterface() = default;
    explicit OrientedInterface(std::vector<OrientedSegment> segments);

    const std::vector<OrientedSegment>& segments() const { return segments_; }
    bool empty() const { return segments_.empty(); }
    std::size_t size() const { return segments_.size(); }
    const OrientedSegment& segment(std::size_t i) const { return segments_[i]; }

    double total_length() const;
    OrientedInterface flipped() const;

    /// Split every segment at the given points that lie in its interior.
    OrientedInterface split_at(const std::vector<Vec2>& points) const;

private:
    std::vector<OrientedSegment> segments_;
};

/// The edges of a polygon oriented by the measure-theoretic interior unit
/// normal. For polygons the reduced boundary is exactly the union of open
/// edges (vertices are H^1-null and excluded from every interface
/// computation).
OrientedInterface reduced_boundary(const Polygon& p);

/// Borel sets on which measures are evaluated. Only the algebra the
/// identities need: the whole window, the measure-theoretic interior E^1 of
/// a polygon, E^1 together with reduced-boundary segments, the restriction
/// to an interface, and (for the 1D machinery embedded on the x-axis) a
/// closed interval.
class RegionSpec {
public:
    enum class Kind { Window, Interior, InteriorPlusBoundary, Interface, Interval };

    static RegionSpec window();
    static RegionSpec interior(Polygon p);
    static RegionSpec interior_plus_boundary(Polygon p);
    static RegionSpec interface_restriction(OrientedInterface sigma);
    static RegionSpec interval(double lo, double hi);

    Kind kind() const { return kind_; }
    const Polygon& polygon() const;
    const OrientedInterface& interface_set() const;
    double interval_lo() const { return lo_; }
    double interval_hi() const { return hi_; }

    /// Membership per the density conventions: polygon vertices are never
    /// members of interface specs; edge-interior points belong to
    /// InteriorPlusBoundary but not to Interior.
    bool contains(const Vec2& p) const;

private:
    RegionSpec() = default;
    Kind kind_ = Kind::Window;
    Polygon polygon_;
    OrientedInterface interface_;
    double lo_ = 0.0, hi_ = 0.0;
};

/// Lebesgue density of the polygon at a point: 1 on the interior, 0
/// outside, 1/2 at edge-interior points, interior-angle/2pi at a vertex.
double density_at(const Polygon& p, const Vec2& x);

bool point_in_region(const RegionSpec& spec, const Vec2& x);

// -- low-level helpers shared by the measure/field machinery --

/// True if p lies on segment [a, b] within kGeomEps (endpoints included).
bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Collinear overlap of two segments, if longer than kGeomEps.
std::optional<Segment> collinear_overlap(const Segment& s, const Segment& t);

/// Intersection of two convex polygons via Sutherland-Hodgman clipping.
/// Returns an empty list when the intersection is degenerate.
std::vector<Vec2> clip_convex(const std::vector<Vec2>& subject, const std::vector<Vec2>& clip);

/// Clip a convex polygon by the half plane n.x >= c (keeps that side).
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& subject, const Vec2& n, double c);

/// Intersection of two simple polygons as a list of convex pieces
/// (triangle-by-triangle clipping). Exact up to arithmetic for conforming
/// desk-scale inputs.
std::vector<std::vector<Vec2>> intersect_polygons(const Polygon& a, const Polygon& b);

/// Portions of a segment lying inside the closed polygon, each tagged with
/// whether the portion runs along the polygon boundary.
struct ClippedPiece {
    Segment seg;
    bool on_boundary = false;
};
std::vector<ClippedPiece> clip_segment_to_polygon(const Segment& s, const Polygon& p);

/// Parameter interval [t0, t1] of `s` overlapping segment `t`, if collinear.
std::optional<std::pair<double, double>> overlap_parameters(const Segment& s, const Segment& t);

}  // namespace dmpair
