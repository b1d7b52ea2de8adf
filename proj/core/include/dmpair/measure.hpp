#pragma once

#include <limits>
#include <vector>

#include "dmpair/expr.hpp"
#include "dmpair/geometry.hpp"
#include "dmpair/quadrature.hpp"

namespace dmpair {

inline double eval_at(const Expr& e, const Vec2& p) { return e.eval(p.x, p.y); }

/// Smooth compactly supported test function: an expression together with
/// its support polygon. The function is declared zero outside the support;
/// the expression must vanish on the support boundary (validated by
/// sampling at construction).
class TestFunc {
public:
    TestFunc(Expr expr, Polygon support);

    const Expr& expr() const { return expr_; }
    const Polygon& support() const { return support_; }

    double value(const Vec2& p) const;
    Vec2 gradient(const Vec2& p) const;
    const Expr& dx() const { return dx_; }
    const Expr& dy() const { return dy_; }

    /// A polynomial bump supported on [x0,x1] x [y0,y1], normalized to peak
    /// value 1 at the center; vanishes to second order on the boundary.
    static TestFunc bump(double x0, double x1, double y0, double y1);

private:
    Expr expr_;
    Expr dx_, dy_;
    Polygon support_;
};

/// One middle-thirds Cantor block: the standard Cantor set mapped affinely
/// onto [lo, hi], carrying total mass `mass`. `depth` bounds the recursion
/// used when integrating against it (error <= modulus of continuity of the
/// integrand at scale 3^-depth).
struct CantorComponent {
    double lo = 0.0;
    double hi = 1.0;
    double mass = 1.0;
    int depth = 20;
};

/// The parts of a generalized Radon measure at desk scale.
struct AreaPiece {
    Polygon cell;
    Expr density;  // d(mu) = density dL^2 on the cell
};

struct LinePiece {
    OrientedSegment seg;
    Expr density;  // d(mu) = density dH^1 on the segment; defined at
                   // segment-interior points only
};

struct AtomPiece {
    Vec2 point;
    double weight;
};

struct CantorPiece {
    CantorComponent comp;
    Expr density;          // one-variable expression in x along the carrier
    double weight = 1.0;
    double clip_lo = -std::numeric_limits<double>::infinity();
    double clip_hi = std::numeric_limits<double>::infinity();
};

/// A generalized Radon measure with area, line, atomic and Cantor parts.
/// Supports evaluation on RegionSpecs, pairing against test functions and
/// the part-wise algebra (add, scale, restrict). All parts are mutually
/// singular by construction and evaluate independently.
///
/// Immutable after construction; evaluations are pure and the summation
/// order over pieces is the storage order, so results are reproducible.
class GenMeasure {
public:
    GenMeasure() = default;

    static GenMeasure lebesgue(const Polygon& cell, Expr density);
    static GenMeasure line(const OrientedSegment& seg, Expr density);
    static GenMeasure hausdorff1(const OrientedInterface& sigma, double density = 1.0);
    static GenMeasure atom(const Vec2& p, double weight);
    static GenMeasure cantor(const CantorComponent& comp, Expr density, double weight = 1.0);

    void add_area(Polygon cell, Expr density);
    void add_line(OrientedSegment seg, Expr density);
    void add_atom(Vec2 p, double weight);
    void add_cantor(CantorPiece piece);

    const std::vector<AreaPiece>& area_part() const { return area_; }
    const std::vector<LinePiece>& line_part() const { return line_; }
    const std::vector<AtomPiece>& atom_part() const { return atoms_; }
    const std::vector<CantorPiece>& cantor_part() const { return cantor_; }

    bool empty() const
    {
        return area_.empty() && line_.empty() && atoms_.empty() && cantor_.empty();
    }

    /// mu(B).
    double eval_on(const RegionSpec& B, const QuadratureOptions& opt = {}) const;
    /// integral of phi d(mu).
    double pair_test(const TestFunc& phi, const QuadratureOptions& opt = {}) const;
    /// |mu|(B).
    double total_variation(const RegionSpec& B, const QuadratureOptions& opt = {}) const;

    /// mu restricted to B (polygon and segment clipping is exact).
    GenMeasure restricted(const RegionSpec& B) const;

    GenMeasure& operator+=(const GenMeasure& other);
    friend GenMeasure operator+(GenMeasure a, const GenMeasure& b) { return a += b; }

private:
    std::vector<AreaPiece> area_;
    std::vector<LinePiece> line_;
    std::vector<AtomPiece> atoms_;
    std::vector<CantorPiece> cantor_;
};

GenMeasure add(const GenMeasure& a, const GenMeasure& b);
GenMeasure scale(double c, const GenMeasure& m);
GenMeasure restrict_measure(const GenMeasure& m, const RegionSpec& B);

}  // namespace dmpair
