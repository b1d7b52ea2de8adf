#include "dmpair/cantor.hpp"

#include <algorithm>
#include <cmath>

#include "dmpair/quadrature.hpp"

namespace dmpair {

double cantor_vitali(double x)
{
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double t = x;
    double value = 0.0;
    double scale = 0.5;
    for (int i = 0; i < 64 && t > 0.0; ++i) {
        t *= 3.0;
        int digit = static_cast<int>(t);
        if (digit > 2) digit = 2;
        t -= digit;
        if (digit == 1) return value + scale;  // inside a removed interval: plateau
        if (digit == 2) value += scale;
        scale *= 0.5;
    }
    return value;
}

bool in_cantor_set(double t)
{
    if (t < 0.0 || t > 1.0) return false;
    for (int i = 0; i < 40; ++i) {
        if (t <= 0.0 || t >= 1.0) return true;  // endpoint of a kept interval
        t *= 3.0;
        int digit = static_cast<int>(t);
        if (digit > 2) digit = 2;
        t -= digit;
        if (digit == 1) {
            // Strictly inside the middle third, up to the resolution floor.
            if (t > 1e-12 && t < 1.0 - 1e-12) return false;
            return true;
        }
    }
    return true;
}

namespace {

double cantor_rec(const std::function<double(double)>& g, double lo, double hi, double mass,
                  int depth)
{
    if (depth == 0) return mass * g(0.5 * (lo + hi));
    const double len = (hi - lo) / 3.0;
    return cantor_rec(g, lo, lo + len, 0.5 * mass, depth - 1) +
           cantor_rec(g, hi - len, hi, 0.5 * mass, depth - 1);
}

double cantor_rec_restricted(const std::function<double(double)>& g, double lo, double hi,
                             double mass, int depth, double a, double b)
{
    if (hi <= a || lo >= b) return 0.0;
    if (depth == 0) {
        // Exact partial mass of the block via the Cantor-Vitali function.
        const double ta = std::max(0.0, (a - lo) / (hi - lo));
        const double tb = std::min(1.0, (b - lo) / (hi - lo));
        const double frac = cantor_vitali(tb) - cantor_vitali(ta);
        return mass * frac * g(0.5 * (std::max(lo, a) + std::min(hi, b)));
    }
    const double len = (hi - lo) / 3.0;
    return cantor_rec_restricted(g, lo, lo + len, 0.5 * mass, depth - 1, a, b) +
           cantor_rec_restricted(g, hi - len, hi, 0.5 * mass, depth - 1, a, b);
}

}  // namespace

double cantor_integrate(const std::function<double(double)>& g, int depth)
{
    if (depth < 1 || depth > 40) throw Error("cantor_integrate depth must be in [1, 40]");
    return cantor_rec(g, 0.0, 1.0, 1.0, depth);
}

double cantor_restricted_integral(const std::function<double(double)>& g,
                                  const CantorComponent& comp, double a, double b)
{
    const double lo = std::max(a, comp.lo);
    const double hi = std::min(b, comp.hi);
    if (hi <= lo) return 0.0;
    return cantor_rec_restricted(g, comp.lo, comp.hi, 1.0, std::clamp(comp.depth, 1, 40), lo, hi);
}

double cantor_component_mass(const CantorComponent& comp, double a, double b)
{
    const double width = comp.hi - comp.lo;
    const double ta = (a - comp.lo) / width;
    const double tb = (b - comp.lo) / width;
    return comp.mass * (cantor_vitali(tb) - cantor_vitali(ta));
}

PiecewiseExpr1D::PiecewiseExpr1D(double lo, double hi, std::vector<double> breakpoints,
                                 std::vector<Expr> pieces)
    : lo_(lo), hi_(hi), breaks_(std::move(breakpoints)), pieces_(std::move(pieces))
{
    if (hi_ <= lo_) throw Error("1D domain must have positive length");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()))
        throw Error("breakpoints must be sorted");
    for (double b : breaks_) {
        if (b <= lo_ || b >= hi_) throw Error("breakpoints must lie inside the domain");
    }
    if (pieces_.size() != breaks_.size() + 1)
        throw Error("need exactly one piece per sub-interval");
}

std::size_t PiecewiseExpr1D::piece_index_at(double x) const
{
    std::size_t i = 0;
    while (i < breaks_.size() && x >= breaks_[i]) ++i;
    return i;
}

double PiecewiseExpr1D::value(double x) const
{
    return pieces_[piece_index_at(x)].eval(x, 0.0);
}

double PiecewiseExpr1D::left_limit(double x0) const
{
    std::size_t i = 0;
    while (i < breaks_.size() && x0 > breaks_[i]) ++i;
    // Piece i covers the interval ending at x0 (or containing it).
    return pieces_[i].eval(x0, 0.0);
}

double PiecewiseExpr1D::right_limit(double x0) const
{
    std::size_t i = 0;
    while (i < breaks_.size() && x0 >= breaks_[i]) ++i;
    return pieces_[i].eval(x0, 0.0);
}

std::vector<double> PiecewiseExpr1D::jump_points() const
{
    std::vector<double> out;
    for (double b : breaks_) {
        if (std::abs(right_limit(b) - left_limit(b)) > 1e-13) out.push_back(b);
    }
    return out;
}

BVFunc1D::BVFunc1D(PiecewiseExpr1D base, std::vector<CantorComponent> cantor)
    : base_(std::move(base)), cantor_(std::move(cantor))
{
    for (const auto& c : cantor_) {
        if (c.hi <= c.lo) throw Error("Cantor component with empty carrier interval");
        if (c.mass < 0.0) throw Error("Cantor component mass must be non-negative");
    }
}

double BVFunc1D::value(double x) const
{
    double v = base_.value(x);
    for (const auto& c : cantor_) v += c.mass * cantor_vitali((x - c.lo) / (c.hi - c.lo));
    return v;
}

GenMeasure BVFunc1D::derivative() const
{
    GenMeasure m;
    const Vec2 up{0.0, 1.0};
    for (std::size_t i = 0; i < base_.piece_count(); ++i) {
        m.add_line({{base_.left(i), 0.0}, {base_.right(i), 0.0}, up},
                   base_.piece(i).diff(Var::X));
    }
    for (double b : base_.jump_points())
        m.add_atom({b, 0.0}, base_.right_limit(b) - base_.left_limit(b));
    for (const auto& c : cantor_) m.add_cantor({c, Expr::constant(1.0), 1.0});
    return m;
}

GenMeasure pairing_1d(const PiecewiseExpr1D& A, const BVFunc1D& u)
{
    // Hypothesis check: a genuine jump of A sitting on a Cantor carrier
    // leaves the Cantor part of the pairing uncharacterized.
    for (double xj : A.jump_points()) {
        for (const auto& c : u.cantor_components()) {
            const double t = (xj - c.lo) / (c.hi - c.lo);
            if (t >= 0.0 && t <= 1.0 && in_cantor_set(t)) {
                throw HypothesisViolation(
                    "field jump point lies on a Cantor carrier; the Cantor part of the "
                    "pairing is undefined",
                    c.mass);
            }
        }
    }

    GenMeasure m;
    const Vec2 up{0.0, 1.0};
    const auto& base = u.base();

    // Absolutely continuous part A u' on the common sub-intervals.
    std::vector<double> cuts{base.lo(), base.hi()};
    cuts.insert(cuts.end(), base.breakpoints().begin(), base.breakpoints().end());
    cuts.insert(cuts.end(), A.breakpoints().begin(), A.breakpoints().end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const Expr density =
            A.piece(A.piece_index_at(mid)) * base.piece(base.piece_index_at(mid)).diff(Var::X);
        m.add_line({{cuts[k], 0.0}, {cuts[k + 1], 0.0}, up}, density);
    }

    // Jump part: one atom per jump of u with the averaged one-sided limits
    // of A (the 1D weak normal traces).
    for (double xj : base.jump_points()) {
        const double alpha_star = 0.5 * (A.left_limit(xj) + A.right_limit(xj));
        m.add_atom({xj, 0.0}, alpha_star * (base.right_limit(xj) - base.left_limit(xj)));
    }

    // Cantor part: the approximate limit of A against each component,
    // clipped to the sub-intervals where A is smooth.
    for (const auto& c : u.cantor_components()) {
        for (std::size_t i = 0; i < A.piece_count(); ++i) {
            const double a = std::max(A.left(i), c.lo);
            const double b = std::min(A.right(i), c.hi);
            if (b <= a) continue;
            CantorPiece piece{c, A.piece(i), 1.0, a, b};
            m.add_cantor(std::move(piece));
        }
    }
    return m;
}

EvenStepSet::EvenStepSet(int levels) : levels_(levels)
{
    if (levels < 1 || levels > 12) throw Error("EvenStepSet levels must be in [1, 12]");
    std::vector<std::pair<double, double>> kept{{0.0, 1.0}};
    for (int step = 1; step <= 2 * levels; ++step) {
        std::vector<std::pair<double, double>> next;
        next.reserve(kept.size() * 2);
        for (const auto& [a, b] : kept) {
            const double len = (b - a) / 3.0;
            if (step % 2 == 0) intervals_.emplace_back(a + len, b - len);
            next.emplace_back(a, a + len);
            next.emplace_back(b - len, b);
        }
        kept = std::move(next);
    }
    std::sort(intervals_.begin(), intervals_.end());
}

double EvenStepSet::total_length() const
{
    double len = 0.0;
    for (const auto& [a, b] : intervals_) len += b - a;
    return len;
}

double EvenStepSet::measure_in(double a, double b) const
{
    double len = 0.0;
    for (const auto& [lo, hi] : intervals_) {
        const double l = std::max(a, lo);
        const double h = std::min(b, hi);
        if (h > l) len += h - l;
    }
    return len;
}

bool EvenStepSet::contains(double x) const
{
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(),
                               std::make_pair(x, std::numeric_limits<double>::infinity()));
    if (it == intervals_.begin()) return false;
    --it;
    return x > it->first && x < it->second;
}

std::pair<double, double> counterexample_probe(int levels, double x,
                                               const std::vector<double>& radii,
                                               bool require_in_cantor)
{
    if (require_in_cantor && !in_cantor_set(x))
        throw Error("probe point does not belong to the Cantor set");
    const EvenStepSet E(levels);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double r : radii) {
        if (r <= 0.0) throw Error("probe radius must be positive");
        const double q = E.measure_in(x - r, x + r) / (2.0 * r);
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

IpoViolationDemo ipo_violation_demo(double a, double b)
{
    if (b <= a) throw Error("strip must have positive height");
    // The field (0, chi_E(x)) has S_A = C x R and zero divergence; the
    // function psi(x) has D^c u = mu_C x L^1 in the strip. The product
    // structure gives |D^c u|(S_A intersect (0,1) x (a,b)) = mu_C(C) (b-a).
    const double mass = (cantor_vitali(1.0) - cantor_vitali(0.0)) * (b - a);
    return IpoViolationDemo{a, b, mass,
                            HypothesisViolation(
                                "Cantor part of Du charges the discontinuity set of the field "
                                "(mass equals the strip height); pairing refused",
                                mass)};
}

GenMeasure counterexample_pairing_measure(double a, double b)
{
    throw ipo_violation_demo(a, b).refusal;
}

double counterexample_divergence_pairing(const TestFunc& phi, int levels)
{
    const EvenStepSet E(levels);
    // <Div A, phi> = -int A . grad(phi) = -int_E ( int d(phi)/dy dy ) dx,
    // by nested Gauss quadrature over each interval of E and the support.
    double ymin = phi.support().vertices()[0].y;
    double ymax = ymin;
    double xmin = phi.support().vertices()[0].x;
    double xmax = xmin;
    for (const auto& v : phi.support().vertices()) {
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
    }
    double sum = 0.0;
    for (const auto& [lo, hi] : E.intervals()) {
        const double a = std::max(lo, xmin);
        const double b = std::min(hi, xmax);
        if (b <= a) continue;
        sum += gauss_legendre_32(
            [&](double x) {
                return gauss_legendre_32([&](double y) { return phi.gradient({x, y}).y; }, ymin,
                                         ymax);
            },
            a, b);
    }
    return -sum;
}

}  // namespace dmpair
