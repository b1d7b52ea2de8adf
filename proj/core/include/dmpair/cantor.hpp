#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dmpair/measure.hpp"

namespace dmpair {

/// Raised when a computation requires the Cantor part of Du to give no mass
/// to the discontinuity set of the field and that hypothesis fails. The
/// offending mass is carried along; no numeric fallback is defined.
class HypothesisViolation : public Error {
public:
    HypothesisViolation(const std::string& what, double cantor_mass)
        : Error(what), cantor_mass_(cantor_mass)
    {
    }
    /// |D^c u| of the field's discontinuity set.
    double cantor_mass_on_discontinuity() const { return cantor_mass_; }

private:
    double cantor_mass_;
};

/// The Cantor-Vitali function, extended by 0 for x < 0 and 1 for x > 1.
/// Computed by the ternary-digit algorithm to double precision.
double cantor_vitali(double x);

/// Membership in the middle-thirds Cantor set, resolved down to scale
/// 3^-40 by ternary digit extraction.
bool in_cantor_set(double t);

/// Integral of g against the unit-mass Cantor measure on [0, 1]. The
/// self-similar recursion is truncated at `depth` with midpoint closure;
/// the error is bounded by the modulus of continuity of g at scale
/// 3^-depth. Cost grows like 2^depth; depth <= 40 is accepted.
double cantor_integrate(const std::function<double(double)>& g, int depth = 20);

/// Integral of g over carrier([comp]) intersected with [a, b], normalized
/// to unit total mass (multiply by comp.mass for the measure value).
/// Partial blocks at the recursion floor are weighted by their exact
/// Cantor-Vitali mass, so constants integrate exactly.
double cantor_restricted_integral(const std::function<double(double)>& g,
                                  const CantorComponent& comp, double a, double b);

/// mu_C([a, b]) for the component, exactly, via the Cantor-Vitali function.
double cantor_component_mass(const CantorComponent& comp, double a, double b);

/// Piecewise-smooth function of one variable on [lo, hi]: interior
/// breakpoints and one expression (in x) per sub-interval.
class PiecewiseExpr1D {
public:
    PiecewiseExpr1D(double lo, double hi, std::vector<double> breakpoints,
                    std::vector<Expr> pieces);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& breakpoints() const { return breaks_; }
    std::size_t piece_count() const { return pieces_.size(); }
    const Expr& piece(std::size_t i) const { return pieces_[i]; }
    /// Sub-interval [left(i), right(i)] carrying piece i.
    double left(std::size_t i) const { return i == 0 ? lo_ : breaks_[i - 1]; }
    double right(std::size_t i) const { return i == breaks_.size() ? hi_ : breaks_[i]; }

    std::size_t piece_index_at(double x) const;
    double value(double x) const;
    double left_limit(double x0) const;
    double right_limit(double x0) const;
    /// Breakpoints where the one-sided limits genuinely differ.
    std::vector<double> jump_points() const;

private:
    double lo_, hi_;
    std::vector<double> breaks_;
    std::vector<Expr> pieces_;
};

/// A 1D BV function: a piecewise-smooth part plus Cantor components. The
/// derivative has an absolutely continuous part on each smooth piece, an
/// atom at each jump and one Cantor measure per component.
class BVFunc1D {
public:
    explicit BVFunc1D(PiecewiseExpr1D base, std::vector<CantorComponent> cantor = {});

    const PiecewiseExpr1D& base() const { return base_; }
    const std::vector<CantorComponent>& cantor_components() const { return cantor_; }

    double value(double x) const;
    /// Du as a generalized measure embedded on the x-axis.
    GenMeasure derivative() const;

private:
    PiecewiseExpr1D base_;
    std::vector<CantorComponent> cantor_;
};

/// The pairing (A, Du) for a bounded piecewise-smooth 1D field and a 1D BV
/// function with Cantor components: absolutely continuous part A u',
/// an atom ((A(x+)+A(x-))/2)(u+ - u-) at each jump of u, and the Cantor
/// part given by the approximate limit of A against each Cantor component.
/// Throws HypothesisViolation if a genuine jump point of A lies on a
/// Cantor carrier.
GenMeasure pairing_1d(const PiecewiseExpr1D& A, const BVFunc1D& u);

/// The set E obtained by removing the middle-third intervals at the even
/// steps 2, 4, ..., 2*levels of the Cantor construction. Its topological
/// boundary converges to the Cantor set as levels grows.
class EvenStepSet {
public:
    explicit EvenStepSet(int levels);

    int levels() const { return levels_; }
    const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
    double total_length() const;
    /// |E intersect (a, b)|.
    double measure_in(double a, double b) const;
    bool contains(double x) const;

private:
    int levels_;
    std::vector<std::pair<double, double>> intervals_;
};

/// Density quotients |B_r(x) intersect E| / (2r) over the radius schedule, against
/// the even-step set truncated at `levels`. Returns (min, max) over the
/// schedule. With require_in_cantor the probe point must belong to the
/// Cantor set.
std::pair<double, double> counterexample_probe(int levels, double x,
                                               const std::vector<double>& radii,
                                               bool require_in_cantor = true);

/// The refusal record for the product counterexample: the field
/// (0, chi_E(x)) paired with psi(x). Contains the strip and the Cantor
/// mass that the function's Cantor part places on the field's
/// discontinuity set (= b - a, exactly, via the product representation).
struct IpoViolationDemo {
    double strip_lo = 0.0;
    double strip_hi = 1.0;
    double cantor_mass = 1.0;
    HypothesisViolation refusal;
};

IpoViolationDemo ipo_violation_demo(double a = 0.0, double b = 1.0);

/// pairing_measure on the counterexample scenario: always refuses with
/// HypothesisViolation carrying the mass b - a.
GenMeasure counterexample_pairing_measure(double a = 0.0, double b = 1.0);

/// <Div A, phi> for the counterexample field A = (0, chi_E(x)) with E
/// truncated at `levels`, evaluated as -integral of A . grad(phi) by
/// nested quadrature (no telescoping shortcut). Should vanish within
/// quadrature accuracy.
double counterexample_divergence_pairing(const TestFunc& phi, int levels);

}  // namespace dmpair
