#pragma once

#include <vector>

#include "dmpair/field.hpp"

namespace dmpair {

/// Brute-force grid validation: mollify u on a uniform lattice with the
/// standard bump kernel and approximate the pairing and trace integrals by
/// lattice sums. Tolerances are percent-level by design; the oracle
/// validates structure (which measure, which sign, which support), not
/// quadrature-grade digits.
struct MollifierOptions {
    double epsilon = 0.02;  // kernel radius
    double h = 0.005;       // lattice spacing; epsilon >= 4h required
};

/// (rho_eps * u)(x) by lattice sums; converges to the precise
/// representative u* at every point off the vertex set.
double mollified_value(const BVFunc& u, const Vec2& x, const MollifierOptions& opt);

/// Lattice approximation of <(A, Du), phi> = lim_eps int phi A . grad u_eps.
/// phi must be supported at distance >= epsilon + 2h from the window
/// boundary.
double mollified_pairing(const PiecewiseVectorField& A, const BVFunc& u, const TestFunc& phi,
                         const MollifierOptions& opt);

/// Boundary-layer approximation of int_Sigma Tr^side(A, Sigma) phi dH^1:
/// the strip average of A . nu phi over the one-sided layer of width
/// epsilon.
double mollified_trace(const PiecewiseVectorField& A, const OrientedInterface& sigma,
                       const TestFunc& phi, const MollifierOptions& opt, int side);

/// Mean of |u - candidate| over the lattice points of B_r(x) for the
/// smallest radius of the schedule (the full sequence is decreasing iff
/// candidate is the approximate limit of u at x).
double approximate_limit_check(const BVFunc& u, const Vec2& x, double candidate,
                               const std::vector<double>& radii);

/// Full residual sequence over the radius schedule.
std::vector<double> approximate_limit_residuals(const BVFunc& u, const Vec2& x, double candidate,
                                                const std::vector<double>& radii);

}  // namespace dmpair
