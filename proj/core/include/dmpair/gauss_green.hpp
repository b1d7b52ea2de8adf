#pragma once

#include <vector>

#include "dmpair/calculus.hpp"

namespace dmpair {

/// Both generalized Gauss-Green identities on a finite-perimeter polygon,
/// with the per-edge trace tables used by the reports. The reduced boundary
/// is oriented by the interior unit normal.
struct GaussGreenReport {
    // int_{E^1} u* dDiv A + (A, Du)(E^1)  vs  -int alpha+ u+ dH^1
    double lhs_interior = 0.0;
    double rhs_interior = 0.0;
    // same on E^1 union the reduced boundary  vs  -int alpha- u- dH^1
    double lhs_closure = 0.0;
    double rhs_closure = 0.0;

    double residual_interior() const { return std::abs(lhs_interior - rhs_interior); }
    double residual_closure() const { return std::abs(lhs_closure - rhs_closure); }

    struct EdgeRow {
        OrientedSegment seg;  // normal = interior normal of E
        double alpha_plus;    // traces sampled at the segment midpoint
        double alpha_minus;
        double u_plus;
        double u_minus;
    };
    std::vector<EdgeRow> edges;
};

GaussGreenReport gauss_green(const PiecewiseVectorField& A, const BVFunc& u, const Polygon& E,
                             const QuadratureOptions& opt = {});

/// The interior and exterior normal-trace measures of A on the reduced
/// boundary of E, each computed along two independent routes: directly from
/// the one-sided traces, and as twice the pairing of the masked field with
/// the indicator of E. The contract is that the routes agree.
struct NormalTraceMeasures {
    GenMeasure sigma_i;          // alpha+ H^1 on the reduced boundary
    GenMeasure sigma_e;          // alpha- H^1 on the reduced boundary
    GenMeasure sigma_i_product;  // 2 (chi_E A, D chi_E)
    GenMeasure sigma_e_product;  // 2 (chi_{W\E} A, D chi_E)
};

NormalTraceMeasures normal_trace_measures(const PiecewiseVectorField& A, const Polygon& E);

}  // namespace dmpair
