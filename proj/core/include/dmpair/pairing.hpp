#pragma once

#include <vector>

#include "dmpair/cantor.hpp"
#include "dmpair/field.hpp"
#include "dmpair/trace.hpp"

namespace dmpair {

/// The pairing (A, Du) decomposed by provenance: an absolutely continuous
/// part carried by the cells, a jump part carried by J_u, and (1D-only) a
/// Cantor part. The jump densities keep the averaged-trace factor and the
/// jump height separate so the Radon-Nikodym density against |Du| can be
/// queried pointwise.
class PairingMeasure {
public:
    struct JumpDensity {
        OrientedSegment seg;   // oriented with u+ > u-
        Expr alpha_star;       // (Tr+ + Tr-)/2 of the field
        Expr height;           // u+ - u-
    };

    PairingMeasure(GenMeasure ac, GenMeasure jump, GenMeasure cantor,
                   std::vector<JumpDensity> densities)
        : ac_(std::move(ac)),
          jump_(std::move(jump)),
          cantor_(std::move(cantor)),
          jump_densities_(std::move(densities))
    {
    }

    const GenMeasure& absolutely_continuous() const { return ac_; }
    const GenMeasure& jump() const { return jump_; }
    const GenMeasure& cantor() const { return cantor_; }
    const std::vector<JumpDensity>& jump_densities() const { return jump_densities_; }

    GenMeasure total() const
    {
        GenMeasure m = ac_;
        m += jump_;
        m += cantor_;
        return m;
    }

private:
    GenMeasure ac_;
    GenMeasure jump_;
    GenMeasure cantor_;
    std::vector<JumpDensity> jump_densities_;
};

/// The pairing (A, Du) built from the decomposition: A . grad u as area
/// density, ((Tr+ + Tr-)/2)(u+ - u-) as line density on J_u. Partitions
/// need not coincide; the absolutely continuous part is assembled on cell
/// intersections and the traces on J_u are located side by side.
PairingMeasure pairing_measure(const PiecewiseVectorField& A, const BVFunc& u);

/// The Radon-Nikodym density of (A, Du) with respect to |Du| at a
/// |Du|-generic point: A . grad u / |grad u| inside a cell,
/// alpha* sign(u+ - u-) at a jump-interior point. Throws where |Du| has no
/// defined direction.
double theta(const PiecewiseVectorField& A, const BVFunc& u, const Vec2& x);

/// Residual of Div(uA) = u* Div A + (A, Du) against a test function.
/// Requires uA representable as a piecewise field (shared partition).
double anzellotti_identity_residual(const PiecewiseVectorField& A, const BVFunc& u,
                                    const TestFunc& phi, const QuadratureOptions& opt = {});

/// Multiply a measure by the precise representative of u: area densities
/// by the cell value (on cell intersections), line densities by
/// (u+ + u-)/2 along each segment, atom weights by u*(point).
GenMeasure multiply_by_precise(const GenMeasure& m, const BVFunc& u);

}  // namespace dmpair
