#pragma once

#include <functional>

#include "dmpair/geometry.hpp"

namespace dmpair {

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Quadrature controls shared by all measure evaluations: a fixed-order
/// Gauss rule per cell/segment refined by adaptive bisection until the
/// absolute tolerance is met or the depth limit is exceeded.
struct QuadratureOptions {
    double abs_tol = 1e-10;
    int max_depth = 12;
};

using PointFunc = std::function<double(const Vec2&)>;

/// Degree-7 13-point symmetric Gauss rule on a triangle, refined by
/// splitting into the four midpoint sub-triangles. Throws QuadratureError
/// when the tolerance cannot be met at max_depth.
double integrate_triangle(const PointFunc& f, const Triangle& t,
                          const QuadratureOptions& opt = {});

/// 16-point Gauss-Legendre rule on a segment with adaptive bisection,
/// integrating against arclength.
double integrate_segment(const PointFunc& f, const Vec2& a, const Vec2& b,
                         const QuadratureOptions& opt = {});

/// One-dimensional Gauss-Legendre integral of f over [a, b] with n = 32
/// fixed nodes (no adaptivity); used for the coarea t-integration between
/// critical values.
double gauss_legendre_32(const std::function<double(double)>& f, double a, double b);

}  // namespace dmpair
