#include "dmpair/quadrature.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace dmpair {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
// Generated once per order and cached.
struct GLRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GLRule make_gauss_legendre(int n)
{
    GLRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev initial guess.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const GLRule& gl16()
{
    static const GLRule rule = make_gauss_legendre(16);
    return rule;
}

const GLRule& gl32()
{
    static const GLRule rule = make_gauss_legendre(32);
    return rule;
}

// Dunavant degree-7 rule, 13 points in barycentric coordinates, weights
// normalized to sum to 1 over the reference triangle.
struct TriPoint {
    double l1, l2, l3, w;
};

const std::array<TriPoint, 13>& dunavant7()
{
    static const std::array<TriPoint, 13> pts = [] {
        std::array<TriPoint, 13> p{};
        int k = 0;
        const auto push = [&](double a, double b, double c, double w) { p[k++] = {a, b, c, w}; };
        const double w1 = -0.149570044467670;
        push(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w1);
        const double a2 = 0.479308067841923, b2 = 0.260345966079038, w2 = 0.175615257433204;
        push(a2, b2, b2, w2);
        push(b2, a2, b2, w2);
        push(b2, b2, a2, w2);
        const double a3 = 0.869739794195568, b3 = 0.065130102902216, w3 = 0.053347235608839;
        push(a3, b3, b3, w3);
        push(b3, a3, b3, w3);
        push(b3, b3, a3, w3);
        const double a4 = 0.638444188569809, b4 = 0.312865496004875, c4 = 0.048690315425316,
                     w4 = 0.077113760890257;
        push(a4, b4, c4, w4);
        push(a4, c4, b4, w4);
        push(b4, a4, c4, w4);
        push(b4, c4, a4, w4);
        push(c4, a4, b4, w4);
        push(c4, b4, a4, w4);
        return p;
    }();
    return pts;
}

double triangle_rule(const PointFunc& f, const Triangle& t)
{
    double sum = 0.0;
    for (const auto& q : dunavant7()) {
        const Vec2 p{q.l1 * t.a.x + q.l2 * t.b.x + q.l3 * t.c.x,
                     q.l1 * t.a.y + q.l2 * t.b.y + q.l3 * t.c.y};
        sum += q.w * f(p);
    }
    return sum * t.area();
}

double triangle_adaptive(const PointFunc& f, const Triangle& t, double coarse, double tol,
                         int depth, int max_depth)
{
    const Vec2 mab = (t.a + t.b) * 0.5;
    const Vec2 mbc = (t.b + t.c) * 0.5;
    const Vec2 mca = (t.c + t.a) * 0.5;
    const Triangle sub[4] = {{t.a, mab, mca}, {mab, t.b, mbc}, {mca, mbc, t.c}, {mab, mbc, mca}};
    double fine = 0.0;
    double parts[4];
    for (int i = 0; i < 4; ++i) {
        parts[i] = triangle_rule(f, sub[i]);
        fine += parts[i];
    }
    if (std::abs(fine - coarse) <= tol) return fine;
    if (depth >= max_depth)
        throw QuadratureError("triangle quadrature did not converge at max depth");
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
        sum += triangle_adaptive(f, sub[i], parts[i], tol / 4.0, depth + 1, max_depth);
    return sum;
}

double segment_rule(const PointFunc& f, const Vec2& a, const Vec2& b)
{
    const auto& rule = gl16();
    const Vec2 mid = (a + b) * 0.5;
    const Vec2 half = (b - a) * 0.5;
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Vec2 p = mid + half * rule.nodes[i];
        sum += rule.weights[i] * f(p);
    }
    return sum * half.norm();
}

double segment_adaptive(const PointFunc& f, const Vec2& a, const Vec2& b, double coarse,
                        double tol, int depth, int max_depth)
{
    const Vec2 mid = (a + b) * 0.5;
    const double left = segment_rule(f, a, mid);
    const double right = segment_rule(f, mid, b);
    const double fine = left + right;
    if (std::abs(fine - coarse) <= tol) return fine;
    if (depth >= max_depth) throw QuadratureError("segment quadrature did not converge at max depth");
    return segment_adaptive(f, a, mid, left, tol / 2.0, depth + 1, max_depth) +
           segment_adaptive(f, mid, b, right, tol / 2.0, depth + 1, max_depth);
}

}  // namespace

double integrate_triangle(const PointFunc& f, const Triangle& t, const QuadratureOptions& opt)
{
    if (t.area() <= 0.0) return 0.0;
    const double coarse = triangle_rule(f, t);
    return triangle_adaptive(f, t, coarse, opt.abs_tol, 0, opt.max_depth);
}

double integrate_segment(const PointFunc& f, const Vec2& a, const Vec2& b,
                         const QuadratureOptions& opt)
{
    if ((b - a).norm() <= kGeomEps) return 0.0;
    const double coarse = segment_rule(f, a, b);
    return segment_adaptive(f, a, b, coarse, opt.abs_tol, 0, opt.max_depth);
}

double gauss_legendre_32(const std::function<double(double)>& f, double a, double b)
{
    const auto& rule = gl32();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

}  // namespace dmpair
