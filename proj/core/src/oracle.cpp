#include "dmpair/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dmpair {

namespace {

double bump_kernel(double r2)
{
    // exp(-1/(1-|z|^2)) on |z| < 1; unnormalized, the lattice sum is
    // renormalized exactly to 1.
    if (r2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - r2));
}

// Sample u at any lattice point: cell value in the interior, average of
// one-sided values on interfaces, average of incident cells at vertices
// (a null set; any bounded choice works for the oracle).
double sample_bv(const BVFunc& u, const Vec2& p)
{
    if (auto r = u.partition().locate_interior(p)) return eval_at(u.region_expr(*r), p);
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < u.partition().size(); ++i) {
        if (u.partition().cells()[i].contains_closed(p)) {
            sum += eval_at(u.region_expr(i), p);
            ++count;
        }
    }
    if (count == 0) throw GeometryError("lattice point outside the window");
    return sum / count;
}

Vec2 sample_field(const PiecewiseVectorField& A, const Vec2& p)
{
    if (auto r = A.partition().locate_interior(p)) return A.value_in_region(*r, p);
    Vec2 sum{0.0, 0.0};
    int count = 0;
    for (std::size_t i = 0; i < A.partition().size(); ++i) {
        if (A.partition().cells()[i].contains_closed(p)) {
            sum = sum + A.value_in_region(i, p);
            ++count;
        }
    }
    if (count == 0) throw GeometryError("lattice point outside the window");
    return sum * (1.0 / count);
}

struct KernelStencil {
    int radius;
    std::vector<double> weights;  // (2r+1)^2 row-major, renormalized

    double weight(int dx, int dy) const
    {
        return weights[(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

KernelStencil make_stencil(double eps, double h)
{
    if (eps < 4.0 * h - 1e-12) throw Error("mollifier requires epsilon >= 4h");
    KernelStencil st;
    st.radius = static_cast<int>(std::floor(eps / h));
    const int n = 2 * st.radius + 1;
    st.weights.assign(static_cast<std::size_t>(n) * n, 0.0);
    double total = 0.0;
    for (int dy = -st.radius; dy <= st.radius; ++dy) {
        for (int dx = -st.radius; dx <= st.radius; ++dx) {
            const double r2 = (dx * dx + dy * dy) * h * h / (eps * eps);
            const double w = bump_kernel(r2);
            st.weights[(dy + st.radius) * n + (dx + st.radius)] = w;
            total += w;
        }
    }
    const double mass = total * h * h;
    for (auto& w : st.weights) w /= mass;
    return st;
}

}  // namespace

double mollified_value(const BVFunc& u, const Vec2& x, const MollifierOptions& opt)
{
    const KernelStencil st = make_stencil(opt.epsilon, opt.h);
    double sum = 0.0;
    for (int dy = -st.radius; dy <= st.radius; ++dy) {
        for (int dx = -st.radius; dx <= st.radius; ++dx) {
            const double w = st.weight(dx, dy);
            if (w == 0.0) continue;
            sum += w * sample_bv(u, {x.x + dx * opt.h, x.y + dy * opt.h});
        }
    }
    return sum * opt.h * opt.h;
}

double mollified_pairing(const PiecewiseVectorField& A, const BVFunc& u, const TestFunc& phi,
                         const MollifierOptions& opt)
{
    const double h = opt.h;
    const Window& w = u.partition().window();
    const KernelStencil st = make_stencil(opt.epsilon, h);

    // Lattice bounding box of the support of phi.
    double x0 = w.xmax, x1 = w.xmin, y0 = w.ymax, y1 = w.ymin;
    for (const auto& v : phi.support().vertices()) {
        x0 = std::min(x0, v.x);
        x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y);
        y1 = std::max(y1, v.y);
    }
    const double margin = opt.epsilon + 2.0 * h;
    if (x0 - margin < w.xmin || x1 + margin > w.xmax || y0 - margin < w.ymin ||
        y1 + margin > w.ymax)
        throw Error("test function support too close to the window boundary for this epsilon");

    const int i0 = static_cast<int>(std::floor((x0 - w.xmin) / h)) - 1;
    const int i1 = static_cast<int>(std::ceil((x1 - w.xmin) / h)) + 1;
    const int j0 = static_cast<int>(std::floor((y0 - w.ymin) / h)) - 1;
    const int j1 = static_cast<int>(std::ceil((y1 - w.ymin) / h)) + 1;

    // Pre-sample u on the dilated box (support + 1 cell for the centered
    // difference + kernel radius).
    const int pad = st.radius + 1;
    const int su0 = i0 - pad, su1 = i1 + pad, sv0 = j0 - pad, sv1 = j1 + pad;
    const int nx = su1 - su0 + 1, ny = sv1 - sv0 + 1;
    std::vector<double> usamp(static_cast<std::size_t>(nx) * ny);
    for (int j = sv0; j <= sv1; ++j) {
        for (int i = su0; i <= su1; ++i) {
            usamp[static_cast<std::size_t>(j - sv0) * nx + (i - su0)] =
                sample_bv(u, {w.xmin + i * h, w.ymin + j * h});
        }
    }
    const auto uval = [&](int i, int j) {
        return usamp[static_cast<std::size_t>(j - sv0) * nx + (i - su0)];
    };

    // u_eps on the box dilated by one cell.
    const int m0 = i0 - 1, m1 = i1 + 1, n0 = j0 - 1, n1 = j1 + 1;
    const int mx = m1 - m0 + 1, my = n1 - n0 + 1;
    std::vector<double> ueps(static_cast<std::size_t>(mx) * my, 0.0);
    for (int j = n0; j <= n1; ++j) {
        for (int i = m0; i <= m1; ++i) {
            double acc = 0.0;
            for (int dy = -st.radius; dy <= st.radius; ++dy) {
                for (int dx = -st.radius; dx <= st.radius; ++dx) {
                    const double wk = st.weight(dx, dy);
                    if (wk != 0.0) acc += wk * uval(i - dx, j - dy);
                }
            }
            ueps[static_cast<std::size_t>(j - n0) * mx + (i - m0)] = acc * h * h;
        }
    }
    const auto ueval = [&](int i, int j) {
        return ueps[static_cast<std::size_t>(j - n0) * mx + (i - m0)];
    };

    // Lattice sum of phi A . grad u_eps with centered differences.
    double sum = 0.0;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const Vec2 p{w.xmin + i * h, w.ymin + j * h};
            const double ph = phi.value(p);
            if (ph == 0.0) continue;
            const Vec2 grad{(ueval(i + 1, j) - ueval(i - 1, j)) / (2.0 * h),
                            (ueval(i, j + 1) - ueval(i, j - 1)) / (2.0 * h)};
            sum += ph * sample_field(A, p).dot(grad);
        }
    }
    return sum * h * h;
}

double mollified_trace(const PiecewiseVectorField& A, const OrientedInterface& sigma,
                       const TestFunc& phi, const MollifierOptions& opt, int side)
{
    if (side != +1 && side != -1) throw Error("trace side must be +1 or -1");
    const double h = opt.h;
    const double delta = opt.epsilon;
    double sum = 0.0;
    for (const auto& seg : sigma.segments()) {
        const double len = seg.length();
        const int ns = std::max(1, static_cast<int>(std::round(len / h)));
        const double ds = len / ns;
        const int nt = std::max(1, static_cast<int>(std::round(delta / h)));
        const double dt = delta / nt;
        for (int is = 0; is < ns; ++is) {
            const Vec2 base = seg.point_at((is + 0.5) / ns);
            const double ph = phi.value(base);
            if (ph == 0.0) continue;
            double layer = 0.0;
            for (int it = 0; it < nt; ++it) {
                const Vec2 q = base + seg.normal * (side * (it + 0.5) * dt);
                layer += sample_field(A, q).dot(seg.normal);
            }
            // (1/delta) strip integral: average over the layer.
            sum += ph * (layer / nt) * ds;
        }
    }
    return sum;
}

std::vector<double> approximate_limit_residuals(const BVFunc& u, const Vec2& x, double candidate,
                                                const std::vector<double>& radii)
{
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) {
        if (r <= 0.0) throw Error("radius schedule must be positive");
        const double h = r / 16.0;
        double acc = 0.0;
        int count = 0;
        for (int j = -16; j <= 16; ++j) {
            for (int i = -16; i <= 16; ++i) {
                const Vec2 p{x.x + i * h, x.y + j * h};
                if ((p - x).norm() > r) continue;
                acc += std::abs(sample_bv(u, p) - candidate);
                ++count;
            }
        }
        out.push_back(acc / count);
    }
    return out;
}

double approximate_limit_check(const BVFunc& u, const Vec2& x, double candidate,
                               const std::vector<double>& radii)
{
    return approximate_limit_residuals(u, x, candidate, radii).back();
}

}  // namespace dmpair
