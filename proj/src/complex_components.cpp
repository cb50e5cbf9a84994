#include "fibtrans/complex_components.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "fibtrans/errors.hpp"
#include "fibtrans/trace_polynomials.hpp"

namespace fibtrans {

namespace {

using cplx = std::complex<double>;

double level_function(double lambda, int k, double log_level, cplx z) {
    const double m = std::abs(evaluate_trace(lambda, z, k).value);
    if (!std::isfinite(m)) return std::numeric_limits<double>::max();
    return std::log(m) - log_level;
}

// Newton on |x_k(z)| = level along the steepest-ascent direction of |x_k|.
cplx refine_vertex(double lambda, int k, double level, cplx z, double tol) {
    for (int it = 0; it < 50; ++it) {
        const auto tv = evaluate_trace(lambda, z, k);
        const double mod = std::abs(tv.value);
        const double slope = std::abs(tv.derivative);
        if (mod == 0.0 || slope == 0.0) break;
        const double g = mod - level;
        if (std::abs(g) <= tol) break;
        // d|x|/dz along u is |x'| when u = conj(x') x / |x' x|.
        const cplx u = std::conj(tv.derivative) * tv.value / (slope * mod);
        z -= (g / slope) * u;
    }
    return z;
}

struct Grid {
    int n = 0;  // nodes per side
    cplx origin;
    double h = 0.0;
    std::vector<double> f;
    std::vector<char> in;

    cplx node(int i, int j) const { return origin + cplx(i * h, j * h); }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * n + i; }
};

// Key of the crossing on a grid edge: horizontal edges (i,j)-(i+1,j) and vertical (i,j)-(i,j+1).
struct EdgeKey {
    int i, j, dir;
    auto operator<=>(const EdgeKey&) const = default;
};

struct Traced {
    std::vector<cplx> polyline;
    bool touches_box = false;
};

Traced march(double lambda, int k, double delta, double center, double half_width, const ContourOptions& opts) {
    const double level = 1.0 + delta;
    const double log_level = std::log(level);
    Grid g;
    g.n = opts.grid + 1;
    if (g.n % 2 == 0) ++g.n;  // odd node count keeps a node row on the real axis
    g.h = 2.0 * half_width / (g.n - 1);
    g.origin = cplx(center - half_width, -half_width);
    g.f.resize(static_cast<std::size_t>(g.n) * g.n);
    g.in.assign(g.f.size(), 0);
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) g.f[g.idx(i, j)] = level_function(lambda, k, log_level, g.node(i, j));
    }

    // Flood fill (4-connected) from the center node.
    const int c = (g.n - 1) / 2;
    Traced out;
    if (g.f[g.idx(c, c)] > 0) {
        throw NumericalFailure("trace_component: center is not inside the level set");
    }
    std::deque<std::pair<int, int>> queue{{c, c}};
    g.in[g.idx(c, c)] = 1;
    while (!queue.empty()) {
        const auto [i, j] = queue.front();
        queue.pop_front();
        if (i == 0 || j == 0 || i == g.n - 1 || j == g.n - 1) out.touches_box = true;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int ni = i + di[d], nj = j + dj[d];
            if (ni < 0 || nj < 0 || ni >= g.n || nj >= g.n) continue;
            const auto id = g.idx(ni, nj);
            if (g.in[id] || g.f[id] > 0) continue;
            g.in[id] = 1;
            queue.emplace_back(ni, nj);
        }
    }
    if (out.touches_box) return out;

    auto inside = [&](int i, int j) { return g.in[g.idx(i, j)] != 0; };
    auto crossing = [&](const EdgeKey& e) {
        const int i2 = e.dir == 0 ? e.i + 1 : e.i;
        const int j2 = e.dir == 0 ? e.j : e.j + 1;
        const double f1 = g.f[g.idx(e.i, e.j)];
        const double f2 = g.f[g.idx(i2, j2)];
        const double t = std::clamp(f1 / (f1 - f2), 0.0, 1.0);
        return g.node(e.i, e.j) + t * (g.node(i2, j2) - g.node(e.i, e.j));
    };

    // Segments link crossing edges; each crossing has exactly two neighbours on a closed loop.
    std::map<EdgeKey, std::vector<EdgeKey>> links;
    auto link = [&](const EdgeKey& a, const EdgeKey& b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };
    for (int j = 0; j + 1 < g.n; ++j) {
        for (int i = 0; i + 1 < g.n; ++i) {
            // Corners counter-clockwise: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1).
            const bool b0 = inside(i, j), b1 = inside(i + 1, j), b2 = inside(i + 1, j + 1), b3 = inside(i, j + 1);
            const int mask = b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
            if (mask == 0 || mask == 15) continue;
            const EdgeKey bottom{i, j, 0}, right{i + 1, j, 1}, top{i, j + 1, 0}, left{i, j, 1};
            switch (mask) {
                case 1: case 14: link(left, bottom); break;
                case 2: case 13: link(bottom, right); break;
                case 3: case 12: link(left, right); break;
                case 4: case 11: link(right, top); break;
                case 6: case 9: link(bottom, top); break;
                case 7: case 8: link(left, top); break;
                case 5: case 10: {
                    const double fc = level_function(lambda, k, log_level, g.node(i, j) + cplx(0.5 * g.h, 0.5 * g.h));
                    const bool joined = fc <= 0;
                    if ((mask == 5) == joined) {
                        link(left, top);
                        link(bottom, right);
                    } else {
                        link(left, bottom);
                        link(right, top);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    if (links.empty()) return out;

    // Walk every loop; keep the one winding around the center.
    std::map<EdgeKey, bool> seen;
    const cplx zc(center, 0.0);
    std::vector<cplx> best;
    for (const auto& [start, _] : links) {
        if (seen[start]) continue;
        std::vector<EdgeKey> loop{start};
        seen[start] = true;
        EdgeKey prev = start, cur = links[start].front();
        while (!(cur == start)) {
            if (seen[cur]) break;
            seen[cur] = true;
            loop.push_back(cur);
            const auto& nb = links[cur];
            const EdgeKey next = (nb.size() > 1 && nb[0] == prev) ? nb[1] : nb[0];
            prev = cur;
            cur = next;
        }
        std::vector<cplx> poly;
        poly.reserve(loop.size());
        for (const auto& e : loop) poly.push_back(crossing(e));
        if (std::abs(winding_number(poly, zc)) == 1 && poly.size() > best.size()) best = std::move(poly);
    }
    for (auto& z : best) z = refine_vertex(lambda, k, level, z, opts.contour_tol);
    if (winding_number(best, zc) < 0) std::reverse(best.begin(), best.end());
    out.polyline = std::move(best);
    return out;
}

double segment_distance(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0 ? std::real((p - a) * std::conj(ab)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

}  // namespace

bool ComponentContour::contains(std::complex<double> z) const {
    bool in = false;
    const std::size_t n = polyline.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto a = polyline[i], b = polyline[j];
        if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
            const double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
            if (z.real() < x) in = !in;
        }
    }
    return in;
}

int winding_number(const std::vector<std::complex<double>>& polyline, std::complex<double> point) {
    if (polyline.size() < 3) return 0;
    double total = 0.0;
    for (std::size_t i = 0; i < polyline.size(); ++i) {
        const auto a = polyline[i] - point;
        const auto b = polyline[(i + 1) % polyline.size()] - point;
        total += std::arg(b / a);
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

ComponentContour trace_component(double lambda, int k, double delta, double center, const ContourOptions& opts) {
    if (!(delta > 0.0)) throw ConfigError("trace_component: delta must be > 0");
    if (k < 1) throw ConfigError("trace_component: k must be >= 1");
    if (std::abs(evaluate_trace(lambda, center, k).value) > 1e-6) {
        throw ConfigError("trace_component: center is not a zero of x_k");
    }
    double half = 4.0 * std::exp(-k * (growth_rate(lambda) - 0.2));
    int retries = 0;
    Traced traced = march(lambda, k, delta, center, half, opts);
    while (traced.touches_box) {
        if (++retries > opts.max_retries) {
            std::ostringstream msg;
            msg << "trace_component: component still touches the search box after " << opts.max_retries
                << " enlargements (k=" << k << ", lambda=" << lambda << ", delta=" << delta << ")";
            throw NumericalFailure(msg.str());
        }
        half *= 2.0;
        traced = march(lambda, k, delta, center, half, opts);
    }
    const cplx zc(center, 0.0);
    if (traced.polyline.empty() || winding_number(traced.polyline, zc) != 1) {
        throw NumericalFailure("trace_component: traced boundary does not wind once around the center");
    }

    // One refinement pass on a box fitted to the first contour.
    double extent = 0.0;
    for (const auto& z : traced.polyline) extent = std::max(extent, std::max(std::abs(z.real() - center), std::abs(z.imag())));
    if (extent < 0.5 * half) {
        Traced fine = march(lambda, k, delta, center, 1.25 * extent, opts);
        if (!fine.touches_box && !fine.polyline.empty() && winding_number(fine.polyline, zc) == 1) {
            traced = std::move(fine);
            half = 1.25 * extent;
        }
    }

    ComponentContour out;
    out.k = k;
    out.lambda = lambda;
    out.delta = delta;
    out.center = zc;
    out.polyline = std::move(traced.polyline);
    out.box_half_width = half;
    out.retries = retries;
    out.inscribed_radius = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.polyline.size(); ++i) {
        const auto a = out.polyline[i];
        const auto b = out.polyline[(i + 1) % out.polyline.size()];
        out.inscribed_radius = std::min(out.inscribed_radius, segment_distance(zc, a, b));
        out.circumscribed_radius = std::max(out.circumscribed_radius, std::abs(a - zc));
    }
    return out;
}

KoebeRadii koebe_bounds(int /*k*/, double delta, double derivative) {
    if (!(delta > 0.0)) throw ConfigError("koebe_bounds: delta must be > 0");
    if (derivative == 0.0 || !std::isfinite(derivative)) {
        throw NumericalFailure("koebe_bounds: zero derivative, the zero is not simple");
    }
    const double inv = 1.0 / std::abs(derivative);
    const double num = (1 + delta) * (1 + 2 * delta) * (1 + 2 * delta);
    return {num / ((2 + 3 * delta) * (2 + 3 * delta)) * inv, num / (delta * delta) * inv};
}

KoebeRadii distortion_radii(double lambda, int k, double delta, double eps) {
    const double d = growth_rate(lambda);
    const double inner = (1 + delta) * (1 + 2 * delta) * (1 + 2 * delta) / ((2 + 3 * delta) * (2 + 3 * delta));
    const double outer_root = (1 + delta) * (1 + 2 * delta) / delta;
    return {inner * std::exp(-k * (d + eps)), outer_root * outer_root * std::exp(-k * (d - eps))};
}

}  // namespace fibtrans
