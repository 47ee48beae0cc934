#include "epo/grid.hpp"

#include <algorithm>
#include <cmath>

#include "epo/errors.hpp"

namespace epo {
namespace {

// Cell widths starting at h0, growing geometrically, capped at hmax, covering
// exactly `span` (last cell trimmed).
std::vector<double> geometric_axis(double h0, double hmax, double ratio, double span) {
    std::vector<double> ws;
    double h = h0;
    double total = 0.0;
    while (total < span - 1e-15 * span) {
        double w = std::min(std::min(h, hmax), span - total);
        ws.push_back(w);
        total += w;
        h *= ratio;
    }
    return ws;
}

} // namespace

Grid make_grid(const OscillatorParams& p, double delta, double L) {
    validate_params(p.c0, p.k, p.Y);
    if (!(delta > 0.0) || !std::isfinite(delta))
        fail(errc::config_invalid, "grid resolution delta must be positive");
    if (L <= 0.0)
        L = 6.0 / std::sqrt(2.0 * p.c0);
    if (delta > p.Y)
        fail(errc::config_invalid, "grid resolution delta exceeds the bound Y");

    Grid g;
    g.p = p;
    g.L = L;
    g.delta = delta;

    // y axis: fine near 0 where the corner analysis happens, mirrored so the
    // 0 node is exact.
    const double ratio = 1.15;
    auto wy = geometric_axis(delta / 4.0, L / 55.0, ratio, L);
    std::vector<double> half;
    half.reserve(wy.size() + 1);
    half.push_back(0.0);
    for (double w : wy) half.push_back(half.back() + w);
    half.back() = L;
    g.ys.reserve(2 * half.size() - 1);
    for (int m = (int)half.size() - 1; m >= 1; --m) g.ys.push_back(-half[m]);
    for (double v : half) g.ys.push_back(v);
    g.iy0 = (int)half.size() - 1;
    g.Ny = (int)g.ys.size();

    // z axis: built wall-inward so the first cell at each wall is delta^3
    // (resolving the sqrt layer), capped in the bulk proportional to Y*delta.
    auto wz = geometric_axis(delta * delta * delta, 1.2 * p.Y * delta, ratio, p.Y);
    std::vector<double> desc;
    desc.reserve(wz.size() + 1);
    desc.push_back(p.Y);
    for (double w : wz) desc.push_back(desc.back() - w);
    desc.back() = 0.0;
    std::vector<double> asc(desc.rbegin(), desc.rend());
    g.zs.reserve(2 * asc.size() - 1);
    for (int m = (int)asc.size() - 1; m >= 1; --m) g.zs.push_back(-asc[m]);
    for (double v : asc) g.zs.push_back(v);
    g.zs.front() = -p.Y;
    g.zs.back() = p.Y;
    g.jmid = (int)asc.size() - 1;
    g.Nz = (int)g.zs.size();

    if (g.Ny < 7 || g.Nz < 5)
        fail(errc::config_invalid, "grid too coarse: fewer than 7x5 nodes");
    return g;
}

} // namespace epo
