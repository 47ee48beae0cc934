#pragma once

#include <vector>

#include "epo/params.hpp"

namespace epo {

// Nonuniform tensor grid on [-L, L] x [-Y, Y]. y has an exact 0 node and is
// graded fine near 0; z has exact 0 and +-Y nodes and is graded fine near the
// walls, where the solutions develop sqrt-type corner layers. delta is the
// single resolution knob: the y spacing at 0 is delta/4, the z spacing at a
// wall is delta^3, and both axes grow geometrically (ratio 1.15) up to caps
// that also scale with delta, so one refinement parameter drives every
// discretization error term.
//
// Unknown layout: node (i, j) -> i*Nz + j, plus two one-sided corner
// unknowns: u(0+, Y) and u(0-, -Y). The grid nodes at (0, +-Y) hold the
// opposite one-sided limits, u(0-, Y) and u(0+, -Y).
struct Grid {
    OscillatorParams p;
    double L = 0.0;
    double delta = 0.0;
    std::vector<double> ys, zs; // ascending
    int Ny = 0, Nz = 0;
    int iy0 = 0; // ys[iy0] == 0
    int jmid = 0; // zs[jmid] == 0

    int jtop() const { return Nz - 1; }
    int jbot() const { return 0; }
    int id(int i, int j) const { return i * Nz + j; }
    int idx_tp() const { return Ny * Nz; }     // u(0+, Y)
    int idx_bm() const { return Ny * Nz + 1; } // u(0-, -Y)
    int n_unknowns() const { return Ny * Nz + 2; }
};

// L <= 0 picks the default truncation 6/sqrt(2 c0) (six standard deviations
// of the stationary velocity scale).
Grid make_grid(const OscillatorParams& p, double delta, double L = 0.0);

} // namespace epo
