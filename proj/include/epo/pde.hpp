#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "epo/grid.hpp"

namespace epo {

// Boundary-value solver for the degenerate elliptic family
//
//   A u = -(1/2) u_yy + (c0 y + k z) u_y - y u_z = f   in (-L,L) x (-Y,Y)
//
// with tangential second-order operators on the plastic half-lines
// {z = Y, y > 0} and {z = -Y, y < 0},
//
//   B+- u = -(1/2) u_yy + (c0 y +- k Y) u_y = f,
//
// absorbing value 0 at the bottom rest corner (0-, -Y) and an unknown
// one-sided limit at the top rest corner (0+, Y). Fields of this family give
// expected additive functionals accumulated until the oscillator next comes
// to rest on a bound, and their corner limits drive the dispersion formula.
//
// The corner limit is a 0/0 ratio: every ingredient field vanishes at the
// corner with a sqrt(|y|) cusp along the elastic approach. It is extracted by
// fitting {1, sqrt|y|, |y|} over a window of top-line nodes on the elastic
// side and taking the ratio of fitted cusp coefficients. Two independent
// routes are kept: a superposition of Dirichlet sub-problems (assemble) and a
// single coupled linear system (monolithic); they must agree to solver
// precision and are cross-checked in the tests.

// Dual-basis extraction weights over the top-line window on the elastic side
// (side=+1) resp. bottom-line window (side=-1). For grid data u, the fits
//   sum_m w_value[m] u(iy[m])  ~ value of u at the corner
//   sum_m w_sqrt[m]  u(iy[m])  ~ coefficient of sqrt|y| in u near the corner
// come from the pseudoinverse of the window Vandermonde in {1, sqrt x, x}.
struct CornerWindow {
    std::vector<int> iy;
    std::vector<double> w_value;
    std::vector<double> w_sqrt;
};
CornerWindow corner_window(const Grid& g, int side);

struct AssembledField {
    Eigen::VectorXd u;     // n_unknowns() values, grid layout
    double corner = 0.0;   // extracted limit at the top rest corner
    double s_sqrt = 0.0;   // cusp coefficient of the source part
    double pim_sqrt = 0.0; // cusp coefficient of the exit-probability part
    double corner_fit = 0.0; // window-fitted value of u at the corner (diagnostic)
};

class PdeWorkspace {
public:
    explicit PdeWorkspace(const Grid& g);
    PdeWorkspace(const PdeWorkspace&) = delete;
    PdeWorkspace& operator=(const PdeWorkspace&) = delete;

    const Grid& grid() const { return g_; }
    const CornerWindow& window() const { return win_; }

    // Probability that the trajectory's next plastic phase is on the upper
    // bound: A pi = 0, pi = 1 on the upper half-line, 0 on the lower.
    const Eigen::VectorXd& pi_plus() const { return pi_plus_; }

    // Solve A u = f with prescribed plastic-line values. top_data[m] holds
    // the value at y = ys[iy0 + m] (m = 0 is the corner limit u(0+, Y)),
    // bot_data[i] at y = ys[i] for i <= iy0 (i = iy0 is u(0-, -Y)). The
    // outermost line nodes are closed by extrapolation, so the last top and
    // first bottom entries are not read.
    Eigen::VectorXd solve_dirichlet(const Eigen::VectorXd& f_nodes,
                                    const std::vector<double>& top_data,
                                    const std::vector<double>& bot_data) const;

    // 1D tangential solve on a plastic half-line, zero value at y = 0,
    // extrapolation closure at the far end. side=+1: unknowns at
    // ys[iy0..Ny-1] (f_line aligned the same way); side=-1: ys[0..iy0].
    std::vector<double> line_values(int side, const std::vector<double>& f_line) const;

    // Superposition route: solve the source part with homogeneous corner
    // data, extract the corner limit from the cusp-coefficient ratio against
    // the exit probability, and add that multiple of pi_plus.
    AssembledField assemble(const Eigen::VectorXd& f_nodes,
                            const std::vector<double>& f_top,
                            const std::vector<double>& f_bot) const;

    // Independent route: one coupled system over interior, both plastic
    // lines, and the two one-sided corner unknowns; the corner row demands a
    // cusp-free elastic approach. Returns the full field; the corner limit
    // is u[grid().idx_tp()].
    Eigen::VectorXd monolithic(const Eigen::VectorXd& f_nodes,
                               const std::vector<double>& f_top,
                               const std::vector<double>& f_bot) const;

private:
    Grid g_;
    CornerWindow win_;
    Eigen::SparseMatrix<double> common_, mono_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> common_lu_, mono_lu_;
    Eigen::VectorXd pi_plus_;

    Eigen::VectorXd solve_checked(const Eigen::SparseLU<Eigen::SparseMatrix<double>>& lu,
                                  const Eigen::SparseMatrix<double>& m,
                                  const Eigen::VectorXd& b, const char* what) const;
};

// Node-wise evaluation helpers (extra corner slots get 0).
Eigen::VectorXd eval_on_grid(const Grid& g, const std::function<double(double, double)>& f);
std::vector<double> eval_on_top_line(const Grid& g, const std::function<double(double)>& f);
std::vector<double> eval_on_bot_line(const Grid& g, const std::function<double(double)>& f);

struct PiFields {
    Eigen::VectorXd pi_plus;
    Eigen::VectorXd pi_minus; // 1 - pi_plus by construction
};
PiFields solve_pi(const PdeWorkspace& w);

// A eta = f with zero plastic-line values.
Eigen::VectorXd solve_eta(const PdeWorkspace& w, const std::function<double(double, double)>& f);

// Tangential line solve plus its harmonic extension into the strip.
struct PsiResult {
    std::vector<double> phi_line;
    Eigen::VectorXd psi;
};
PsiResult solve_psi(const PdeWorkspace& w, int side, const std::function<double(double)>& f_line);

// Full assembled field for a source given as a function of (y, z); the same
// function restricted to the lines drives the tangential parts.
AssembledField assemble_v(const PdeWorkspace& w, const std::function<double(double, double)>& f);

// Mirror-image field: anchored at the bottom rest corner (absorbing at the
// top one) via the exact (y,z) -> (-y,-z) symmetry of the dynamics. The
// returned field uses the normal grid layout; its corner limit sits in the
// idx_bm() slot and is reported in `corner`.
AssembledField assemble_v_mirror(const PdeWorkspace& w, const std::function<double(double, double)>& f);

// Second moment of the accumulated functional: A m2 = 2 f v (and the
// tangential analogue on the lines) where v is the assembled first-moment
// field for the same f.
AssembledField solve_second_moment(const PdeWorkspace& w, const AssembledField& v,
                                   const std::function<double(double, double)>& f);

struct PdeScalars {
    double e_theta1 = 0.0;  // mean boundary-to-boundary leg duration
    double e_tau1 = 0.0;    // mean full cycle duration (= 2 e_theta1)
    double v_plus_y = 0.0;  // corner limit of the velocity-integral field
    double m2 = 0.0;        // corner limit of its second moment
    double sigma2 = 0.0;    // dispersion drift (m2 - v_plus_y^2) / e_theta1
    int ny = 0, nz = 0, n_unknowns = 0;
    double delta = 0.0, L = 0.0;
};
PdeScalars drift_from_pde(const OscillatorParams& p, double delta, double L = 0.0);

// Same scalars per resolution, coarse to fine; used for the Cauchy
// convergence check.
std::vector<PdeScalars> refinement_study(const OscillatorParams& p,
                                         const std::vector<double>& deltas, double L = 0.0);

// Both corner pipelines on one grid; the gaps must sit at solver precision.
struct TwoRouteReport {
    double gap_v1 = 0.0; // max |assembled - monolithic| over nodes, f = 1
    double gap_vy = 0.0; // same for f = y
    double sigma2_assembled = 0.0;
    double sigma2_monolithic = 0.0;
};
TwoRouteReport compare_routes(const PdeWorkspace& w);

// Closed-form tangential solution by nested adaptive Gauss-Kronrod
// integration: value at y >= 0 (side=+1 half-line; side=-1 is evaluated by
// the mirror map) of the bounded solution of B phi = f with phi(0) = 0.
// Independent of the grid machinery; used to cross-check line_values.
double phi_quadrature(const OscillatorParams& p, int side,
                      const std::function<double(double)>& f, double y,
                      double rel_tol = 1e-8);

// Dense uniform-grid reference solve of the same half-line problem (step
// 1e-5, Thomas elimination). Second cross-check for phi_quadrature.
double phi_line_reference(const OscillatorParams& p, int side,
                          const std::function<double(double)>& f, double y);

} // namespace epo
