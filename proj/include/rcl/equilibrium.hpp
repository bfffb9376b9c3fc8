#pragma once

#include <string>

#include "rcl/geometry.hpp"

namespace rcl {

/// Pairwise Riesz interactions |x_i - x_j|^{alpha-N} with a regularized
/// diagonal: entry (i,i) is the mean self-interaction of a uniform cell (or
/// boundary panel) whose measure equals the point's quadrature weight.
struct KernelMatrix {
    Mat entries;             // n x n, symmetric
    double alpha = 0.0;      // in (0, N)
    int dimension = 0;       // ambient N
    std::string diagonal_rule;
    PointCloud cloud;
    Vec self_interaction;    // copy of the diagonal

    int size() const { return static_cast<int>(entries.rows()); }
};

/// Probability measure carried by a point cloud: masses >= 0, sum 1.
struct DiscreteMeasure {
    DiscreteMeasure(PointCloud cloud, Vec masses);
    PointCloud cloud;
    Vec masses;
};

struct CapacityResult {
    double energy = 0.0;    // I_alpha
    double capacity = 0.0;  // 1 / I_alpha
    double alpha = 0.0;
    int resolution = 0;     // requested sampling resolution (cloud size for raw solves)
    double kkt_residual = 0.0;  // relative to the energy
    long iterations = 0;
};

struct SolveOptions {
    double kkt_tol = 1e-7;       // relative KKT residual target
    long max_iterations = 100000;
};

struct EquilibriumSolution {
    DiscreteMeasure measure;
    CapacityResult result;
    Vec self_interaction;  // regularized diagonal, for field evaluation
};

/// Mean of max(|U - V|, floor)^p over independent uniform points of the unit
/// d-cube, d in {1,2,3}. This is the constant c(p, d) in the diagonal rule
/// diag = c * cell_size^p. Exposed for the calibration tests.
double cell_mean_distance_power(double p, int cell_dim, double floor_frac = 0.0);

/// Diagonal constant for ambient dimension N and cell dimension d; applies a
/// 1e-3 distance floor when the cell self-energy integral diverges (p <= -d).
double cell_self_energy_constant(double alpha, int ambient_dim, int cell_dim);

KernelMatrix assemble_kernel(const PointCloud& cloud, double alpha);

/// Minimizes m^T A m over the probability simplex with a projected-gradient /
/// Frank-Wolfe hybrid (away steps, exact line search). Deterministic for a
/// fixed input. Throws solver_failure if the KKT tolerance is not reached
/// within the iteration budget.
EquilibriumSolution solve_equilibrium(const KernelMatrix& kernel, const SolveOptions& opts = {});

/// Full pipeline: sample (boundary iff alpha <= N-2), assemble, solve.
EquilibriumSolution capacity_with_measure(const ConvexBody& body, double alpha, int resolution,
                                          const SolveOptions& opts = {});
CapacityResult capacity(const ConvexBody& body, double alpha, int resolution,
                        const SolveOptions& opts = {});

/// Relative KKT residual of masses m for the kernel A: deviation of (Am)_i
/// from the energy on the support, one-sided below the energy elsewhere.
double kkt_residual(const Mat& entries, const Vec& masses);

}  // namespace rcl
