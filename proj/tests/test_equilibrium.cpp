#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "rcl/equilibrium.hpp"
#include "support/grid_search.hpp"

using namespace rcl;

namespace {

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

ConvexBody unit_square() {
    return ConvexBody::polytope({v2(-0.5, -0.5), v2(0.5, -0.5), v2(0.5, 0.5), v2(-0.5, 0.5)});
}

ConvexBody unit_disk() { return ConvexBody::ball(v2(0, 0), 1.0); }

PointCloud grid_cloud(int per_side, double h, PointCloud::Mode mode) {
    Mat pts(per_side * per_side, 2);
    int k = 0;
    for (int i = 0; i < per_side; ++i)
        for (int j = 0; j < per_side; ++j) {
            pts(k, 0) = i * h;
            pts(k, 1) = j * h;
            ++k;
        }
    Vec w = Vec::Constant(per_side * per_side, h * h);
    return PointCloud(std::move(pts), std::move(w), mode);
}

// Mesh-refinement oracle (resolutions 250/1000/4000, h halving) run once
// during development; its Richardson extrapolant is the repo's reference
// value for I_1 of the unit disk.
constexpr double kDiskEnergyReference = 1.5669028;

}  // namespace

TEST_CASE("cell self-interaction constants match closed forms and classics") {
    // segment: E|u-v|^p = 2/((p+1)(p+2))
    CHECK(cell_mean_distance_power(1.0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cell_mean_distance_power(-0.5, 1) == doctest::Approx(2.0 / (0.5 * 1.5)).epsilon(1e-14));
    // unit square: mean distance and mean squared distance
    CHECK(cell_mean_distance_power(1.0, 2) == doctest::Approx(0.521405433165).epsilon(1e-9));
    CHECK(cell_mean_distance_power(2.0, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    // unit cube: Robbins constant and the Coulomb self-energy average
    CHECK(cell_mean_distance_power(1.0, 3) == doctest::Approx(0.661707182267).epsilon(1e-9));
    CHECK(cell_mean_distance_power(-1.0, 3) == doctest::Approx(1.882312644390).epsilon(1e-9));
    // divergent cases demand a floor
    CHECK_THROWS_AS(cell_mean_distance_power(-2.0, 2), invalid_argument_error);
    CHECK(cell_mean_distance_power(-2.0, 2, 1e-3) > 0.0);
}

TEST_CASE("diagonal rule equals the Monte Carlo cell self-energy") {
    // brute-force oracle: mean self-interaction of one lattice cell
    const double alpha = 1.3;
    const double h = 0.1;
    const auto cloud = grid_cloud(5, h, PointCloud::Mode::interior);
    const auto kernel = assemble_kernel(cloud, alpha);

    std::mt19937_64 rng(202408);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double acc = 0.0;
    const int trials = 2000000;
    for (int t = 0; t < trials; ++t) {
        const double dx = (uni(rng) - uni(rng)) * h;
        const double dy = (uni(rng) - uni(rng)) * h;
        acc += std::pow(std::hypot(dx, dy), alpha - 2.0);
    }
    const double oracle = acc / trials;
    for (int i = 0; i < kernel.size(); ++i)
        CHECK(kernel.entries(i, i) == doctest::Approx(oracle).epsilon(0.02));
    CHECK(kernel.diagonal_rule.find("cell-average") != std::string::npos);
}

TEST_CASE("boundary panel diagonal matches the segment Monte Carlo") {
    const double alpha = 1.5;  // p = -0.5, convergent segment self-energy
    Mat pts(8, 2);
    for (int i = 0; i < 8; ++i) {
        pts(i, 0) = 0.25 * i;
        pts(i, 1) = 0.0;
    }
    pts.col(1).setLinSpaced(8, 0.0, 0.7);  // keep points distinct off-axis
    Vec w = Vec::Constant(8, 0.25);
    const auto kernel = assemble_kernel(PointCloud(pts, w, PointCloud::Mode::boundary), alpha);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 0.25);
    double acc = 0.0;
    const int trials = 2000000;
    for (int t = 0; t < trials; ++t) acc += std::pow(std::abs(uni(rng) - uni(rng)), alpha - 2.0);
    const double oracle = acc / trials;
    for (int i = 0; i < 8; ++i)
        CHECK(kernel.entries(i, i) == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("kernel: two points and scaling homogeneity") {
    const double alpha = 0.8;
    Mat pts(2, 2);
    pts << 0.0, 0.0, 3.0, 4.0;  // distance 5
    Vec w = Vec::Constant(2, 0.1);
    const auto k = assemble_kernel(PointCloud(pts, w, PointCloud::Mode::interior), alpha);
    CHECK(k.entries(0, 1) == doctest::Approx(std::pow(5.0, alpha - 2.0)).epsilon(1e-14));
    CHECK(k.entries(1, 0) == k.entries(0, 1));

    const double r = 2.5;
    const auto ks =
        assemble_kernel(PointCloud(r * pts, w * r * r, PointCloud::Mode::interior), alpha);
    const double factor = std::pow(r, alpha - 2.0);
    CHECK(ks.entries(0, 1) == doctest::Approx(factor * k.entries(0, 1)).epsilon(1e-13));
    CHECK(ks.entries(0, 0) == doctest::Approx(factor * k.entries(0, 0)).epsilon(1e-13));
}

TEST_CASE("kernel: rejects bad inputs") {
    Mat pts(2, 2);
    pts << 0.0, 0.0, 0.0, 0.0;
    Vec w = Vec::Constant(2, 0.1);
    CHECK_THROWS_AS(assemble_kernel(PointCloud(pts, w, PointCloud::Mode::interior), 1.0),
                    duplicate_point_error);

    Mat pts2(2, 2);
    pts2 << 0.0, 0.0, 1.0, 0.0;
    CHECK_THROWS_AS(assemble_kernel(PointCloud(pts2, w, PointCloud::Mode::interior), 2.0),
                    invalid_argument_error);
    CHECK_THROWS_AS(assemble_kernel(PointCloud(pts2, w, PointCloud::Mode::interior), -0.5),
                    invalid_argument_error);

    Mat big = Mat::Random(5001, 2) * 100.0;
    Vec bw = Vec::Constant(5001, 1e-3);
    CHECK_THROWS_AS(assemble_kernel(PointCloud(big, bw, PointCloud::Mode::interior), 1.0),
                    invalid_argument_error);
}

TEST_CASE("solve: symmetric pair splits evenly") {
    Mat pts(2, 2);
    pts << -1.0, 0.0, 1.0, 0.0;
    Vec w = Vec::Constant(2, 0.5);
    const auto sol = solve_equilibrium(assemble_kernel(PointCloud(pts, w, PointCloud::Mode::interior), 1.0));
    CHECK(sol.measure.masses(0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.measure.masses(1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.result.kkt_residual <= 1e-7);
    CHECK(sol.result.capacity * sol.result.energy == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solve: optimum beats the uniform measure and is feasible") {
    const auto cloud = sample_points(unit_square(), PointCloud::Mode::interior, 200);
    const auto kernel = assemble_kernel(cloud, 1.0);
    const auto sol = solve_equilibrium(kernel);
    const int n = kernel.size();
    const Vec uniform = Vec::Constant(n, 1.0 / n);
    CHECK(sol.result.energy <= uniform.dot(kernel.entries * uniform) + 1e-12);
    CHECK((sol.measure.masses.array() >= 0.0).all());
    CHECK(sol.measure.masses.sum() == doctest::Approx(1.0).epsilon(1e-10));
    // KKT certificate recomputed from scratch
    CHECK(kkt_residual(kernel.entries, sol.measure.masses) <= 1e-7);
}

TEST_CASE("disk energies refine monotonically; Richardson extrapolation is stable") {
    const auto disk = unit_disk();
    double e[3];
    int k = 0;
    for (int res : {250, 1000, 4000}) {
        e[k++] = capacity(disk, 1.0, res).energy;
    }
    CHECK(e[0] < e[1]);
    CHECK(e[1] < e[2]);
    const double d1 = e[1] - e[0], d2 = e[2] - e[1];
    REQUIRE(d1 > d2);  // consistent refinement
    const double extrap = e[2] + d2 * d2 / (d1 - d2);
    CHECK(std::abs(extrap - e[2]) / extrap <= 0.005);  // self-consistency
    CHECK(extrap == doctest::Approx(kDiskEnergyReference).epsilon(5e-4));
    // default resolution reproduces the reference within 1%
    CHECK(capacity(disk, 1.0, 500).energy == doctest::Approx(kDiskEnergyReference).epsilon(0.01));
}

TEST_CASE("capacity scaling law") {
    const auto sq = unit_square();
    const double base = capacity(sq, 1.0, 300).capacity;
    for (double r : {0.5, 2.0}) {
        const double scaled = capacity(sq.scaled(r), 1.0, 300).capacity;
        CHECK(scaled / base == doctest::Approx(std::pow(r, 2.0 - 1.0)).epsilon(0.005));
    }
    // log-log regression over r in {1/2, 1, 2, 4} has slope N - alpha within 1%
    const double alpha = 1.5;
    std::vector<double> lr, lc;
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
        lr.push_back(std::log(r));
        lc.push_back(std::log(capacity(sq.scaled(r), alpha, 300).capacity));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < 4; ++i) {
        mx += lr[i] / 4;
        my += lc[i] / 4;
    }
    double num = 0, den = 0;
    for (int i = 0; i < 4; ++i) {
        num += (lr[i] - mx) * (lc[i] - my);
        den += (lr[i] - mx) * (lr[i] - mx);
    }
    CHECK(num / den == doctest::Approx(2.0 - alpha).epsilon(0.01));
}

TEST_CASE("capacity is translation invariant") {
    const auto sq = unit_square();
    const double a = capacity(sq, 1.0, 300).capacity;
    const double b = capacity(sq.translated(v2(13.0, -41.0)), 1.0, 300).capacity;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("capacity is monotone under inclusion") {
    const auto inner = ConvexBody::ball(v2(0, 0), 0.45);
    const auto outer = unit_square();  // half-width 0.5 contains the 0.45 disk
    // inclusion verified via support functions
    for (const auto& nu : unit_directions(2, 256)) CHECK(inner.support(nu) <= outer.support(nu));
    const double ci = capacity(inner, 1.0, 400).capacity;
    const double co = capacity(outer, 1.0, 400).capacity;
    CHECK(ci <= co + 1e-6);
}

TEST_CASE("capacity pipeline picks the support location by alpha vs N-2") {
    Vec c3 = Vec::Zero(3);
    const auto ball3 = ConvexBody::ball(c3, 1.0);
    const auto sol_boundary = capacity_with_measure(ball3, 1.0, 400);
    CHECK(sol_boundary.measure.cloud.mode == PointCloud::Mode::boundary);
    const auto sol_interior = capacity_with_measure(ball3, 2.0, 400);
    CHECK(sol_interior.measure.cloud.mode == PointCloud::Mode::interior);
    const auto sol_2d = capacity_with_measure(unit_disk(), 0.5, 200);
    CHECK(sol_2d.measure.cloud.mode == PointCloud::Mode::interior);
}

TEST_CASE("capacity rejects degenerate bodies and bad alpha") {
    const auto seg = ConvexBody::polytope({v2(-1, 0), v2(1, 0)});
    CHECK_THROWS_AS(capacity(seg, 1.0, 100), degenerate_body_error);
    CHECK_THROWS_AS(capacity(unit_disk(), 2.0, 100), invalid_argument_error);
    CHECK_THROWS_AS(capacity(unit_disk(), 0.0, 100), invalid_argument_error);
}

TEST_CASE("small clouds: solver matches exhaustive simplex-grid search") {
    std::mt19937_64 rng(90210);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(2, 12);
    const int grid_steps = 50;  // step 0.02

    for (int trial = 0; trial < 8; ++trial) {
        const int n = size_dist(rng);
        Mat pts(n, 2);
        // rejection-sample a separated cloud so the regularized kernel stays
        // positive definite (as it is for genuine quadrature clouds)
        for (int i = 0; i < n;) {
            const double x = uni(rng), y = uni(rng);
            bool ok = true;
            for (int j = 0; j < i; ++j)
                if (std::hypot(pts(j, 0) - x, pts(j, 1) - y) < 0.2) ok = false;
            if (ok) {
                pts(i, 0) = x;
                pts(i, 1) = y;
                ++i;
            }
        }
        Vec w = Vec::Constant(n, 1.0 / n);
        const auto kernel = assemble_kernel(PointCloud(pts, w, PointCloud::Mode::interior), 1.0);
        const auto sol = solve_equilibrium(kernel);
        const auto grid =
            gridsearch::exhaustive_min(kernel.entries, grid_steps, sol.measure.masses);
        const double rounded = [&] {
            const auto units = gridsearch::round_to_grid(sol.measure.masses, grid_steps);
            Vec m(n);
            for (int i = 0; i < n; ++i) m(i) = units(i) / static_cast<double>(grid_steps);
            return m.dot(kernel.entries * m);
        }();
        // grid minimum brackets between the true optimum and its rounding
        CHECK(grid.min_energy >= sol.result.energy * (1.0 - 1e-6));
        CHECK(grid.min_energy <= rounded + 1e-12);
    }
}

TEST_CASE("solver failure carries the best iterate") {
    const auto cloud = sample_points(unit_disk(), PointCloud::Mode::interior, 300);
    const auto kernel = assemble_kernel(cloud, 1.0);
    SolveOptions opts;
    opts.max_iterations = 3;
    opts.kkt_tol = 1e-12;
    try {
        solve_equilibrium(kernel, opts);
        FAIL("expected solver_failure");
    } catch (const solver_failure& f) {
        CHECK(f.best_masses.size() == kernel.size());
        CHECK(f.residual > 0.0);
        CHECK(f.iterations == 3);
    }
}
