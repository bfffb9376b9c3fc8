#include "rcl/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <cmath>
#include <limits>
#include <sstream>

#include "rcl/detail/disk_average.hpp"
#include "rcl/detail/quadrature.hpp"
#include "rcl/parallel.hpp"

namespace rcl {

namespace {

constexpr double kDistanceFloor = 1e-3;  // for divergent panel self-energies

double power_int(double lo, double hi, double q) {
    // integral of rho^{q-1} from lo to hi
    if (q == 0.0) return std::log(hi / lo);
    return (std::pow(hi, q) - std::pow(lo, q)) / q;
}

double mean_power_1d(double p, double floor_frac) {
    if (floor_frac <= 0.0) {
        if (p <= -1.0)
            throw invalid_argument_error("segment self-energy diverges for p <= -1 without a floor");
        return 2.0 / ((p + 1.0) * (p + 2.0));
    }
    const double f = floor_frac;
    const double inside = std::pow(f, p) * (2.0 * f - f * f);
    const double i1 = power_int(f, 1.0, p + 1.0);
    const double i2 = power_int(f, 1.0, p + 2.0);
    return inside + 2.0 * (i1 - i2);
}

double mean_power_2d(double p, double floor_frac) {
    if (floor_frac <= 0.0 && p <= -2.0)
        throw invalid_argument_error("2-cell self-energy diverges for p <= -2 without a floor");
    const auto [xs, ws] = detail::gauss_legendre(128);
    const double f = floor_frac;
    double acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double th = 0.125 * M_PI * (xs[k] + 1.0);
        const double c = std::cos(th), s = std::sin(th);
        const double r = 1.0 / c;
        const double lo = f > 0.0 ? f : 0.0;
        double val = power_int(lo, r, p + 2.0) - (c + s) * power_int(lo, r, p + 3.0) +
                     c * s * power_int(lo, r, p + 4.0);
        if (f > 0.0) {
            // mass of the difference density inside the floor disk
            const double inside =
                f * f / 2.0 - (c + s) * f * f * f / 3.0 + c * s * f * f * f * f / 4.0;
            val += std::pow(f, p) * inside;
        }
        acc += ws[k] * val;
    }
    return 8.0 * acc * 0.125 * M_PI;
}

double mean_power_3d(double p) {
    // difference density of a unit cube reduced to spherical coordinates on
    // the region where the z-coordinate dominates (48-fold symmetry)
    const auto [xs, ws] = detail::gauss_legendre(64);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double phi = 0.125 * M_PI * (xs[i] + 1.0);
        const double cphi = std::cos(phi), sphi = std::sin(phi);
        const double thmax = std::atan(1.0 / cphi);
        double inner = 0.0;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double th = 0.5 * thmax * (xs[j] + 1.0);
            const double cth = std::cos(th), sth = std::sin(th);
            const double a = sth * cphi, b = sth * sphi, c = cth;
            const double r = 1.0 / cth;
            const double e1 = a + b + c, e2 = a * b + a * c + b * c, e3 = a * b * c;
            const double val = power_int(0.0, r, p + 3.0) - e1 * power_int(0.0, r, p + 4.0) +
                               e2 * power_int(0.0, r, p + 5.0) - e3 * power_int(0.0, r, p + 6.0);
            inner += ws[j] * val * sth;
        }
        acc += ws[i] * inner * 0.5 * thmax;
    }
    return 48.0 * acc * 0.125 * M_PI;
}

/// Euclidean projection onto the probability simplex (sort-based).
Vec project_simplex(const Vec& u) {
    const int n = static_cast<int>(u.size());
    std::vector<double> s(u.data(), u.data() + n);
    std::sort(s.begin(), s.end(), std::greater<double>());
    double running = 0.0, tau = 0.0;
    for (int j = 0; j < n; ++j) {
        running += s[j];
        const double t = (running - 1.0) / (j + 1);
        if (s[j] - t > 0.0) tau = t;
    }
    Vec z(n);
    for (int i = 0; i < n; ++i) z(i) = std::max(u(i) - tau, 0.0);
    return z;
}

double lambda_max_estimate(const Mat& a) {
    Vec v = Vec::Ones(a.rows()).normalized();
    double lam = 1.0;
    for (int k = 0; k < 40; ++k) {
        Vec w = a * v;
        const double norm = w.norm();
        if (norm == 0.0) return 1.0;
        lam = norm;
        v = w / norm;
    }
    return lam;
}

}  // namespace

std::shared_ptr<const detail::SmearProfiles> detail::smear_profiles(double power) {
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const detail::SmearProfiles>> cache;
    std::uint64_t key;
    static_assert(sizeof(key) == sizeof(power));
    std::memcpy(&key, &power, sizeof(key));
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto made = std::make_shared<const detail::SmearProfiles>(power);
    cache.emplace(key, made);
    return made;
}

double cell_mean_distance_power(double p, int cell_dim, double floor_frac) {
    switch (cell_dim) {
        case 1:
            return mean_power_1d(p, floor_frac);
        case 2:
            return mean_power_2d(p, floor_frac);
        case 3:
            if (floor_frac > 0.0)
                throw invalid_argument_error("3-cell self-energy never needs a floor for p > -3");
            if (p <= -3.0) throw invalid_argument_error("3-cell self-energy diverges for p <= -3");
            return mean_power_3d(p);
        default:
            throw invalid_argument_error("cell_mean_distance_power: cell_dim must be 1, 2 or 3");
    }
}

double cell_self_energy_constant(double alpha, int ambient_dim, int cell_dim) {
    const double p = alpha - ambient_dim;
    const bool divergent = p <= -static_cast<double>(cell_dim);
    return cell_mean_distance_power(p, cell_dim, divergent ? kDistanceFloor : 0.0);
}

DiscreteMeasure::DiscreteMeasure(PointCloud c, Vec m) : cloud(std::move(c)), masses(std::move(m)) {
    if (masses.size() != cloud.size())
        throw invalid_argument_error("measure: masses/cloud size mismatch");
    if ((masses.array() < 0.0).any()) throw invalid_argument_error("measure: masses must be >= 0");
    if (std::abs(masses.sum() - 1.0) > 1e-10)
        throw invalid_argument_error("measure: masses must sum to 1 within 1e-10");
}

KernelMatrix assemble_kernel(const PointCloud& cloud, double alpha) {
    const int n = cloud.size();
    const int dim = cloud.dim();
    if (!(alpha > 0.0 && alpha < dim))
        throw invalid_argument_error("assemble_kernel: alpha must lie in (0, N)");
    if (n > 5000)
        throw invalid_argument_error(
            "assemble_kernel: dense storage is limited to 5000 points; lower the resolution");
    const int cell_dim = cloud.mode == PointCloud::Mode::boundary ? dim - 1 : dim;
    const double c = cell_self_energy_constant(alpha, dim, cell_dim);
    const double expo = alpha - dim;

    const double scale =
        (cloud.points.colwise().maxCoeff() - cloud.points.colwise().minCoeff()).norm();
    const double dup_tol = 1e-12 * std::max(scale, 1e-300);

    // Planar interior clouds carry equivalent-disk cell radii: interactions
    // at separations under a few cells are evaluated as cell-averaged kernels
    // (symmetrized single-cell smears), which keeps the discrete energy
    // consistent with the field evaluation between nodes. Far pairs reduce to
    // the raw point kernel exactly.
    const bool smear = cloud.mode == PointCloud::Mode::interior && dim == 2;
    std::shared_ptr<const detail::SmearProfiles> profs;
    Vec cell_radius, cell_pow;
    if (smear) {
        profs = detail::smear_profiles(expo);
        cell_radius = (cloud.weights.array() / M_PI).sqrt();
        cell_pow = cell_radius.array().pow(expo);
    }
    const double s_max = detail::DiskAverageProfile::kSMax;

    Mat a(n, n);
    std::atomic<bool> dup{false};
    parallel_for(n, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            for (std::int64_t j = 0; j < i; ++j) {
                const double r = (cloud.points.row(i) - cloud.points.row(j)).norm();
                if (r <= dup_tol) dup.store(true, std::memory_order_relaxed);
                if (smear && r < s_max * std::max(cell_radius(i), cell_radius(j))) {
                    const double side_i = r < s_max * cell_radius(i)
                                              ? cell_pow(i) * profs->single(r / cell_radius(i))
                                              : std::pow(r, expo);
                    const double side_j = r < s_max * cell_radius(j)
                                              ? cell_pow(j) * profs->single(r / cell_radius(j))
                                              : std::pow(r, expo);
                    a(i, j) = 0.5 * (side_i + side_j);
                } else {
                    a(i, j) = std::pow(r, expo);
                }
            }
            a(i, i) = c * std::pow(cloud.weights(i), expo / cell_dim);
        }
    });
    if (dup.load()) throw duplicate_point_error("assemble_kernel: coincident sample points");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i);

    KernelMatrix k{std::move(a), alpha, dim, "", cloud, Vec()};
    k.self_interaction = k.entries.diagonal();
    std::ostringstream rule;
    rule.precision(17);
    rule << "cell-average d=" << cell_dim << " C=" << c;
    if (expo <= -static_cast<double>(cell_dim)) rule << " floor=" << kDistanceFloor;
    k.diagonal_rule = rule.str();
    return k;
}

double kkt_residual(const Mat& entries, const Vec& masses) {
    const Vec am = entries * masses;
    const double e = masses.dot(am);
    double worst_support = 0.0;
    double min_off = std::numeric_limits<double>::infinity();
    for (int i = 0; i < masses.size(); ++i) {
        if (masses(i) > 0.0)
            worst_support = std::max(worst_support, std::abs(am(i) - e));
        else
            min_off = std::min(min_off, am(i));
    }
    const double off_violation = std::isfinite(min_off) ? std::max(0.0, e - min_off) : 0.0;
    return std::max(worst_support, off_violation) / e;
}

EquilibriumSolution solve_equilibrium(const KernelMatrix& kernel, const SolveOptions& opts) {
    const Mat& a = kernel.entries;
    const int n = kernel.size();

    Vec m = Vec::Constant(n, 1.0 / n);
    Vec am = a * m;
    double e = m.dot(am);

    auto residual_of = [&](const Vec& mm, const Vec& amm, double ee) {
        double worst = 0.0;
        double min_off = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (mm(i) > 0.0)
                worst = std::max(worst, std::abs(amm(i) - ee));
            else
                min_off = std::min(min_off, amm(i));
        }
        const double off = std::isfinite(min_off) ? std::max(0.0, ee - min_off) : 0.0;
        return std::max(worst, off) / ee;
    };

    const double step = 1.0 / (2.0 * lambda_max_estimate(a));
    const long pg_period = std::max<long>(16, n / 8);
    const long refresh_period = 1024;

    double best_resid = std::numeric_limits<double>::infinity();
    Vec best_m = m;
    long it = 0;
    bool converged = false;

    while (it < opts.max_iterations) {
        double resid = residual_of(m, am, e);
        if (resid < best_resid) {
            best_resid = resid;
            best_m = m;
        }
        if (resid <= opts.kkt_tol) {
            // certify against a fresh matvec before accepting
            am = a * m;
            e = m.dot(am);
            resid = residual_of(m, am, e);
            if (resid <= opts.kkt_tol) {
                converged = true;
                break;
            }
        }

        if (it % pg_period == 0) {
            // projected-gradient step with exact line search
            const Vec z = project_simplex(m - (2.0 * step) * am);
            const Vec d = z - m;
            const double gd = 2.0 * am.dot(d);
            if (gd < 0.0) {
                const Vec ad = a * d;
                const double dad = d.dot(ad);
                const double gamma = dad > 0.0 ? std::min(1.0, -gd / (2.0 * dad)) : 1.0;
                m += gamma * d;
                for (int i = 0; i < n; ++i)
                    if (m(i) < 0.0) m(i) = 0.0;
                am += gamma * ad;
                e = m.dot(am);
            }
        } else {
            // Frank-Wolfe / away step on the cached products (rank-1 update)
            int s_idx = 0, a_idx = -1;
            double am_min = am(0), am_max = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                if (am(i) < am_min) {
                    am_min = am(i);
                    s_idx = i;
                }
                if (m(i) > 0.0 && am(i) > am_max) {
                    am_max = am(i);
                    a_idx = i;
                }
            }
            const double gap_fw = 2.0 * (e - am_min);
            const double gap_aw = a_idx >= 0 ? 2.0 * (am_max - e) : 0.0;
            if (std::max(gap_fw, gap_aw) > 0.0) {
                if (gap_fw >= gap_aw) {
                    const double dad = a(s_idx, s_idx) - 2.0 * am(s_idx) + e;
                    const double gamma = dad > 0.0 ? std::min(1.0, gap_fw / (2.0 * dad)) : 1.0;
                    m *= (1.0 - gamma);
                    m(s_idx) += gamma;
                    am = (1.0 - gamma) * am + gamma * a.col(s_idx);
                } else {
                    const double ma = m(a_idx);
                    const double gamma_max = ma < 1.0 ? ma / (1.0 - ma) : 1.0;
                    const double dad = e - 2.0 * am(a_idx) + a(a_idx, a_idx);
                    double gamma = dad > 0.0 ? gap_aw / (2.0 * dad) : gamma_max;
                    const bool drop = gamma >= gamma_max;
                    gamma = std::min(gamma, gamma_max);
                    m *= (1.0 + gamma);
                    m(a_idx) -= gamma;
                    if (drop) m(a_idx) = 0.0;
                    am = (1.0 + gamma) * am - gamma * a.col(a_idx);
                }
                e = m.dot(am);
            }
        }

        ++it;
        if (it % refresh_period == 0) {
            m /= m.sum();
            am = a * m;
            e = m.dot(am);
        }
    }

    if (!converged) {
        std::ostringstream os;
        os << "equilibrium solve did not reach KKT tolerance " << opts.kkt_tol << " in "
           << opts.max_iterations << " iterations (best residual " << best_resid << ")";
        throw solver_failure(os.str(), best_resid, best_m, it);
    }

    m /= m.sum();
    am = a * m;
    e = m.dot(am);
    const double resid = residual_of(m, am, e);

    CapacityResult res;
    res.energy = e;
    res.capacity = 1.0 / e;
    res.alpha = kernel.alpha;
    res.resolution = n;
    res.kkt_residual = resid;
    res.iterations = it;
    return EquilibriumSolution{DiscreteMeasure(kernel.cloud, m), res, kernel.self_interaction};
}

EquilibriumSolution capacity_with_measure(const ConvexBody& body, double alpha, int resolution,
                                          const SolveOptions& opts) {
    if (body.degenerate())
        throw degenerate_body_error("capacity: degenerate body (affine hull dimension < N)");
    const int dim = body.dim();
    if (!(alpha > 0.0 && alpha < dim))
        throw invalid_argument_error("capacity: alpha must lie in (0, N)");
    const auto mode = alpha <= dim - 2 ? PointCloud::Mode::boundary : PointCloud::Mode::interior;
    const PointCloud cloud = sample_points(body, mode, resolution);
    const KernelMatrix kernel = assemble_kernel(cloud, alpha);
    EquilibriumSolution sol = solve_equilibrium(kernel, opts);
    sol.result.resolution = resolution;
    return sol;
}

CapacityResult capacity(const ConvexBody& body, double alpha, int resolution,
                        const SolveOptions& opts) {
    return capacity_with_measure(body, alpha, resolution, opts).result;
}

}  // namespace rcl
