#include "rcl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcl/detail/quadrature.hpp"
#include "rcl/parallel.hpp"

namespace rcl {

namespace {

/// Fixed-order pairwise summation; the reduction tree depends only on the
/// element count, so batch evaluations reproduce bitwise across thread counts.
double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace

PotentialField::PotentialField(DiscreteMeasure measure, double alpha, double normalization,
                               Vec self_interaction)
    : measure_(std::move(measure)),
      alpha_(alpha),
      normalization_(normalization),
      self_interaction_(std::move(self_interaction)) {
    if (!(normalization_ > 0.0))
        throw invalid_argument_error("potential field: normalization must be > 0");
    if (self_interaction_.size() != measure_.cloud.size())
        throw invalid_argument_error("potential field: self-interaction size mismatch");
    if (!(alpha_ > 0.0 && alpha_ < measure_.cloud.dim()))
        throw invalid_argument_error("potential field: alpha must lie in (0, N)");
    // Planar interior measures evaluate near-field terms as cell-averaged
    // kernels (matching the assembled energy); other clouds cap the kernel at
    // the cell self-average inside a cell.
    if (measure_.cloud.mode == PointCloud::Mode::interior && measure_.cloud.dim() == 2) {
        profile_ = detail::smear_profiles(alpha_ - measure_.cloud.dim());
        cell_radius_ = (measure_.cloud.weights.array() / M_PI).sqrt();
        cell_pow_ = cell_radius_.array().pow(alpha_ - measure_.cloud.dim());
        // anchor the own-cell (pair) profile to the pinned diagonal rule
        pair_scale_.resize(measure_.cloud.size());
        const double pair_zero = profile_->pair(0.0);
        for (int i = 0; i < measure_.cloud.size(); ++i)
            pair_scale_(i) = self_interaction_(i) / (cell_pow_(i) * pair_zero);
    }
}

double PotentialField::value(const Vec& x) const { return value_extended(x, 0.0); }

double PotentialField::value_extended(const Vec& x, double t) const {
    const int n = measure_.cloud.size();
    const double expo = 0.5 * (alpha_ - measure_.cloud.dim());
    const double t2 = t * t;
    const double s_max = detail::DiskAverageProfile::kSMax;
    std::vector<double> terms(n);
    if (profile_) {
        // The host cell (nearest source) is evaluated through the pair
        // profile anchored to the diagonal rule; every other source uses the
        // same single-cell smear the kernel matrix was assembled with.
        constexpr double kOwnEnd = 1.2, kBlendEnd = 1.5;
        int host = 0;
        double host_r2 = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const double d2 = (measure_.cloud.points.row(i).transpose() - x).squaredNorm();
            if (d2 < host_r2) {
                host_r2 = d2;
                host = i;
            }
        }
        for (int i = 0; i < n; ++i) {
            const double r2 = (measure_.cloud.points.row(i).transpose() - x).squaredNorm() + t2;
            const double u = std::sqrt(r2);
            const double s = u / cell_radius_(i);
            double k;
            if (s >= s_max)
                k = std::pow(r2, expo);
            else if (i != host || s >= kBlendEnd)
                k = cell_pow_(i) * profile_->single(s);
            else {
                const double own = cell_pow_(i) * pair_scale_(i) * profile_->pair(s);
                if (s <= kOwnEnd)
                    k = own;
                else {
                    const double w = (s - kOwnEnd) / (kBlendEnd - kOwnEnd);
                    k = (1.0 - w) * own + w * cell_pow_(i) * profile_->single(s);
                }
            }
            terms[i] = measure_.masses(i) * k;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            const double r2 = (measure_.cloud.points.row(i).transpose() - x).squaredNorm() + t2;
            terms[i] = measure_.masses(i) * std::min(std::pow(r2, expo), self_interaction_(i));
        }
    }
    return normalization_ * pairwise_sum(terms.data(), terms.size());
}

Vec PotentialField::values(const Mat& points) const {
    Vec out(points.rows());
    parallel_for(points.rows(), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) out(i) = value(points.row(i).transpose());
    });
    return out;
}

Vec PotentialField::centroid() const {
    Vec c = Vec::Zero(measure_.cloud.dim());
    for (int i = 0; i < measure_.cloud.size(); ++i)
        c += measure_.masses(i) * measure_.cloud.points.row(i).transpose();
    return c;
}

CapacitaryField capacitary_function(const ConvexBody& body, int resolution,
                                    const SolveOptions& opts) {
    EquilibriumSolution sol = capacity_with_measure(body, 1.0, resolution, opts);
    PotentialField field(std::move(sol.measure), 1.0, 1.0 / sol.result.energy,
                         std::move(sol.self_interaction));
    return CapacitaryField{std::move(field), sol.result};
}

std::vector<std::pair<double, double>> decay_probe(const PotentialField& field,
                                                   const std::vector<double>& radii,
                                                   int directions) {
    if (field.alpha() != 1.0)
        throw invalid_argument_error("decay_probe: defined for alpha = 1 fields");
    if (radii.empty()) throw invalid_argument_error("decay_probe: radii list is empty");
    const Vec center = field.centroid();
    const int dim = field.measure().cloud.dim();
    double bounding = 0.0;
    for (int i = 0; i < field.measure().cloud.size(); ++i)
        bounding = std::max(bounding,
                            (field.measure().cloud.points.row(i).transpose() - center).norm());
    const double min_radius = std::max(2.0 * field.cloud_diameter(), bounding);
    double prev = 0.0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (k > 0 && radii[k] <= prev)
            throw invalid_argument_error("decay_probe: radii must be increasing");
        if (radii[k] <= min_radius)
            throw invalid_argument_error(
                "decay_probe: radius reaches inside the cloud's bounding ball");
        prev = radii[k];
    }
    const auto dirs = unit_directions(dim, directions);
    std::vector<std::pair<double, double>> out;
    out.reserve(radii.size());
    for (const double r : radii) {
        double acc = 0.0;
        for (const auto& nu : dirs) acc += field.value(center + r * nu);
        const double scaled = std::pow(r, dim - 1) * acc / directions;
        out.emplace_back(r, scaled);
    }
    return out;
}

ExtensionField::ExtensionField(PotentialField base) : base_(std::move(base)) {
    if (base_.alpha() != 1.0)
        throw invalid_argument_error(
            "extension field: the (N+1)-kernel identity requires alpha = 1");
}

double ExtensionField::value(const Vec& x, double t) const { return base_.value_extended(x, t); }

double poisson_extension(const std::function<double(const Vec&)>& f, int dim, const Vec& x,
                         double t) {
    if (t < 0.0) throw invalid_argument_error("poisson_extension: t must be >= 0");
    if (t == 0.0) return f(x);
    const auto dirs = unit_directions(dim, dim == 2 ? 128 : 512);
    auto sphere_mean = [&](double r) {
        double acc = 0.0;
        for (const auto& nu : dirs) acc += f(x + r * nu);
        return acc / static_cast<double>(dirs.size());
    };
    const auto [xs, ws] = detail::gauss_legendre(200);
    double acc = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double phi = 0.25 * M_PI * (xs[k] + 1.0);
        const double m = sphere_mean(t * std::tan(phi));
        const double weight = dim == 2 ? std::sin(phi) : std::sin(phi) * std::sin(phi);
        acc += ws[k] * weight * m;
    }
    acc *= 0.25 * M_PI;
    return dim == 2 ? acc : 4.0 / M_PI * acc;
}

namespace {

void check_h_seq(const std::vector<double>& h_seq) {
    if (h_seq.empty()) throw invalid_argument_error("h sequence is empty");
    double prev = std::numeric_limits<double>::infinity();
    for (const double h : h_seq) {
        if (!(h > 0.0 && h < prev))
            throw invalid_argument_error("h sequence must be positive and strictly decreasing");
        prev = h;
    }
}

/// Neville extrapolation of (h_k, d_k) to h = 0.
double extrapolate_to_zero(const std::vector<double>& h, std::vector<double> d) {
    const int n = static_cast<int>(d.size());
    for (int j = 1; j < n; ++j)
        for (int i = n - 1; i >= j; --i)
            d[i] = (h[i] * d[i - 1] - h[i - j] * d[i]) / (h[i] - h[i - j]);
    return d[n - 1];
}

struct Calibration {
    double sign;
    double ratio;
};

/// The Gaussian exp(-|x|^2) in the plane has (-Delta)^{1/2} value sqrt(pi)
/// at the origin (radial Fourier multiplier integral in closed form). The
/// extension route is measured against that once to fix the sign convention.
const Calibration& gaussian_calibration() {
    static const Calibration cal = [] {
        auto gauss = [](const Vec& y) { return std::exp(-y.squaredNorm()); };
        const Vec origin = Vec::Zero(2);
        const std::vector<double> hs = {0.4, 0.2, 0.1, 0.05};
        std::vector<double> slopes;
        const double u0 = gauss(origin);
        for (const double h : hs)
            slopes.push_back((poisson_extension(gauss, 2, origin, h) - u0) / h);
        const double raw = extrapolate_to_zero(hs, slopes);
        const double reference = std::sqrt(M_PI);
        Calibration c;
        c.sign = raw * reference < 0.0 ? -1.0 : 1.0;
        c.ratio = std::abs(raw) / reference;
        return c;
    }();
    return cal;
}

FracLapResult assemble_result(const std::vector<double>& h_seq, std::vector<double> slopes) {
    const auto& cal = gaussian_calibration();
    FracLapResult res;
    res.one_sided = slopes;
    res.raw_slope = extrapolate_to_zero(h_seq, std::move(slopes));
    res.sign = cal.sign;
    res.calibration_ratio = cal.ratio;
    res.value = cal.sign * res.raw_slope;
    return res;
}

}  // namespace

FracLapResult fractional_laplacian_extension(const ExtensionField& ext, const Vec& x,
                                             const std::vector<double>& h_seq) {
    check_h_seq(h_seq);
    const double u0 = ext.value(x, 0.0);
    std::vector<double> slopes;
    slopes.reserve(h_seq.size());
    for (const double h : h_seq) slopes.push_back((ext.value(x, h) - u0) / h);
    return assemble_result(h_seq, std::move(slopes));
}

FracLapResult fractional_laplacian_extension(const std::function<double(const Vec&)>& f, int dim,
                                             const Vec& x, const std::vector<double>& h_seq) {
    check_h_seq(h_seq);
    const double u0 = f(x);
    std::vector<double> slopes;
    slopes.reserve(h_seq.size());
    for (const double h : h_seq) slopes.push_back((poisson_extension(f, dim, x, h) - u0) / h);
    return assemble_result(h_seq, std::move(slopes));
}

}  // namespace rcl
