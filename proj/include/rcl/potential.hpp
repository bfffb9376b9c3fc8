#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "rcl/detail/disk_average.hpp"
#include "rcl/equilibrium.hpp"

namespace rcl {

/// Riesz potential of a discrete measure,
///   value(x) = normalization * sum_i m_i |x - y_i|^{alpha - N}.
/// For planar interior measures, terms at separations under a few cells are
/// evaluated as cell-averaged kernels (matching the assembled energy), with
/// the regularized diagonal rule exactly at x = y_i; beyond the near zone,
/// and for boundary or 3D clouds throughout, the raw kernel is used with a
/// cap at the cell self-average inside a point's own cell.
class PotentialField {
public:
    PotentialField(DiscreteMeasure measure, double alpha, double normalization,
                   Vec self_interaction);

    double value(const Vec& x) const;
    Vec values(const Mat& points) const;  // batch, parallel over points

    /// Same sum with |x - y_i|^2 replaced by |x - y_i|^2 + t^2 (the upper
    /// half-space kernel for alpha = 1); equals value(x) bit-for-bit at t = 0.
    double value_extended(const Vec& x, double t) const;

    double alpha() const { return alpha_; }
    double normalization() const { return normalization_; }
    const DiscreteMeasure& measure() const { return measure_; }
    const Vec& self_interaction() const { return self_interaction_; }

    /// Mass-weighted centroid of the measure (the natural decay-probe center).
    Vec centroid() const;
    double cloud_diameter() const { return measure_.cloud.diameter(); }

private:
    DiscreteMeasure measure_;
    double alpha_;
    double normalization_;
    Vec self_interaction_;
    std::shared_ptr<const detail::SmearProfiles> profile_;  // planar interior only
    Vec cell_radius_;
    Vec cell_pow_;
    Vec pair_scale_;
};

struct CapacitaryField {
    PotentialField field;
    CapacityResult result;
};

/// Equilibrium pipeline at alpha = 1 normalized by 1/I_1(K): the field equals
/// 1 on K up to the plateau tolerance and lies in (0,1) outside.
CapacitaryField capacitary_function(const ConvexBody& body, int resolution,
                                    const SolveOptions& opts = {});

/// r^{N-1} * field(c + r nu) averaged over sampled directions nu, with c the
/// measure centroid; approaches normalization * total mass as r grows.
/// Radii must be increasing and exceed both twice the cloud diameter and its
/// bounding radius.
std::vector<std::pair<double, double>> decay_probe(const PotentialField& field,
                                                   const std::vector<double>& radii,
                                                   int directions = 64);

/// Harmonic extension of an alpha = 1 field to the upper half-space via the
/// (N+1)-dimensional Newtonian kernel applied to the same measure:
///   value(x, t) = normalization * sum_i m_i (|x - y_i|^2 + t^2)^{-(N-1)/2}.
/// Agrees bit-for-bit with the potential at t = 0.
class ExtensionField {
public:
    explicit ExtensionField(PotentialField base);

    double value(const Vec& x, double t) const;
    const PotentialField& base() const { return base_; }

private:
    PotentialField base_;
};

/// Half-space Poisson extension of a decaying function (quadrature in polar
/// form); U(x, 0) evaluates f directly.
double poisson_extension(const std::function<double(const Vec&)>& f, int dim, const Vec& x,
                         double t);

struct FracLapResult {
    double value = 0.0;      // calibrated limit of the one-sided t-derivative
    double raw_slope = 0.0;  // uncalibrated extrapolated slope
    double sign = 0.0;       // calibrated sign convention
    double calibration_ratio = 0.0;  // |extension route| / analytic Gaussian reference
    std::vector<double> one_sided;   // (U(x,h) - U(x,0))/h per h
};

/// (-Delta)^{1/2} via the extension: Richardson-extrapolated one-sided
/// difference of the harmonic extension in t, sign fixed once against the
/// Gaussian reference. h_seq must be positive and strictly decreasing.
FracLapResult fractional_laplacian_extension(const ExtensionField& ext, const Vec& x,
                                             const std::vector<double>& h_seq);
FracLapResult fractional_laplacian_extension(const std::function<double(const Vec&)>& f, int dim,
                                             const Vec& x, const std::vector<double>& h_seq);

}  // namespace rcl
