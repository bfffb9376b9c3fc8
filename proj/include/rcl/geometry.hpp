#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "rcl/errors.hpp"

namespace rcl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kUnitNormTol = 1e-12;

/// Unit vector on S^{N-1}; the constructor rejects anything whose Euclidean
/// norm is off by more than 1e-12.
class Direction {
public:
    explicit Direction(Vec u);

    /// Normalizes u (must be nonzero) and wraps it.
    static Direction of(Vec u);

    const Vec& vec() const { return u_; }
    int dim() const { return static_cast<int>(u_.size()); }

private:
    Vec u_;
};

enum class BodyKind { ball, ellipsoid, polytope, blend };

/// Convex body in R^N, N >= 2: ball, axis-aligned ellipsoid, polytope given
/// by vertices, or a Minkowski combination sum_i w_i K_i stored symbolically
/// as a blend. Immutable after construction; all queries are pure.
class ConvexBody {
public:
    static ConvexBody ball(Vec center, double radius);
    static ConvexBody ellipsoid(Vec center, Vec semi_axes);
    static ConvexBody polytope(std::vector<Vec> vertices);
    static ConvexBody blend(std::vector<std::pair<double, ConvexBody>> parts);

    BodyKind kind() const { return kind_; }
    int dim() const { return dim_; }

    /// True when the affine hull has dimension < N (segment in R^2, flat
    /// polytope in R^3, radius-0 ball, ...). Degenerate bodies are legal
    /// geometry but are rejected by the capacity pipeline.
    bool degenerate() const { return degenerate_; }

    /// sup_{x in K} <x, nu> for unit nu (not re-checked here; use
    /// support_function for the checked entry point).
    double support(const Vec& unit_nu) const;

    /// A maximizer of <x, nu> over K. Ties (polytope facet normals) resolve
    /// to the lowest-index vertex; blends add component maximizers.
    Vec support_point(const Vec& unit_nu) const;

    ConvexBody translated(const Vec& t) const;
    ConvexBody scaled(double factor) const;  // about the origin, factor > 0

    /// Axis-aligned bounding box from support values: [-h(-e_i), h(e_i)].
    Vec bbox_min() const;
    Vec bbox_max() const;

    /// Max width h(nu) + h(-nu) over sampled directions (exact for balls).
    double diameter(int directions = 512) const;

    /// If the body is a ball or a blend of balls, returns {center, radius}.
    bool as_ball(Vec& center, double& radius) const;

    // Kind-specific accessors; throw invalid_argument_error on kind mismatch.
    const Vec& center() const;
    double radius() const;
    const Vec& semi_axes() const;
    const std::vector<Vec>& vertices() const;
    const std::vector<std::pair<double, std::shared_ptr<const ConvexBody>>>& parts() const;

    /// Body specification JSON, e.g.
    ///   {"dim":2,"kind":"ball","center":[0,0],"radius":1}
    ///   {"dim":2,"kind":"blend","components":[{"weight":0.5,"body":{...}},...]}
    static ConvexBody from_json(const nlohmann::json& spec);
    nlohmann::json to_json() const;

private:
    ConvexBody() = default;

    BodyKind kind_ = BodyKind::ball;
    int dim_ = 0;
    bool degenerate_ = false;

    Vec center_;      // ball, ellipsoid
    double radius_ = 0.0;
    Vec semi_axes_;   // ellipsoid
    std::vector<Vec> vertices_;  // polytope
    std::vector<std::pair<double, std::shared_ptr<const ConvexBody>>> parts_;  // blend

    void compute_degenerate();
};

/// Weighted sample of a body: quadrature nodes with positive weights.
/// Boundary mode weights carry units of length^{N-1}, interior mode
/// length^N; totals approximate surface area resp. volume.
struct PointCloud {
    enum class Mode { boundary, interior };

    PointCloud(Mat points, Vec weights, Mode mode);

    Mat points;   // n x N, one sample per row
    Vec weights;  // n, all > 0
    Mode mode;

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
    double total_weight() const { return weights.sum(); }
    double diameter() const;  // max pairwise distance
    Vec centroid() const;     // weight-averaged
};

double support_function(const ConvexBody& body, const Direction& nu);

/// lambda*K1 + (1-lambda)*K0 as a symbolic blend; support functions combine
/// linearly, so no hull reconstruction happens.
ConvexBody minkowski_interpolate(const ConvexBody& k0, const ConvexBody& k1, double lambda);

/// 2/|S^{N-1}| * integral of the support function over the unit sphere.
/// quadrature_order >= 8: nodes of the trapezoidal rule in N=2, polar
/// Gauss-Legendre x azimuthal trapezoid in N=3.
double mean_width(const ConvexBody& body, int quadrature_order);

double perimeter_2d(const ConvexBody& body);

/// Max over sampled unit directions of |h_K - h_L|; converges to the exact
/// Hausdorff distance from below under direction refinement.
double hausdorff_distance(const ConvexBody& k, const ConvexBody& l, int directions);

PointCloud sample_points(const ConvexBody& body, PointCloud::Mode mode, int resolution);

/// Quasi-uniform unit directions: equispaced angles in N=2, Fibonacci
/// spiral in N=3.
std::vector<Vec> unit_directions(int dim, int count);

/// Inscribed polygon traced by the support map over a dense angle sweep
/// (N=2). Used for boundary resampling, areas, and point membership.
class SupportPolygon {
public:
    SupportPolygon(const ConvexBody& body, int sweep = 4096);

    double area() const;       // shoelace
    double length() const;     // boundary length
    bool contains(const Vec& p) const;
    PointCloud resample_boundary(int count) const;

    const std::vector<Eigen::Vector2d>& ring() const { return ring_; }

private:
    std::vector<Eigen::Vector2d> ring_;  // ccw, deduplicated
};

}  // namespace rcl
