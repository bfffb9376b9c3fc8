#include "rcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "rcl/detail/quadrature.hpp"

namespace rcl {

namespace {

std::string dim_mismatch(int a, int b) {
    std::ostringstream os;
    os << "dimension mismatch: " << a << " vs " << b;
    return os.str();
}

void check_dim(int n) {
    if (n < 2) throw invalid_argument_error("convex bodies require dimension N >= 2");
}

/// Golden-angle spiral on S^2.
std::vector<Vec> fibonacci_sphere(int count) {
    std::vector<Vec> out;
    out.reserve(count);
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = ga * k;
        Vec u(3);
        u << r * std::cos(phi), r * std::sin(phi), z;
        out.push_back(std::move(u));
    }
    return out;
}

std::vector<Eigen::Vector2d> convex_hull_2d(const std::vector<Vec>& pts) {
    std::vector<Eigen::Vector2d> p;
    p.reserve(pts.size());
    for (const auto& v : pts) p.emplace_back(v(0), v(1));
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    p.erase(std::unique(p.begin(), p.end(),
                        [](const auto& a, const auto& b) { return a == b; }),
            p.end());
    const int n = static_cast<int>(p.size());
    if (n <= 2) return p;
    auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    std::vector<Eigen::Vector2d> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// Direction

Direction::Direction(Vec u) : u_(std::move(u)) {
    if (u_.size() < 2) throw invalid_argument_error("direction needs dimension >= 2");
    if (std::abs(u_.norm() - 1.0) > kUnitNormTol)
        throw invalid_argument_error("direction is not unit-norm within 1e-12");
}

Direction Direction::of(Vec u) {
    const double n = u.norm();
    if (n == 0.0) throw invalid_argument_error("cannot normalize the zero vector");
    return Direction(u / n);
}

// ---------------------------------------------------------------------------
// ConvexBody

ConvexBody ConvexBody::ball(Vec center, double radius) {
    check_dim(static_cast<int>(center.size()));
    if (radius < 0.0) throw invalid_argument_error("ball radius must be >= 0");
    ConvexBody b;
    b.kind_ = BodyKind::ball;
    b.dim_ = static_cast<int>(center.size());
    b.center_ = std::move(center);
    b.radius_ = radius;
    b.compute_degenerate();
    return b;
}

ConvexBody ConvexBody::ellipsoid(Vec center, Vec semi_axes) {
    check_dim(static_cast<int>(center.size()));
    if (semi_axes.size() != center.size())
        throw invalid_argument_error("ellipsoid semi-axes count must match dimension");
    if ((semi_axes.array() < 0.0).any())
        throw invalid_argument_error("ellipsoid semi-axes must be >= 0");
    ConvexBody b;
    b.kind_ = BodyKind::ellipsoid;
    b.dim_ = static_cast<int>(center.size());
    b.center_ = std::move(center);
    b.semi_axes_ = std::move(semi_axes);
    b.compute_degenerate();
    return b;
}

ConvexBody ConvexBody::polytope(std::vector<Vec> vertices) {
    if (vertices.empty()) throw invalid_argument_error("polytope vertex list is empty");
    const int n = static_cast<int>(vertices.front().size());
    check_dim(n);
    for (const auto& v : vertices)
        if (v.size() != n) throw invalid_argument_error("polytope vertices have mixed dimensions");
    ConvexBody b;
    b.kind_ = BodyKind::polytope;
    b.dim_ = n;
    b.vertices_ = std::move(vertices);
    b.compute_degenerate();
    return b;
}

ConvexBody ConvexBody::blend(std::vector<std::pair<double, ConvexBody>> parts) {
    if (parts.empty()) throw invalid_argument_error("blend needs at least one component");
    const int n = parts.front().second.dim();
    double wsum = 0.0;
    for (const auto& [w, body] : parts) {
        if (w < 0.0) throw invalid_argument_error("blend weights must be >= 0");
        if (body.dim() != n) throw invalid_argument_error(dim_mismatch(body.dim(), n));
        wsum += w;
    }
    if (wsum <= 0.0) throw invalid_argument_error("blend needs at least one positive weight");
    ConvexBody b;
    b.kind_ = BodyKind::blend;
    b.dim_ = n;
    for (auto& [w, body] : parts)
        b.parts_.emplace_back(w, std::make_shared<const ConvexBody>(std::move(body)));
    b.compute_degenerate();
    return b;
}

void ConvexBody::compute_degenerate() {
    // Rank of the affine-hull span: columns are spanning directions.
    std::vector<Vec> span;
    std::function<void(const ConvexBody&, double)> collect = [&](const ConvexBody& b, double w) {
        if (w <= 0.0) return;
        switch (b.kind_) {
            case BodyKind::ball:
                if (b.radius_ > 0.0)
                    for (int i = 0; i < b.dim_; ++i) span.push_back(Vec::Unit(b.dim_, i));
                break;
            case BodyKind::ellipsoid:
                for (int i = 0; i < b.dim_; ++i)
                    if (b.semi_axes_(i) > 0.0) span.push_back(Vec::Unit(b.dim_, i));
                break;
            case BodyKind::polytope:
                for (std::size_t i = 1; i < b.vertices_.size(); ++i)
                    span.push_back(b.vertices_[i] - b.vertices_[0]);
                break;
            case BodyKind::blend:
                for (const auto& [cw, child] : b.parts_) collect(*child, cw);
                break;
        }
    };
    collect(*this, 1.0);
    if (span.empty()) {
        degenerate_ = true;
        return;
    }
    Mat m(dim_, static_cast<int>(span.size()));
    for (std::size_t j = 0; j < span.size(); ++j) m.col(static_cast<int>(j)) = span[j];
    Eigen::ColPivHouseholderQR<Mat> qr(m);
    qr.setThreshold(1e-12);
    degenerate_ = qr.rank() < dim_;
}

double ConvexBody::support(const Vec& nu) const {
    switch (kind_) {
        case BodyKind::ball:
            return center_.dot(nu) + radius_;
        case BodyKind::ellipsoid:
            return center_.dot(nu) + (semi_axes_.array() * nu.array()).matrix().norm();
        case BodyKind::polytope: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& v : vertices_) best = std::max(best, v.dot(nu));
            return best;
        }
        case BodyKind::blend: {
            double s = 0.0;
            for (const auto& [w, child] : parts_)
                if (w != 0.0) s += w * child->support(nu);
            return s;
        }
    }
    return 0.0;
}

Vec ConvexBody::support_point(const Vec& nu) const {
    switch (kind_) {
        case BodyKind::ball:
            return center_ + radius_ * nu;
        case BodyKind::ellipsoid: {
            const Vec an = (semi_axes_.array() * nu.array()).matrix();
            const double norm = an.norm();
            if (norm == 0.0) return center_;
            return center_ + (semi_axes_.array() * an.array()).matrix() / norm;
        }
        case BodyKind::polytope: {
            double best = -std::numeric_limits<double>::infinity();
            std::size_t idx = 0;
            for (std::size_t i = 0; i < vertices_.size(); ++i) {
                const double s = vertices_[i].dot(nu);
                if (s > best) {
                    best = s;
                    idx = i;
                }
            }
            return vertices_[idx];
        }
        case BodyKind::blend: {
            Vec p = Vec::Zero(dim_);
            for (const auto& [w, child] : parts_)
                if (w != 0.0) p += w * child->support_point(nu);
            return p;
        }
    }
    return Vec::Zero(dim_);
}

ConvexBody ConvexBody::translated(const Vec& t) const {
    if (t.size() != dim_) throw invalid_argument_error(dim_mismatch(static_cast<int>(t.size()), dim_));
    ConvexBody b = *this;
    switch (kind_) {
        case BodyKind::ball:
        case BodyKind::ellipsoid:
            b.center_ = center_ + t;
            break;
        case BodyKind::polytope:
            for (auto& v : b.vertices_) v += t;
            break;
        case BodyKind::blend: {
            // sum_i w_i (K_i + t/W) = (sum_i w_i K_i) + t
            double wsum = 0.0;
            for (const auto& [w, child] : parts_) wsum += w;
            const Vec shift = t / wsum;
            b.parts_.clear();
            for (const auto& [w, child] : parts_)
                b.parts_.emplace_back(w, std::make_shared<const ConvexBody>(child->translated(shift)));
            break;
        }
    }
    return b;
}

ConvexBody ConvexBody::scaled(double factor) const {
    if (!(factor > 0.0)) throw invalid_argument_error("scale factor must be > 0");
    ConvexBody b = *this;
    switch (kind_) {
        case BodyKind::ball:
            b.center_ = factor * center_;
            b.radius_ = factor * radius_;
            break;
        case BodyKind::ellipsoid:
            b.center_ = factor * center_;
            b.semi_axes_ = factor * semi_axes_;
            break;
        case BodyKind::polytope:
            for (auto& v : b.vertices_) v *= factor;
            break;
        case BodyKind::blend:
            for (auto& [w, child] : b.parts_) w *= factor;
            break;
    }
    return b;
}

Vec ConvexBody::bbox_min() const {
    Vec lo(dim_);
    for (int i = 0; i < dim_; ++i) lo(i) = -support(-Vec::Unit(dim_, i));
    return lo;
}

Vec ConvexBody::bbox_max() const {
    Vec hi(dim_);
    for (int i = 0; i < dim_; ++i) hi(i) = support(Vec::Unit(dim_, i));
    return hi;
}

double ConvexBody::diameter(int directions) const {
    double best = 0.0;
    for (const auto& nu : unit_directions(dim_, directions))
        best = std::max(best, support(nu) + support(-nu));
    return best;
}

bool ConvexBody::as_ball(Vec& center, double& radius) const {
    switch (kind_) {
        case BodyKind::ball:
            center = center_;
            radius = radius_;
            return true;
        case BodyKind::ellipsoid: {
            const double a0 = semi_axes_(0);
            if ((semi_axes_.array() == a0).all()) {
                center = center_;
                radius = a0;
                return true;
            }
            return false;
        }
        case BodyKind::blend: {
            Vec c = Vec::Zero(dim_);
            double r = 0.0;
            for (const auto& [w, child] : parts_) {
                if (w == 0.0) continue;
                Vec cc;
                double cr;
                if (!child->as_ball(cc, cr)) return false;
                c += w * cc;
                r += w * cr;
            }
            center = std::move(c);
            radius = r;
            return true;
        }
        default:
            return false;
    }
}

const Vec& ConvexBody::center() const {
    if (kind_ != BodyKind::ball && kind_ != BodyKind::ellipsoid)
        throw invalid_argument_error("center(): body is not a ball/ellipsoid");
    return center_;
}

double ConvexBody::radius() const {
    if (kind_ != BodyKind::ball) throw invalid_argument_error("radius(): body is not a ball");
    return radius_;
}

const Vec& ConvexBody::semi_axes() const {
    if (kind_ != BodyKind::ellipsoid) throw invalid_argument_error("semi_axes(): body is not an ellipsoid");
    return semi_axes_;
}

const std::vector<Vec>& ConvexBody::vertices() const {
    if (kind_ != BodyKind::polytope) throw invalid_argument_error("vertices(): body is not a polytope");
    return vertices_;
}

const std::vector<std::pair<double, std::shared_ptr<const ConvexBody>>>& ConvexBody::parts() const {
    if (kind_ != BodyKind::blend) throw invalid_argument_error("parts(): body is not a blend");
    return parts_;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec parse_vec(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array() || j.empty())
        throw config_error("body spec: field '" + field + "' must be a nonempty array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw config_error("body spec: field '" + field + "' must be numeric");
        v(static_cast<int>(i)) = j[i].get<double>();
    }
    return v;
}

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& field) {
    auto it = j.find(field);
    if (it == j.end()) throw config_error("body spec: missing field '" + field + "'");
    return *it;
}

}  // namespace

ConvexBody ConvexBody::from_json(const nlohmann::json& spec) {
    if (!spec.is_object()) throw config_error("body spec: expected a JSON object");
    const auto& jd = require_field(spec, "dim");
    if (!jd.is_number_integer()) throw config_error("body spec: field 'dim' must be an integer");
    const int dim = jd.get<int>();
    if (dim < 2) throw config_error("body spec: field 'dim' must be >= 2");
    const auto& jk = require_field(spec, "kind");
    if (!jk.is_string()) throw config_error("body spec: field 'kind' must be a string");
    const std::string kind = jk.get<std::string>();

    auto check_len = [&](const Vec& v, const std::string& field) {
        if (v.size() != dim)
            throw config_error("body spec: field '" + field + "' has length " +
                               std::to_string(v.size()) + ", expected dim = " + std::to_string(dim));
    };

    if (kind == "ball") {
        Vec c = parse_vec(require_field(spec, "center"), "center");
        check_len(c, "center");
        const auto& jr = require_field(spec, "radius");
        if (!jr.is_number()) throw config_error("body spec: field 'radius' must be numeric");
        return ball(std::move(c), jr.get<double>());
    }
    if (kind == "ellipsoid") {
        Vec c = parse_vec(require_field(spec, "center"), "center");
        check_len(c, "center");
        Vec a = parse_vec(require_field(spec, "semi_axes"), "semi_axes");
        check_len(a, "semi_axes");
        return ellipsoid(std::move(c), std::move(a));
    }
    if (kind == "polytope") {
        const auto& jv = require_field(spec, "vertices");
        if (!jv.is_array() || jv.empty())
            throw config_error("body spec: field 'vertices' must be a nonempty array");
        std::vector<Vec> verts;
        verts.reserve(jv.size());
        for (const auto& row : jv) {
            Vec v = parse_vec(row, "vertices");
            check_len(v, "vertices");
            verts.push_back(std::move(v));
        }
        return polytope(std::move(verts));
    }
    if (kind == "blend") {
        const auto& jc = require_field(spec, "components");
        if (!jc.is_array() || jc.empty())
            throw config_error("body spec: field 'components' must be a nonempty array");
        std::vector<std::pair<double, ConvexBody>> parts;
        parts.reserve(jc.size());
        for (const auto& comp : jc) {
            const auto& jw = require_field(comp, "weight");
            if (!jw.is_number()) throw config_error("body spec: field 'weight' must be numeric");
            ConvexBody child = from_json(require_field(comp, "body"));
            if (child.dim() != dim)
                throw config_error("body spec: blend component dim differs from parent 'dim'");
            parts.emplace_back(jw.get<double>(), std::move(child));
        }
        return blend(std::move(parts));
    }
    throw config_error("body spec: unknown kind '" + kind +
                       "' (expected ball|ellipsoid|polytope|blend)");
}

nlohmann::json ConvexBody::to_json() const {
    nlohmann::json j;
    j["dim"] = dim_;
    auto vec_to_json = [](const Vec& v) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
        return a;
    };
    switch (kind_) {
        case BodyKind::ball:
            j["kind"] = "ball";
            j["center"] = vec_to_json(center_);
            j["radius"] = radius_;
            break;
        case BodyKind::ellipsoid:
            j["kind"] = "ellipsoid";
            j["center"] = vec_to_json(center_);
            j["semi_axes"] = vec_to_json(semi_axes_);
            break;
        case BodyKind::polytope: {
            j["kind"] = "polytope";
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& v : vertices_) rows.push_back(vec_to_json(v));
            j["vertices"] = rows;
            break;
        }
        case BodyKind::blend: {
            j["kind"] = "blend";
            nlohmann::json comps = nlohmann::json::array();
            for (const auto& [w, child] : parts_) {
                nlohmann::json c;
                c["weight"] = w;
                c["body"] = child->to_json();
                comps.push_back(std::move(c));
            }
            j["components"] = comps;
            break;
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// PointCloud

PointCloud::PointCloud(Mat pts, Vec w, Mode m) : points(std::move(pts)), weights(std::move(w)), mode(m) {
    if (points.rows() == 0) throw invalid_argument_error("point cloud is empty");
    if (points.rows() != weights.size())
        throw invalid_argument_error("point cloud: points/weights length mismatch");
    if (!(weights.array() > 0.0).all())
        throw invalid_argument_error("point cloud: weights must be > 0");
}

double PointCloud::diameter() const {
    const int n = size();
    double best = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            best = std::max(best, (points.row(i) - points.row(j)).norm());
    return best;
}

Vec PointCloud::centroid() const {
    Vec c = Vec::Zero(dim());
    for (int i = 0; i < size(); ++i) c += weights(i) * points.row(i).transpose();
    return c / weights.sum();
}

// ---------------------------------------------------------------------------
// Free operations

double support_function(const ConvexBody& body, const Direction& nu) {
    if (nu.dim() != body.dim())
        throw invalid_argument_error(dim_mismatch(nu.dim(), body.dim()));
    return body.support(nu.vec());
}

ConvexBody minkowski_interpolate(const ConvexBody& k0, const ConvexBody& k1, double lambda) {
    if (k0.dim() != k1.dim()) throw invalid_argument_error(dim_mismatch(k0.dim(), k1.dim()));
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw invalid_argument_error("minkowski_interpolate: lambda must lie in [0, 1]");
    return ConvexBody::blend({{1.0 - lambda, k0}, {lambda, k1}});
}

double mean_width(const ConvexBody& body, int quadrature_order) {
    if (quadrature_order < 8) throw invalid_argument_error("mean_width: quadrature_order must be >= 8");
    const int n = body.dim();
    if (n == 2) {
        double sum = 0.0;
        for (int k = 0; k < quadrature_order; ++k) {
            const double th = 2.0 * M_PI * k / quadrature_order;
            Vec nu(2);
            nu << std::cos(th), std::sin(th);
            sum += body.support(nu);
        }
        return 2.0 * sum / quadrature_order;
    }
    if (n == 3) {
        const auto [z, w] = detail::gauss_legendre(quadrature_order);
        const int nphi = 2 * quadrature_order;
        double acc = 0.0;
        for (int i = 0; i < quadrature_order; ++i) {
            const double rho = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
            double ring = 0.0;
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * M_PI * j / nphi;
                Vec nu(3);
                nu << rho * std::cos(phi), rho * std::sin(phi), z[i];
                ring += body.support(nu);
            }
            acc += w[i] * ring;
        }
        return acc / nphi;
    }
    throw unsupported_dimension_error("mean_width: implemented for N = 2 and N = 3");
}

double perimeter_2d(const ConvexBody& body) {
    if (body.dim() != 2) throw unsupported_dimension_error("perimeter_2d requires N = 2");
    switch (body.kind()) {
        case BodyKind::ball:
            return 2.0 * M_PI * body.radius();
        case BodyKind::polytope: {
            const auto hull = convex_hull_2d(body.vertices());
            if (hull.size() < 2) return 0.0;
            if (hull.size() == 2) return 2.0 * (hull[1] - hull[0]).norm();
            double p = 0.0;
            for (std::size_t i = 0; i < hull.size(); ++i)
                p += (hull[(i + 1) % hull.size()] - hull[i]).norm();
            return p;
        }
        case BodyKind::ellipsoid: {
            const double a = body.semi_axes()(0), b = body.semi_axes()(1);
            return 4.0 * detail::adaptive_simpson(
                             [a, b](double t) {
                                 const double s = std::sin(t), c = std::cos(t);
                                 return std::sqrt(a * a * s * s + b * b * c * c);
                             },
                             0.0, 0.5 * M_PI, 1e-13);
        }
        case BodyKind::blend: {
            // Perimeter is Minkowski-linear on convex bodies in the plane.
            double p = 0.0;
            for (const auto& [w, child] : body.parts())
                if (w != 0.0) p += w * perimeter_2d(*child);
            return p;
        }
    }
    return 0.0;
}

double hausdorff_distance(const ConvexBody& k, const ConvexBody& l, int directions) {
    if (k.dim() != l.dim()) throw invalid_argument_error(dim_mismatch(k.dim(), l.dim()));
    if (directions < 32) throw invalid_argument_error("hausdorff_distance: directions must be >= 32");
    double best = 0.0;
    for (const auto& nu : unit_directions(k.dim(), directions))
        best = std::max(best, std::abs(k.support(nu) - l.support(nu)));
    return best;
}

std::vector<Vec> unit_directions(int dim, int count) {
    if (count < 1) throw invalid_argument_error("unit_directions: count must be >= 1");
    if (dim == 2) {
        std::vector<Vec> out;
        out.reserve(count);
        for (int k = 0; k < count; ++k) {
            const double th = 2.0 * M_PI * k / count;
            Vec nu(2);
            nu << std::cos(th), std::sin(th);
            out.push_back(std::move(nu));
        }
        return out;
    }
    if (dim == 3) return fibonacci_sphere(count);
    throw unsupported_dimension_error("unit_directions: implemented for N = 2 and N = 3");
}

// ---------------------------------------------------------------------------
// SupportPolygon

SupportPolygon::SupportPolygon(const ConvexBody& body, int sweep) {
    if (body.dim() != 2) throw unsupported_dimension_error("SupportPolygon requires N = 2");
    double scale = 1.0;
    std::vector<Eigen::Vector2d> raw;
    raw.reserve(sweep);
    for (int k = 0; k < sweep; ++k) {
        const double th = 2.0 * M_PI * k / sweep;
        Vec nu(2);
        nu << std::cos(th), std::sin(th);
        const Vec p = body.support_point(nu);
        raw.emplace_back(p(0), p(1));
        scale = std::max(scale, raw.back().norm());
    }
    const double eps = 1e-13 * scale;
    for (const auto& p : raw) {
        if (ring_.empty() || (p - ring_.back()).norm() > eps) ring_.push_back(p);
    }
    while (ring_.size() > 1 && (ring_.back() - ring_.front()).norm() <= eps) ring_.pop_back();
}

double SupportPolygon::area() const {
    if (ring_.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < ring_.size(); ++i) {
        const auto& p = ring_[i];
        const auto& q = ring_[(i + 1) % ring_.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double SupportPolygon::length() const {
    if (ring_.size() < 2) return 0.0;
    double len = 0.0;
    for (std::size_t i = 0; i < ring_.size(); ++i)
        len += (ring_[(i + 1) % ring_.size()] - ring_[i]).norm();
    return len;
}

bool SupportPolygon::contains(const Vec& p) const {
    if (ring_.size() < 3) return false;
    const Eigen::Vector2d q(p(0), p(1));
    double scale = 1.0;
    for (std::size_t i = 0; i < ring_.size(); ++i) {
        const auto& a = ring_[i];
        const auto& b = ring_[(i + 1) % ring_.size()];
        scale = std::max(scale, a.squaredNorm());
        const double cr = (b.x() - a.x()) * (q.y() - a.y()) - (b.y() - a.y()) * (q.x() - a.x());
        if (cr < -1e-12 * scale) return false;
    }
    return true;
}

PointCloud SupportPolygon::resample_boundary(int count) const {
    if (ring_.size() < 2) throw degenerate_body_error("boundary resample needs a 1-dimensional boundary");
    const std::size_t m = ring_.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + (ring_[(i + 1) % m] - ring_[i]).norm();
    const double total = cum[m];
    Mat pts(count, 2);
    Vec w = Vec::Constant(count, total / count);
    std::size_t edge = 0;
    for (int k = 0; k < count; ++k) {
        const double s = (k + 0.5) * total / count;
        while (edge + 1 < m && cum[edge + 1] < s) ++edge;
        const double seg = cum[edge + 1] - cum[edge];
        const double t = seg > 0.0 ? (s - cum[edge]) / seg : 0.0;
        const Eigen::Vector2d p = ring_[edge] + t * (ring_[(edge + 1) % m] - ring_[edge]);
        pts(k, 0) = p.x();
        pts(k, 1) = p.y();
    }
    return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::boundary);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

PointCloud sample_boundary_3d(const ConvexBody& body, int resolution) {
    Vec c;
    double r;
    if (body.as_ball(c, r)) {
        const auto dirs = fibonacci_sphere(resolution);
        Mat pts(resolution, 3);
        for (int i = 0; i < resolution; ++i) pts.row(i) = (c + r * dirs[i]).transpose();
        Vec w = Vec::Constant(resolution, 4.0 * M_PI * r * r / resolution);
        return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::boundary);
    }
    if (body.kind() == BodyKind::ellipsoid) {
        const Vec& a = body.semi_axes();
        const Vec& ctr = body.center();
        const auto dirs = fibonacci_sphere(resolution);
        Mat pts(resolution, 3);
        Vec w(resolution);
        const double det = a(0) * a(1) * a(2);
        for (int i = 0; i < resolution; ++i) {
            const Vec& u = dirs[i];
            pts.row(i) = (ctr + (a.array() * u.array()).matrix()).transpose();
            const double j = det * (u.array() / a.array()).matrix().norm();
            w(i) = 4.0 * M_PI / resolution * j;
        }
        return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::boundary);
    }
    throw invalid_argument_error(
        "boundary sampling in R^3 supports balls, ellipsoids and blends of balls; "
        "general polytopes/blends are not supported");
}

bool inside_3d(const ConvexBody& body, const Vec& p, const std::vector<Vec>& test_dirs) {
    switch (body.kind()) {
        case BodyKind::ball:
            return (p - body.center()).norm() <= body.radius();
        case BodyKind::ellipsoid: {
            const Vec& a = body.semi_axes();
            double s = 0.0;
            for (int i = 0; i < 3; ++i) {
                if (a(i) == 0.0) return false;
                const double t = (p(i) - body.center()(i)) / a(i);
                s += t * t;
            }
            return s <= 1.0;
        }
        default: {
            // Circumscribed support test over a fixed direction set; slightly
            // over-inclusive near edges and corners.
            for (const auto& nu : test_dirs)
                if (p.dot(nu) > body.support(nu)) return false;
            return true;
        }
    }
}

PointCloud sample_interior_3d(const ConvexBody& body, int resolution) {
    Vec c;
    double r;
    double volume_estimate;
    if (body.as_ball(c, r)) {
        volume_estimate = 4.0 / 3.0 * M_PI * r * r * r;
    } else if (body.kind() == BodyKind::ellipsoid) {
        const Vec& a = body.semi_axes();
        volume_estimate = 4.0 / 3.0 * M_PI * a(0) * a(1) * a(2);
    } else {
        const Vec ext = body.bbox_max() - body.bbox_min();
        volume_estimate = 0.5 * ext.prod();
    }
    const double h = std::cbrt(volume_estimate / resolution);
    const Vec lo = body.bbox_min(), hi = body.bbox_max();
    std::vector<Vec> test_dirs;
    if (body.kind() != BodyKind::ball && body.kind() != BodyKind::ellipsoid)
        test_dirs = fibonacci_sphere(2048);
    std::vector<Eigen::Vector3d> kept;
    const int nx = std::max(1, static_cast<int>(std::ceil((hi(0) - lo(0)) / h)));
    const int ny = std::max(1, static_cast<int>(std::ceil((hi(1) - lo(1)) / h)));
    const int nz = std::max(1, static_cast<int>(std::ceil((hi(2) - lo(2)) / h)));
    Vec p(3);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k) {
                p << lo(0) + (i + 0.5) * h, lo(1) + (j + 0.5) * h, lo(2) + (k + 0.5) * h;
                if (inside_3d(body, p, test_dirs)) kept.emplace_back(p(0), p(1), p(2));
            }
    if (kept.empty()) throw invalid_argument_error("interior sampling produced no points; raise resolution");
    Mat pts(static_cast<int>(kept.size()), 3);
    for (std::size_t i = 0; i < kept.size(); ++i) pts.row(static_cast<int>(i)) = kept[i].transpose();
    Vec w = Vec::Constant(static_cast<int>(kept.size()), h * h * h);
    return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::interior);
}

/// Polar grid for disks: rings of equal radial thickness, cells of exact
/// annulus-sector area. Ring counts are multiples of 8, so the cloud (and
/// every field built on it) is invariant under the dihedral group D_8.
PointCloud sample_disk_interior(const Vec& c, double radius, int resolution) {
    const int rings = std::max(1, static_cast<int>(std::ceil(std::sqrt(resolution / M_PI))));
    std::vector<Eigen::Vector2d> pts;
    std::vector<double> w;
    for (int k = 0; k < rings; ++k) {
        const double r_in = radius * k / rings;
        const double r_out = radius * (k + 1) / rings;
        const double r_mid = 0.5 * (r_in + r_out);
        const int count =
            8 * std::max(1, static_cast<int>(std::lround(2.0 * M_PI * (k + 0.5) / 8.0)));
        const double cell = M_PI * (r_out * r_out - r_in * r_in) / count;
        for (int j = 0; j < count; ++j) {
            const double th = 2.0 * M_PI * (j + 0.5) / count;
            pts.emplace_back(c(0) + r_mid * std::cos(th), c(1) + r_mid * std::sin(th));
            w.push_back(cell);
        }
    }
    Mat m(static_cast<int>(pts.size()), 2);
    Vec wv(static_cast<int>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m.row(static_cast<int>(i)) = pts[i].transpose();
        wv(static_cast<int>(i)) = w[i];
    }
    return PointCloud(std::move(m), std::move(wv), PointCloud::Mode::interior);
}

/// Spherical shells for 3D balls: exact shell-volume weights, Fibonacci
/// points per shell.
PointCloud sample_ball_interior_3d(const Vec& c, double radius, int resolution) {
    const double h = std::cbrt(4.0 / 3.0 * M_PI * radius * radius * radius / resolution);
    const int shells = std::max(1, static_cast<int>(std::ceil(radius / h)));
    std::vector<Eigen::Vector3d> pts;
    std::vector<double> w;
    for (int k = 0; k < shells; ++k) {
        const double r_in = radius * k / shells;
        const double r_out = radius * (k + 1) / shells;
        const double r_mid = 0.5 * (r_in + r_out);
        const double vol = 4.0 / 3.0 * M_PI * (r_out * r_out * r_out - r_in * r_in * r_in);
        const int count = std::max(4, static_cast<int>(std::lround(vol / (h * h * h))));
        const auto dirs = fibonacci_sphere(count);
        for (const auto& u : dirs) {
            pts.emplace_back(c(0) + r_mid * u(0), c(1) + r_mid * u(1), c(2) + r_mid * u(2));
            w.push_back(vol / count);
        }
    }
    Mat m(static_cast<int>(pts.size()), 3);
    Vec wv(static_cast<int>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m.row(static_cast<int>(i)) = pts[i].transpose();
        wv(static_cast<int>(i)) = w[i];
    }
    return PointCloud(std::move(m), std::move(wv), PointCloud::Mode::interior);
}

/// Clips a convex cell by one half-plane <n, x> <= c (Sutherland-Hodgman).
void clip_halfplane(std::vector<Eigen::Vector2d>& ring, const Eigen::Vector2d& n, double c) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(ring.size() + 2);
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % m];
        const double da = n.dot(a) - c, db = n.dot(b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0))
            out.push_back(a + (da / (da - db)) * (b - a));
    }
    ring = std::move(out);
}

/// Graded lattice sampler: full cells in the interior, one dyadic split on
/// the rim-adjacent ring, two on boundary-crossing cells, and exact clipped
/// areas (sampled at their centroids) where a cell meets the boundary. The
/// grading resolves the equilibrium density's boundary rise without
/// error-driven adaptivity.
class InteriorGrid {
public:
    explicit InteriorGrid(const SupportPolygon& poly) : poly_(&poly) {
        const auto& ring = poly.ring();
        const std::size_t ne = ring.size();
        edge_n_.resize(ne);
        edge_c_.resize(ne);
        for (std::size_t e = 0; e < ne; ++e) {
            const Eigen::Vector2d t = ring[(e + 1) % ne] - ring[e];
            Eigen::Vector2d n(t.y(), -t.x());
            const double norm = n.norm();
            edge_n_[e] = norm > 0.0 ? Eigen::Vector2d(n / norm) : n;
            edge_c_[e] = edge_n_[e].dot(ring[e]);
        }
    }

    bool cell_inside(double x0, double y0, double size) const {
        Vec c(2);
        for (int ci = 0; ci < 4; ++ci) {
            c << x0 + (ci & 1) * size, y0 + (ci >> 1) * size;
            if (!poly_->contains(c)) return false;
        }
        return true;
    }

    void emit(double x0, double y0, double size, int depth) {
        if (cell_inside(x0, y0, size)) {
            points.emplace_back(x0 + 0.5 * size, y0 + 0.5 * size);
            weights.push_back(size * size);
            return;
        }
        if (depth > 0) {
            const double half = 0.5 * size;
            emit(x0, y0, half, depth - 1);
            emit(x0 + half, y0, half, depth - 1);
            emit(x0, y0 + half, half, depth - 1);
            emit(x0 + half, y0 + half, half, depth - 1);
            return;
        }
        // exact clipped area, sampled at its centroid
        std::vector<Eigen::Vector2d> cell = {
            {x0, y0}, {x0 + size, y0}, {x0 + size, y0 + size}, {x0, y0 + size}};
        for (std::size_t e = 0; e < edge_n_.size() && cell.size() > 2; ++e)
            clip_halfplane(cell, edge_n_[e], edge_c_[e]);
        if (cell.size() < 3) return;
        double a2 = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t v = 0; v < cell.size(); ++v) {
            const auto& p = cell[v];
            const auto& q = cell[(v + 1) % cell.size()];
            const double cr = p.x() * q.y() - q.x() * p.y();
            a2 += cr;
            cx += (p.x() + q.x()) * cr;
            cy += (p.y() + q.y()) * cr;
        }
        const double cell_area = 0.5 * a2;
        if (cell_area <= 1e-6 * size * size) return;
        points.emplace_back(cx / (3.0 * a2), cy / (3.0 * a2));
        weights.push_back(cell_area);
    }

    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;

private:
    const SupportPolygon* poly_;
    std::vector<Eigen::Vector2d> edge_n_;
    std::vector<double> edge_c_;
};

PointCloud sample_interior_2d(const ConvexBody& body, int resolution) {
    const SupportPolygon poly(body);
    const double area = poly.area();
    if (area <= 0.0) throw degenerate_body_error("interior sampling requires positive area");
    const Vec lo = body.bbox_min(), hi = body.bbox_max();

    // polytope corners get a deeper dyadic grading (the equilibrium density
    // is most singular there); edges get two levels
    std::vector<Eigen::Vector2d> corners;
    if (body.kind() == BodyKind::polytope)
        for (const auto& v : body.vertices()) corners.emplace_back(v(0), v(1));

    auto run = [&](double h) {
        InteriorGrid grid(poly);
        const int nx = std::max(1, static_cast<int>(std::ceil((hi(0) - lo(0)) / h)));
        const int ny = std::max(1, static_cast<int>(std::ceil((hi(1) - lo(1)) / h)));
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < ny; ++j) {
                const double x0 = lo(0) + i * h, y0 = lo(1) + j * h;
                // far-interior cells (a full cell margin on every side) stay whole
                if (grid.cell_inside(x0 - h, y0 - h, 3.0 * h)) {
                    grid.points.emplace_back(x0 + 0.5 * h, y0 + 0.5 * h);
                    grid.weights.push_back(h * h);
                } else if (grid.cell_inside(x0, y0, h)) {
                    // rim-adjacent interior cell: one split to match the rim scale
                    const double half = 0.5 * h;
                    grid.emit(x0, y0, half, 0);
                    grid.emit(x0 + half, y0, half, 0);
                    grid.emit(x0, y0 + half, half, 0);
                    grid.emit(x0 + half, y0 + half, half, 0);
                } else {
                    const Eigen::Vector2d c(x0 + 0.5 * h, y0 + 0.5 * h);
                    int depth = 2;
                    for (const auto& v : corners)
                        if ((c - v).cwiseAbs().maxCoeff() <= 2.0 * h) depth = 5;
                    grid.emit(x0, y0, h, depth);
                }
            }
        return grid;
    };

    const double h = std::sqrt(area / resolution);
    InteriorGrid grid = run(h);

    if (grid.points.empty())
        throw invalid_argument_error("interior sampling produced no points; raise resolution");
    Mat pts(static_cast<int>(grid.points.size()), 2);
    Vec w(static_cast<int>(grid.points.size()));
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        pts.row(static_cast<int>(i)) = grid.points[i].transpose();
        w(static_cast<int>(i)) = grid.weights[i];
    }
    return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::interior);
}

}  // namespace

PointCloud sample_points(const ConvexBody& body, PointCloud::Mode mode, int resolution) {
    if (resolution < 4) throw invalid_argument_error("sample_points: resolution must be >= 4");
    if (mode == PointCloud::Mode::interior && body.degenerate())
        throw degenerate_body_error("interior sampling of a degenerate body");
    Vec bc;
    double br = 0.0;
    const bool is_ball = body.as_ball(bc, br);
    if (body.dim() == 2) {
        if (mode == PointCloud::Mode::boundary) {
            if (is_ball && br > 0.0) {
                Mat pts(resolution, 2);
                for (int k = 0; k < resolution; ++k) {
                    const double th = 2.0 * M_PI * (k + 0.5) / resolution;
                    pts(k, 0) = bc(0) + br * std::cos(th);
                    pts(k, 1) = bc(1) + br * std::sin(th);
                }
                Vec w = Vec::Constant(resolution, 2.0 * M_PI * br / resolution);
                return PointCloud(std::move(pts), std::move(w), PointCloud::Mode::boundary);
            }
            return SupportPolygon(body).resample_boundary(resolution);
        }
        if (is_ball) return sample_disk_interior(bc, br, resolution);
        return sample_interior_2d(body, resolution);
    }
    if (body.dim() == 3) {
        if (mode == PointCloud::Mode::boundary) return sample_boundary_3d(body, resolution);
        if (is_ball) return sample_ball_interior_3d(bc, br, resolution);
        return sample_interior_3d(body, resolution);
    }
    throw unsupported_dimension_error("sample_points: implemented for N = 2 and N = 3");
}

}  // namespace rcl
