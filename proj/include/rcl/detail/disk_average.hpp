#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "rcl/detail/quadrature.hpp"

namespace rcl::detail {

/// Mean of |z - u|^p over the unit disk |u| <= 1 as a function of s = |z|,
/// tabulated on [0, s_max] with a linear blend into the raw power on the
/// outer band so the profile hands over to the point kernel seamlessly.
/// Physical use: the average of the Riesz kernel over an equivalent-area
/// disk cell of radius a is a^p * profile(r / a).
class DiskAverageProfile {
public:
    static constexpr double kSMax = 8.0;
    static constexpr double kBlendStart = 6.0;

    explicit DiskAverageProfile(double p) : p_(p) {
        const int samples = 4096;
        table_.resize(samples + 1);
        for (int i = 0; i <= samples; ++i) {
            const double s = kSMax * i / samples;
            double v = exact(s);
            if (s > kBlendStart) {
                const double t = (s - kBlendStart) / (kSMax - kBlendStart);
                v = (1.0 - t) * v + t * std::pow(s, p_);
            }
            table_[i] = v;
        }
        step_ = kSMax / samples;
    }

    double operator()(double s) const {
        if (s >= kSMax) return std::pow(s, p_);
        const double u = s / step_;
        const int i = std::min(static_cast<int>(u), static_cast<int>(table_.size()) - 2);
        const double t = u - i;
        return (1.0 - t) * table_[i] + t * table_[i + 1];
    }

    double power() const { return p_; }

    /// Direct quadrature (no table). In polar form around z the kernel sees
    /// the chord angle phi(r) of the circle of radius r inside the unit disk;
    /// integrating in y = r^{p+2} absorbs the radial power exactly.
    double exact(double s) const {
        const double q = p_ + 2.0;
        const double lo = std::abs(1.0 - s);
        double total = 0.0;
        if (s < 1.0) total += 2.0 * M_PI * std::pow(lo, q) / q;  // full circles
        const auto [xs, ws] = gauss_legendre(96);
        const double y0 = std::pow(lo, q), y1 = std::pow(1.0 + s, q);
        if (s > 0.0 && y1 > y0) {
            double acc = 0.0;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double y = y0 + 0.5 * (y1 - y0) * (xs[k] + 1.0);
                const double r = std::pow(y, 1.0 / q);
                const double c = std::clamp((s * s + r * r - 1.0) / (2.0 * s * r), -1.0, 1.0);
                acc += ws[k] * 2.0 * std::acos(c);
            }
            total += acc * 0.5 * (y1 - y0) / q;
        }
        return total / M_PI;
    }

private:
    double p_;
    double step_ = 0.0;
    std::vector<double> table_;
};

/// Mean of |z - u|^p over z in the unit disk around s*e_x and u in the unit
/// disk around the origin (pair smear), tabulated on [0, s_max]. D(0) is the
/// disk-cell analogue of the pair self-interaction constant.
class DiskPairProfile {
public:
    static constexpr double kSMax = 1.6;

    explicit DiskPairProfile(const DiskAverageProfile& single) {
        const int samples = 256;
        const auto [xs, ws] = gauss_legendre(48);
        table_.resize(samples + 1);
        step_ = kSMax / samples;
        for (int i = 0; i <= samples; ++i) {
            const double s = i * step_;
            // polar average of the single-disk profile over the second disk
            double acc = 0.0;
            for (std::size_t a = 0; a < xs.size(); ++a) {
                const double rho = 0.5 * (xs[a] + 1.0);
                double ring = 0.0;
                for (std::size_t b = 0; b < xs.size(); ++b) {
                    const double th = M_PI * (xs[b] + 1.0) * 0.5;  // half disk by symmetry
                    const double d = std::sqrt(std::max(
                        0.0, s * s + rho * rho - 2.0 * s * rho * std::cos(th)));
                    ring += ws[b] * single(d);
                }
                acc += ws[a] * rho * ring;
            }
            // rho in [0,1] (scale 1/2), th in [0,pi] (scale pi/2), area pi
            table_[i] = acc * 0.5 * (M_PI / 2.0) * 2.0 / M_PI;
        }
    }

    double operator()(double s) const {
        const double u = std::min(s, kSMax) / step_;
        const int i = std::min(static_cast<int>(u), static_cast<int>(table_.size()) - 2);
        const double t = u - i;
        return (1.0 - t) * table_[i] + t * table_[i + 1];
    }

private:
    double step_ = 0.0;
    std::vector<double> table_;
};

/// Cached single+pair profiles per kernel power (deterministic tables).
struct SmearProfiles {
    DiskAverageProfile single;
    DiskPairProfile pair;
    explicit SmearProfiles(double p) : single(p), pair(single) {}
};

std::shared_ptr<const SmearProfiles> smear_profiles(double power);

}  // namespace rcl::detail
