#pragma once

#include <array>
#include <cmath>

#include "nsbox/errors.hpp"

namespace nsbox {

inline constexpr double kPi = 3.14159265358979323846;

// Direction on the Bloch sphere, (theta, phi) with the usual association
// theta in [0, pi], phi in [0, 2*pi). Out-of-range angles are canonicalized
// on construction: phi is reduced mod 2*pi, and theta is reflected back into
// [0, pi] with phi shifted by pi, which leaves the unit vector unchanged.
class BlochDirection {
  public:
    BlochDirection() : theta_(0.0), phi_(0.0) {}

    BlochDirection(double theta, double phi) {
        if (!std::isfinite(theta) || !std::isfinite(phi)) {
            throw ArgumentError("BlochDirection: angles must be finite");
        }
        double t = std::fmod(theta, 2.0 * kPi);
        if (t < 0.0) t += 2.0 * kPi;
        if (t > kPi) {
            t = 2.0 * kPi - t;
            phi += kPi;
        }
        double p = std::fmod(phi, 2.0 * kPi);
        if (p < 0.0) p += 2.0 * kPi;
        theta_ = t;
        phi_ = p;
    }

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    // (sin t cos p, sin t sin p, cos t)
    std::array<double, 3> unit_vector() const {
        const double st = std::sin(theta_);
        return {st * std::cos(phi_), st * std::sin(phi_), std::cos(theta_)};
    }

    static BlochDirection z_axis() { return {0.0, 0.0}; }
    static BlochDirection x_axis() { return {kPi / 2.0, 0.0}; }
    static BlochDirection y_axis() { return {kPi / 2.0, kPi / 2.0}; }

  private:
    double theta_;
    double phi_;
};

}  // namespace nsbox
