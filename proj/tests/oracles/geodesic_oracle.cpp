#include "geodesic_oracle.hpp"

#include <cmath>

namespace geodesic_oracle {

namespace {

constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kE2 = kF * (2.0 - kF);
constexpr double kDeg = M_PI / 180.0;

struct State {
    double phi;    // latitude, radians
    double lam;    // longitude, radians
    double alpha;  // azimuth, radians
};

double meridional_radius(double phi) {
    const double s = std::sin(phi);
    const double w = 1.0 - kE2 * s * s;
    return kA * (1.0 - kE2) / (w * std::sqrt(w));
}

double prime_vertical_radius(double phi) {
    const double s = std::sin(phi);
    return kA / std::sqrt(1.0 - kE2 * s * s);
}

// Geodesic ODEs parameterized by arc length.
State derivative(const State& s) {
    const double m = meridional_radius(s.phi);
    const double n = prime_vertical_radius(s.phi);
    return State{
        std::cos(s.alpha) / m,
        std::sin(s.alpha) / (n * std::cos(s.phi)),
        std::sin(s.alpha) * std::tan(s.phi) / n,
    };
}

State advance(const State& s, const State& d, double h) {
    return State{s.phi + h * d.phi, s.lam + h * d.lam, s.alpha + h * d.alpha};
}

double wrap_lon(double rad) {
    while (rad > M_PI) rad -= 2.0 * M_PI;
    while (rad < -M_PI) rad += 2.0 * M_PI;
    return rad;
}

} // namespace

Geo direct(const Geo& start, double course_deg, double distance_m, int steps) {
    State s{start.lat_deg * kDeg, start.lon_deg * kDeg, course_deg * kDeg};
    const double h = distance_m / steps;
    for (int i = 0; i < steps; ++i) {
        const State k1 = derivative(s);
        const State k2 = derivative(advance(s, k1, h / 2.0));
        const State k3 = derivative(advance(s, k2, h / 2.0));
        const State k4 = derivative(advance(s, k3, h));
        s.phi += h / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi);
        s.lam += h / 6.0 * (k1.lam + 2.0 * k2.lam + 2.0 * k3.lam + k4.lam);
        s.alpha += h / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    }
    return Geo{wrap_lon(s.lam) / kDeg, s.phi / kDeg};
}

CourseDistance inverse(const Geo& a, const Geo& b) {
    const double phi_a = a.lat_deg * kDeg;
    const double m = meridional_radius(phi_a);
    const double n = prime_vertical_radius(phi_a);

    // Local east/north residual of a candidate (course, distance) endpoint.
    const auto residual = [&](const Geo& p) {
        const double east = wrap_lon((b.lon_deg - p.lon_deg) * kDeg) * n * std::cos(phi_a);
        const double north = (b.lat_deg - p.lat_deg) * kDeg * m;
        return std::pair<double, double>{east, north};
    };

    auto [east0, north0] = residual(a);
    double alpha = std::atan2(east0, north0);
    double dist = std::hypot(east0, north0);
    if (dist == 0.0) return CourseDistance{0.0, 0.0};

    for (int iter = 0; iter < 50; ++iter) {
        const Geo endpoint = direct(a, alpha / kDeg, dist);
        auto [re, rn] = residual(endpoint);
        if (std::hypot(re, rn) < 1e-10) break;
        // Along-track error stretches the distance, cross-track turns the course.
        const double along = std::cos(alpha) * rn + std::sin(alpha) * re;
        const double cross = -std::sin(alpha) * rn + std::cos(alpha) * re;
        dist += along;
        alpha += cross / std::max(dist, 1e-9);
    }
    double course = alpha / kDeg;
    course = std::fmod(course, 360.0);
    if (course < 0.0) course += 360.0;
    return CourseDistance{course, dist};
}

} // namespace geodesic_oracle
