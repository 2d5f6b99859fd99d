#include "vesselfuse/geo.hpp"

#include <cmath>
#include <stdexcept>

namespace vesselfuse::geo {

double normalize_lon(double lon_deg) {
    double l = std::fmod(lon_deg, 360.0);
    if (l > 180.0) l -= 360.0;
    if (l < -180.0) l += 360.0;
    return l;
}

double normalize_course(double course_deg) {
    double c = std::fmod(course_deg, 360.0);
    if (c < 0.0) c += 360.0;
    return c;
}

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lon) && std::isfinite(p.lat) &&
           p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

GeoPoint forward_geodetic(const GeoPoint& origin, double course_deg, double distance_m) {
    if (!std::isfinite(course_deg) || !std::isfinite(distance_m) || !is_valid(origin)) {
        throw std::invalid_argument("forward_geodetic: non-finite or out-of-range input");
    }
    if (distance_m < 0.0) {
        throw std::invalid_argument("forward_geodetic: negative distance");
    }
    if (distance_m == 0.0) {
        return origin;
    }

    const double alpha1 = normalize_course(course_deg) * kDegToRad;
    const double phi1 = origin.lat * kDegToRad;
    const double s = distance_m;

    const double sin_alpha1 = std::sin(alpha1);
    const double cos_alpha1 = std::cos(alpha1);

    const double tan_u1 = (1.0 - kWgs84F) * std::tan(phi1);
    const double cos_u1 = 1.0 / std::sqrt(1.0 + tan_u1 * tan_u1);
    const double sin_u1 = tan_u1 * cos_u1;

    const double sigma1 = std::atan2(tan_u1, cos_alpha1);
    const double sin_alpha = cos_u1 * sin_alpha1;
    const double cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
    const double u_sq = cos_sq_alpha * (kWgs84A * kWgs84A - kWgs84B * kWgs84B) / (kWgs84B * kWgs84B);

    const double a_coef =
        1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
    const double b_coef = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));

    double sigma = s / (kWgs84B * a_coef);
    double cos_2sigma_m = 0.0;
    double sin_sigma = 0.0;
    double cos_sigma = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
        cos_2sigma_m = std::cos(2.0 * sigma1 + sigma);
        sin_sigma = std::sin(sigma);
        cos_sigma = std::cos(sigma);
        const double delta_sigma =
            b_coef * sin_sigma *
            (cos_2sigma_m +
             b_coef / 4.0 *
                 (cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m) -
                  b_coef / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma * sin_sigma) *
                      (-3.0 + 4.0 * cos_2sigma_m * cos_2sigma_m)));
        const double sigma_next = s / (kWgs84B * a_coef) + delta_sigma;
        if (std::abs(sigma_next - sigma) < 1e-15) {
            sigma = sigma_next;
            break;
        }
        sigma = sigma_next;
    }
    cos_2sigma_m = std::cos(2.0 * sigma1 + sigma);
    sin_sigma = std::sin(sigma);
    cos_sigma = std::cos(sigma);

    const double tmp = sin_u1 * sin_sigma - cos_u1 * cos_sigma * cos_alpha1;
    const double phi2 = std::atan2(sin_u1 * cos_sigma + cos_u1 * sin_sigma * cos_alpha1,
                                   (1.0 - kWgs84F) * std::sqrt(sin_alpha * sin_alpha + tmp * tmp));
    const double lambda = std::atan2(sin_sigma * sin_alpha1,
                                     cos_u1 * cos_sigma - sin_u1 * sin_sigma * cos_alpha1);
    const double c_coef =
        kWgs84F / 16.0 * cos_sq_alpha * (4.0 + kWgs84F * (4.0 - 3.0 * cos_sq_alpha));
    const double l =
        lambda - (1.0 - c_coef) * kWgs84F * sin_alpha *
                     (sigma + c_coef * sin_sigma *
                                  (cos_2sigma_m +
                                   c_coef * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));

    return GeoPoint{normalize_lon(origin.lon + l * kRadToDeg), phi2 * kRadToDeg};
}

CourseDistance inverse_geodetic(const GeoPoint& a, const GeoPoint& b) {
    if (!is_valid(a) || !is_valid(b)) {
        throw std::invalid_argument("inverse_geodetic: out-of-range input");
    }
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double l_total = normalize_lon(b.lon - a.lon) * kDegToRad;

    const double tan_u1 = (1.0 - kWgs84F) * std::tan(phi1);
    const double cos_u1 = 1.0 / std::sqrt(1.0 + tan_u1 * tan_u1);
    const double sin_u1 = tan_u1 * cos_u1;
    const double tan_u2 = (1.0 - kWgs84F) * std::tan(phi2);
    const double cos_u2 = 1.0 / std::sqrt(1.0 + tan_u2 * tan_u2);
    const double sin_u2 = tan_u2 * cos_u2;

    double lambda = l_total;
    double sin_sigma = 0.0, cos_sigma = 1.0, sigma = 0.0;
    double cos_sq_alpha = 1.0, cos_2sigma_m = 0.0;
    double sin_lambda = 0.0, cos_lambda = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        sin_lambda = std::sin(lambda);
        cos_lambda = std::cos(lambda);
        const double t1 = cos_u2 * sin_lambda;
        const double t2 = cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda;
        sin_sigma = std::sqrt(t1 * t1 + t2 * t2);
        if (sin_sigma == 0.0) {
            return CourseDistance{0.0, 0.0}; // coincident points
        }
        cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
        sigma = std::atan2(sin_sigma, cos_sigma);
        const double sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
        cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
        cos_2sigma_m = (cos_sq_alpha != 0.0)
                           ? cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
                           : 0.0; // equatorial line
        const double c_coef =
            kWgs84F / 16.0 * cos_sq_alpha * (4.0 + kWgs84F * (4.0 - 3.0 * cos_sq_alpha));
        const double lambda_next =
            l_total + (1.0 - c_coef) * kWgs84F * sin_alpha *
                          (sigma + c_coef * sin_sigma *
                                       (cos_2sigma_m + c_coef * cos_sigma *
                                                           (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        if (std::abs(lambda_next - lambda) < 1e-14) {
            lambda = lambda_next;
            break;
        }
        lambda = lambda_next;
    }

    const double u_sq = cos_sq_alpha * (kWgs84A * kWgs84A - kWgs84B * kWgs84B) / (kWgs84B * kWgs84B);
    const double a_coef =
        1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
    const double b_coef = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
    const double delta_sigma =
        b_coef * sin_sigma *
        (cos_2sigma_m + b_coef / 4.0 *
                            (cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m) -
                             b_coef / 6.0 * cos_2sigma_m * (-3.0 + 4.0 * sin_sigma * sin_sigma) *
                                 (-3.0 + 4.0 * cos_2sigma_m * cos_2sigma_m)));
    const double distance = kWgs84B * a_coef * (sigma - delta_sigma);
    const double course = std::atan2(cos_u2 * std::sin(lambda),
                                     cos_u1 * sin_u2 - sin_u1 * cos_u2 * std::cos(lambda));
    return CourseDistance{normalize_course(course * kRadToDeg), distance};
}

double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
    return inverse_geodetic(a, b).distance_m;
}

EastNorth mercator(const GeoPoint& p, const GeoPoint& origin) {
    if (std::abs(p.lat) >= kMercatorLatLimit || std::abs(origin.lat) >= kMercatorLatLimit) {
        throw domain_error("mercator: latitude beyond projection margin");
    }
    const auto northing = [](double lat_deg) {
        return kMercatorRadius * std::log(std::tan(M_PI / 4.0 + lat_deg * kDegToRad / 2.0));
    };
    return EastNorth{
        kMercatorRadius * normalize_lon(p.lon - origin.lon) * kDegToRad,
        northing(p.lat) - northing(origin.lat),
    };
}

GeoPoint mercator_inverse(const EastNorth& en, const GeoPoint& origin) {
    const double northing0 =
        kMercatorRadius * std::log(std::tan(M_PI / 4.0 + origin.lat * kDegToRad / 2.0));
    const double lat =
        (2.0 * std::atan(std::exp((en.north + northing0) / kMercatorRadius)) - M_PI / 2.0) * kRadToDeg;
    const double lon = normalize_lon(origin.lon + en.east / kMercatorRadius * kRadToDeg);
    return GeoPoint{lon, lat};
}

PixelPoint project_to_pixel(const WorldPoint& w, const CameraModel& cam) {
    const Eigen::Vector4d homog(w.u, w.v, w.w, 1.0);
    const Eigen::Vector3d proj = cam.k_in * (cam.k_ex * homog);
    if (!(proj.z() > 0.0)) {
        throw behind_camera_error("project_to_pixel: point behind camera (Z <= 0)");
    }
    return PixelPoint{proj.x() / proj.z(), proj.y() / proj.z()};
}

PixelPoint geo_to_pixel(const GeoPoint& p, const CameraModel& cam) {
    const EastNorth en = mercator(p, cam.mercator_origin);
    return project_to_pixel(WorldPoint{en.east, -cam.camera_height_m, en.north}, cam);
}

} // namespace vesselfuse::geo
