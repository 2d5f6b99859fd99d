#pragma once

#include <Eigen/Dense>

#include "vesselfuse/errors.hpp"

namespace vesselfuse::geo {

// WGS-84 ellipsoid.
inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84F = 1.0 / 298.257223563;
inline constexpr double kWgs84B = kWgs84A * (1.0 - kWgs84F);

// Spherical-Mercator radius (equatorial).
inline constexpr double kMercatorRadius = 6378137.0;
// Latitudes beyond this are inside the Mercator singularity margin.
inline constexpr double kMercatorLatLimit = 85.05;

inline constexpr double kDegToRad = M_PI / 180.0;
inline constexpr double kRadToDeg = 180.0 / M_PI;

struct GeoPoint {
    double lon = 0.0; // degrees, [-180, 180]
    double lat = 0.0; // degrees, [-90, 90]
};

struct WorldPoint {
    double u = 0.0; // meters east
    double v = 0.0; // meters (vertical per camera convention)
    double w = 0.0; // meters along the optical-depth axis
};

struct PixelPoint {
    double x = 0.0; // column
    double y = 0.0; // row
};

// Pinhole camera over a local Mercator plane. World frame convention:
// U = east offset from mercator_origin, V = -camera_height_m (vessels ride
// the water plane), W = north offset. k_ex defaults to [I|0].
struct CameraModel {
    Eigen::Matrix3d k_in = Eigen::Matrix3d::Identity();
    Eigen::Matrix<double, 3, 4> k_ex = Eigen::Matrix<double, 3, 4>::Identity();
    int image_width = 0;
    int image_height = 0;
    GeoPoint camera_geo;
    GeoPoint mercator_origin;
    double camera_height_m = 0.0;
};

double normalize_lon(double lon_deg);
double normalize_course(double course_deg);
bool is_valid(const GeoPoint& p);

// Direct geodesic problem on WGS-84 (Vincenty series). course in degrees
// clockwise from north, distance in meters.
GeoPoint forward_geodetic(const GeoPoint& origin, double course_deg, double distance_m);

// Inverse geodesic problem: course from a to b (degrees) and distance (meters).
struct CourseDistance {
    double course_deg = 0.0;
    double distance_m = 0.0;
};
CourseDistance inverse_geodetic(const GeoPoint& a, const GeoPoint& b);

double geodesic_distance(const GeoPoint& a, const GeoPoint& b);

// Origin-relative spherical Mercator, meters east/north.
struct EastNorth {
    double east = 0.0;
    double north = 0.0;
};
EastNorth mercator(const GeoPoint& p, const GeoPoint& origin);
GeoPoint mercator_inverse(const EastNorth& en, const GeoPoint& origin);

// pixel = (1/Z) * k_in * k_ex * [U V W 1]^T; throws behind_camera_error when Z <= 0.
PixelPoint project_to_pixel(const WorldPoint& w, const CameraModel& cam);

// Full chain: Mercator -> world frame -> pinhole.
PixelPoint geo_to_pixel(const GeoPoint& p, const CameraModel& cam);

} // namespace vesselfuse::geo
