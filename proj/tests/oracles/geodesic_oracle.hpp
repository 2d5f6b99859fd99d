#pragma once

// Independent geodesic oracle for tests. Integrates the geodesic equations on
// the WGS-84 ellipsoid with fixed-step RK4; shares no code with the
// production series solver. The inverse solves the direct map with Newton
// iterations in a local tangent frame.

namespace geodesic_oracle {

struct Geo {
    double lon_deg = 0.0;
    double lat_deg = 0.0;
};

struct CourseDistance {
    double course_deg = 0.0;
    double distance_m = 0.0;
};

Geo direct(const Geo& start, double course_deg, double distance_m, int steps = 256);
CourseDistance inverse(const Geo& a, const Geo& b);

} // namespace geodesic_oracle
