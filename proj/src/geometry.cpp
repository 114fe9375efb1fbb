#include "orchard/geometry.hpp"

#include <cmath>

namespace orchard {

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
    return t;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(r, k) * b(k, c);
            out(r, c) = s;
        }
    }
    return out;
}

RotationMatrix rotation_x(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {1, 0, 0,
           0, c, -s,
           0, s, c};
    return r;
}

RotationMatrix rotation_y(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {c, 0, s,
           0, 1, 0,
           -s, 0, c};
    return r;
}

RotationMatrix rotation_z(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r.m = {c, -s, 0,
           s, c, 0,
           0, 0, 1};
    return r;
}

RotationMatrix build_rotation(const EulerAngles& angles) {
    return rotation_x(angles.omega) * rotation_y(angles.phi) * rotation_z(angles.kappa);
}

double max_orthonormality_residual(const Mat3& r) {
    Mat3 g = r.transposed() * r;
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(g(i, j) - target));
        }
    }
    return worst;
}

double determinant(const Mat3& r) {
    return r(0, 0) * (r(1, 1) * r(2, 2) - r(1, 2) * r(2, 1)) -
           r(0, 1) * (r(1, 0) * r(2, 2) - r(1, 2) * r(2, 0)) +
           r(0, 2) * (r(1, 0) * r(2, 1) - r(1, 1) * r(2, 0));
}

CameraPoint world_to_camera(const WorldPoint& p, const CameraExtrinsics& ext) {
    double dx = p.x - ext.translation.x;
    double dy = p.y - ext.translation.y;
    double dz = p.z - ext.translation.z;
    const Mat3& r = ext.rotation;
    // R^T d
    return CameraPoint{
        r(0, 0) * dx + r(1, 0) * dy + r(2, 0) * dz,
        r(0, 1) * dx + r(1, 1) * dy + r(2, 1) * dz,
        r(0, 2) * dx + r(1, 2) * dy + r(2, 2) * dz,
    };
}

WorldPoint camera_to_world(const CameraPoint& p, const CameraExtrinsics& ext) {
    const Mat3& r = ext.rotation;
    return WorldPoint{
        r(0, 0) * p.x + r(0, 1) * p.y + r(0, 2) * p.z + ext.translation.x,
        r(1, 0) * p.x + r(1, 1) * p.y + r(1, 2) * p.z + ext.translation.y,
        r(2, 0) * p.x + r(2, 1) * p.y + r(2, 2) * p.z + ext.translation.z,
    };
}

PixelPoint camera_to_pixel(const CameraPoint& p, const CameraIntrinsics& intr) {
    if (!(p.z > kMinProjectionDepth)) fail(ErrorKind::behind_camera, "point is not in front of the camera");
    return PixelPoint{
        intr.focal_length * p.x / p.z + intr.cx,
        -intr.focal_length * p.y / p.z + intr.cy,
    };
}

int model_image_width(const CameraModel& model) {
    if (const auto* d = std::get_if<DecomposedCamera>(&model)) return d->intrinsics.image_width;
    return std::get<MatrixCamera>(model).image_width;
}

int model_image_height(const CameraModel& model) {
    if (const auto* d = std::get_if<DecomposedCamera>(&model)) return d->intrinsics.image_height;
    return std::get<MatrixCamera>(model).image_height;
}

std::optional<Projection> try_project(const WorldPoint& p, const CameraModel& model) {
    if (const auto* d = std::get_if<DecomposedCamera>(&model)) {
        CameraPoint pc = world_to_camera(p, d->extrinsics);
        if (!(pc.z > kMinProjectionDepth)) return std::nullopt;
        const CameraIntrinsics& intr = d->intrinsics;
        PixelPoint px{
            intr.focal_length * pc.x / pc.z + intr.cx,
            -intr.focal_length * pc.y / pc.z + intr.cy,
        };
        return Projection{px, pc.z};
    }
    const Mat34& pm = std::get<MatrixCamera>(model).pmatrix;
    double hu = pm(0, 0) * p.x + pm(0, 1) * p.y + pm(0, 2) * p.z + pm(0, 3);
    double hv = pm(1, 0) * p.x + pm(1, 1) * p.y + pm(1, 2) * p.z + pm(1, 3);
    double hw = pm(2, 0) * p.x + pm(2, 1) * p.y + pm(2, 2) * p.z + pm(2, 3);
    if (!(hw > kMinProjectionDepth)) return std::nullopt;
    return Projection{PixelPoint{hu / hw, hv / hw}, hw};
}

PixelPoint project_world_point(const WorldPoint& p, const CameraModel& model) {
    auto proj = try_project(p, model);
    if (!proj) fail(ErrorKind::behind_camera, "point is not in front of the camera");
    return proj->pixel;
}

Mat34 compose_projection(const CameraExtrinsics& ext, const CameraIntrinsics& intr) {
    const Mat3& r = ext.rotation;
    const WorldPoint& t = ext.translation;
    // Rows of R^T are columns of R.
    double rt[3][3] = {
        {r(0, 0), r(1, 0), r(2, 0)},
        {r(0, 1), r(1, 1), r(2, 1)},
        {r(0, 2), r(1, 2), r(2, 2)},
    };
    double mt[3];
    for (int i = 0; i < 3; ++i) mt[i] = -(rt[i][0] * t.x + rt[i][1] * t.y + rt[i][2] * t.z);

    double f = intr.focal_length;
    Mat34 p;
    for (int c = 0; c < 3; ++c) {
        p(0, c) = f * rt[0][c] + intr.cx * rt[2][c];
        p(1, c) = -f * rt[1][c] + intr.cy * rt[2][c];
        p(2, c) = rt[2][c];
    }
    p(0, 3) = f * mt[0] + intr.cx * mt[2];
    p(1, 3) = -f * mt[1] + intr.cy * mt[2];
    p(2, 3) = mt[2];
    return p;
}

} // namespace orchard
