#pragma once

#include <array>
#include <optional>
#include <variant>

#include "orchard/errors.hpp"

namespace orchard {

// Rotation angles about the x, y and z axes, in radians.
struct EulerAngles {
    double omega = 0.0;
    double phi = 0.0;
    double kappa = 0.0;
};

struct Mat3 {
    // Row-major.
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    static Mat3 identity() { return Mat3{}; }
    Mat3 transposed() const;
};

Mat3 operator*(const Mat3& a, const Mat3& b);

using RotationMatrix = Mat3;

struct WorldPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct CameraPoint {
    double x = 0.0, y = 0.0, z = 0.0;
};

// u: column, grows right; v: row, grows down; origin at the top-left corner.
struct PixelPoint {
    double u = 0.0, v = 0.0;
};

RotationMatrix rotation_x(double angle);
RotationMatrix rotation_y(double angle);
RotationMatrix rotation_z(double angle);

// R = Rx(omega) * Ry(phi) * Rz(kappa).
RotationMatrix build_rotation(const EulerAngles& angles);

// Orthonormality / determinant diagnostics for rotation matrices.
double max_orthonormality_residual(const Mat3& r); // max |(R^T R - I)_ij|
double determinant(const Mat3& r);

struct CameraExtrinsics {
    RotationMatrix rotation;  // camera-to-world axes
    WorldPoint translation;   // projection centre in the world frame
};

struct CameraIntrinsics {
    double focal_length = 1.0; // pixels
    double cx = 0.0, cy = 0.0; // principal point, pixels
    int image_width = 0, image_height = 0;
};

// P_c = R^T (P_w - T)
CameraPoint world_to_camera(const WorldPoint& p, const CameraExtrinsics& ext);
// Inverse transform: P_w = R P_c + T.
WorldPoint camera_to_world(const CameraPoint& p, const CameraExtrinsics& ext);

// A camera point is projectable only when it lies in front of the camera.
inline constexpr double kMinProjectionDepth = 1e-9; // meters

// u = f*Xc/Zc + cx, v = -f*Yc/Zc + cy. Throws behind_camera when Zc <= kMinProjectionDepth.
PixelPoint camera_to_pixel(const CameraPoint& p, const CameraIntrinsics& intr);

struct Mat34 {
    // Row-major 3x4.
    std::array<double, 12> m{};

    double operator()(int r, int c) const { return m[static_cast<std::size_t>(4 * r + c)]; }
    double& operator()(int r, int c) { return m[static_cast<std::size_t>(4 * r + c)]; }
};

struct DecomposedCamera {
    CameraExtrinsics extrinsics;
    CameraIntrinsics intrinsics;
};

// Raw 3x4 projection matrix as exported by photogrammetry software. Applied
// homogeneously without decomposition; all sign conventions are taken to be
// baked into the matrix.
struct MatrixCamera {
    Mat34 pmatrix;
    int image_width = 0, image_height = 0;
};

using CameraModel = std::variant<DecomposedCamera, MatrixCamera>;

int model_image_width(const CameraModel& model);
int model_image_height(const CameraModel& model);

struct Projection {
    PixelPoint pixel;
    double depth = 0.0; // Zc for the decomposed path, homogeneous w for the matrix path
};

// nullopt when the point is not in front of the camera.
std::optional<Projection> try_project(const WorldPoint& p, const CameraModel& model);

// Throwing variant of try_project.
PixelPoint project_world_point(const WorldPoint& p, const CameraModel& model);

// P = K [R^T | -R^T T] with K = [[f,0,cx],[0,-f,cy],[0,0,1]]; the -f row carries
// the pixel-v sign convention so that the matrix path agrees with camera_to_pixel.
Mat34 compose_projection(const CameraExtrinsics& ext, const CameraIntrinsics& intr);

} // namespace orchard
