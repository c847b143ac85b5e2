// Copyright 2026 The ShadowKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHADOWKIT_GEOMETRY_H_
#define SHADOWKIT_GEOMETRY_H_

#include <cstdint>
#include <optional>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace shadowkit {

// Rigid SE(3) transform stored as a unit quaternion and a translation in
// meters. Applying a transform to a point computes R * p + t. Every
// constructor and every composition renormalizes the quaternion.
class Transform {
 public:
  Transform();
  Transform(const Eigen::Quaterniond& rotation,
            const Eigen::Vector3d& translation);

  static Transform Identity() { return Transform(); }
  static Transform FromTranslation(const Eigen::Vector3d& translation);
  static Transform FromRotation(const Eigen::Quaterniond& rotation);
  // Rotation of `angle` radians about `axis` (need not be normalized).
  static Transform FromAxisAngle(const Eigen::Vector3d& axis, double angle);
  // Rotation vector (axis * angle).
  static Transform FromRotationVector(const Eigen::Vector3d& rotation_vector);
  // URDF convention: fixed-axis roll about x, then pitch about y, then yaw
  // about z, i.e. R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Transform FromRpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy);
  // Throws Error(kInvalidArgument) unless the upper-left 3x3 is a rotation.
  static Transform FromMatrix(const Eigen::Matrix4d& m);

  const Eigen::Quaterniond& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Matrix3d RotationMatrix() const;
  Eigen::Matrix4d ToMatrix() const;
  Eigen::Vector3d Rpy() const;
  Eigen::Vector3d RotationVector() const;

  // Result applies `other` first, then this.
  Transform operator*(const Transform& other) const;
  Eigen::Vector3d operator*(const Eigen::Vector3d& point) const;
  Eigen::Vector3d RotateVector(const Eigen::Vector3d& v) const;

  Transform Inverse() const;

  // Exact (bitwise-value) equality of quaternion coefficients and translation.
  bool operator==(const Transform& other) const;

 private:
  Eigen::Quaterniond rotation_;
  Eigen::Vector3d translation_;
};

inline Transform Compose(const Transform& a, const Transform& b) { return a * b; }
inline Transform Invert(const Transform& t) { return t.Inverse(); }

// Rotation vector (axis * angle, angle in [0, pi]) of a unit quaternion.
Eigen::Vector3d QuaternionToRotationVector(const Eigen::Quaterniond& q);

// Angle in radians of the relative rotation a^-1 * b.
double RotationDistance(const Transform& a, const Transform& b);
double TranslationDistance(const Transform& a, const Transform& b);

enum class Projection { kPinhole, kOrthographic };

// Pinhole intrinsics. For orthographic cameras fx and fy are pixels per
// meter instead of focal lengths.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  // Throws Error(kInvalidArgument) when fx, fy, width or height is not
  // positive.
  void Validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

// A camera model: intrinsics plus projection kind. Implicitly constructible
// from pinhole intrinsics.
struct Camera {
  Camera() = default;
  Camera(const CameraIntrinsics& k)  // NOLINT(runtime/explicit)
      : intrinsics(k) {}
  Camera(const CameraIntrinsics& k, Projection p) : intrinsics(k), projection(p) {}

  static Camera Orthographic(double pixels_per_meter, int width, int height);

  int width() const { return intrinsics.width; }
  int height() const { return intrinsics.height; }

  CameraIntrinsics intrinsics;
  Projection projection = Projection::kPinhole;

  bool operator==(const Camera&) const = default;
};

// Points with z at or below this depth are behind a pinhole camera.
inline constexpr double kBehindCameraDepth = 1e-9;

// Pinhole projection u = fx*x/z + cx, v = fy*y/z + cy. Returns nullopt
// (behind camera) when z <= kBehindCameraDepth.
std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& p_cam,
                                       const CameraIntrinsics& k);
// Projection honoring the camera's model. Orthographic cameras never
// report points as behind.
std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& p_cam,
                                       const Camera& camera);

// Inverse of Project for a pixel at the given depth along the optical axis.
Eigen::Vector3d Unproject(const Eigen::Vector2d& pixel, double depth,
                          const Camera& camera);

struct CalibrationNoiseSpec {
  double sigma_translation = 0.0;  // meters, per axis
  double sigma_rotation = 0.0;     // radians, angle of a random-axis rotation
  std::uint64_t seed = 0;

  void Validate() const;
};

// Adds zero-mean Gaussian noise to an extrinsic transform: per-axis
// translation noise, and a rotation about a uniformly random axis with a
// Gaussian angle, applied on the camera side. Deterministic in the seed;
// zero sigmas return the input unchanged.
Transform PerturbExtrinsics(const Transform& t, const CalibrationNoiseSpec& noise);

}  // namespace shadowkit

#endif  // SHADOWKIT_GEOMETRY_H_
