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

#include "shadowkit/geometry.h"

#include <cmath>
#include <random>

#include "shadowkit/error.h"

namespace shadowkit {

Transform::Transform()
    : rotation_(Eigen::Quaterniond::Identity()),
      translation_(Eigen::Vector3d::Zero()) {}

Transform::Transform(const Eigen::Quaterniond& rotation,
                     const Eigen::Vector3d& translation)
    : rotation_(rotation.normalized()), translation_(translation) {}

Transform Transform::FromTranslation(const Eigen::Vector3d& translation) {
  return Transform(Eigen::Quaterniond::Identity(), translation);
}

Transform Transform::FromRotation(const Eigen::Quaterniond& rotation) {
  return Transform(rotation, Eigen::Vector3d::Zero());
}

Transform Transform::FromAxisAngle(const Eigen::Vector3d& axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0 || angle == 0.0) return Transform();
  return FromRotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)));
}

Transform Transform::FromRotationVector(const Eigen::Vector3d& rotation_vector) {
  return FromAxisAngle(rotation_vector, rotation_vector.norm());
}

Transform Transform::FromRpy(const Eigen::Vector3d& xyz, const Eigen::Vector3d& rpy) {
  const Eigen::Quaterniond q =
      Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
      Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
      Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX());
  return Transform(q, xyz);
}

Transform Transform::FromMatrix(const Eigen::Matrix4d& m) {
  const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
  if (!r.allFinite() || !m.topRightCorner<3, 1>().allFinite() ||
      !(r.transpose() * r).isApprox(Eigen::Matrix3d::Identity(), 1e-6) || r.determinant() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "upper-left 3x3 is not a rotation");
  }
  return Transform(Eigen::Quaterniond(r), m.topRightCorner<3, 1>());
}

Eigen::Matrix3d Transform::RotationMatrix() const {
  return rotation_.toRotationMatrix();
}

Eigen::Matrix4d Transform::ToMatrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = RotationMatrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Eigen::Vector3d Transform::Rpy() const {
  const Eigen::Matrix3d r = RotationMatrix();
  // Inverse of Rz(yaw) * Ry(pitch) * Rx(roll).
  const double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  double roll, yaw;
  if (std::abs(std::cos(pitch)) > 1e-12) {
    roll = std::atan2(r(2, 1), r(2, 2));
    yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: fold everything into yaw.
    roll = 0.0;
    yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return {roll, pitch, yaw};
}

Eigen::Vector3d Transform::RotationVector() const {
  return QuaternionToRotationVector(rotation_);
}

Transform Transform::operator*(const Transform& other) const {
  return Transform(rotation_ * other.rotation_,
                   rotation_ * other.translation_ + translation_);
}

Eigen::Vector3d Transform::operator*(const Eigen::Vector3d& point) const {
  return rotation_ * point + translation_;
}

Eigen::Vector3d Transform::RotateVector(const Eigen::Vector3d& v) const {
  return rotation_ * v;
}

Transform Transform::Inverse() const {
  const Eigen::Quaterniond inv = rotation_.conjugate();
  return Transform(inv, -(inv * translation_));
}

bool Transform::operator==(const Transform& other) const {
  return rotation_.coeffs() == other.rotation_.coeffs() &&
         translation_ == other.translation_;
}

Eigen::Vector3d QuaternionToRotationVector(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Eigen::Vector3d v = q.vec();
  const double s = v.norm();
  if (s < 1e-12) {
    // Small-angle limit: angle ~ 2 s, axis ~ v / s.
    return 2.0 * v;
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return v * (angle / s);
}

double RotationDistance(const Transform& a, const Transform& b) {
  return QuaternionToRotationVector(a.rotation().conjugate() * b.rotation()).norm();
}

double TranslationDistance(const Transform& a, const Transform& b) {
  return (a.translation() - b.translation()).norm();
}

void CameraIntrinsics::Validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "camera focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "camera image size must be positive");
  }
}

Camera Camera::Orthographic(double pixels_per_meter, int width, int height) {
  CameraIntrinsics k;
  k.fx = k.fy = pixels_per_meter;
  k.cx = 0.5 * width;
  k.cy = 0.5 * height;
  k.width = width;
  k.height = height;
  return Camera(k, Projection::kOrthographic);
}

std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& p_cam,
                                       const CameraIntrinsics& k) {
  if (p_cam.z() <= kBehindCameraDepth) return std::nullopt;
  return Eigen::Vector2d(k.fx * p_cam.x() / p_cam.z() + k.cx,
                         k.fy * p_cam.y() / p_cam.z() + k.cy);
}

std::optional<Eigen::Vector2d> Project(const Eigen::Vector3d& p_cam,
                                       const Camera& camera) {
  const CameraIntrinsics& k = camera.intrinsics;
  if (camera.projection == Projection::kOrthographic) {
    return Eigen::Vector2d(k.fx * p_cam.x() + k.cx, k.fy * p_cam.y() + k.cy);
  }
  return Project(p_cam, k);
}

Eigen::Vector3d Unproject(const Eigen::Vector2d& pixel, double depth,
                          const Camera& camera) {
  const CameraIntrinsics& k = camera.intrinsics;
  const double x = (pixel.x() - k.cx) / k.fx;
  const double y = (pixel.y() - k.cy) / k.fy;
  if (camera.projection == Projection::kOrthographic) return {x, y, depth};
  return {x * depth, y * depth, depth};
}

void CalibrationNoiseSpec::Validate() const {
  if (!(sigma_translation >= 0.0) || !(sigma_rotation >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise sigmas must be non-negative");
  }
}

Transform PerturbExtrinsics(const Transform& t, const CalibrationNoiseSpec& noise) {
  noise.Validate();
  if (noise.sigma_translation == 0.0 && noise.sigma_rotation == 0.0) return t;

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> unit(0.0, 1.0);

  Eigen::Vector3d dt = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) dt[i] = noise.sigma_translation * unit(rng);

  // Isotropic axis: normalized Gaussian vector.
  Eigen::Vector3d axis;
  do {
    axis = Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
  } while (axis.norm() < 1e-12);
  const double angle = noise.sigma_rotation * unit(rng);

  const Transform rot = Transform::FromAxisAngle(axis, angle);
  return Transform(rot.rotation() * t.rotation(), t.translation() + dt);
}

}  // namespace shadowkit
