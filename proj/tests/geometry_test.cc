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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "shadowkit/error.h"
#include "shadowkit/json_io.h"
#include "test_support.h"

namespace shadowkit {
namespace {

Transform RandomTransform(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return Transform(q.normalized(), Eigen::Vector3d(n(rng), n(rng), n(rng)));
}

TEST(TransformTest, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const Transform t = RandomTransform(rng);
  EXPECT_LT(TranslationDistance(Compose(Transform::Identity(), t), t), 1e-15);
  EXPECT_LT(RotationDistance(Compose(Transform::Identity(), t), t), 1e-9);
}

TEST(TransformTest, ComposeWithInverseIsIdentity) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Transform t = RandomTransform(rng);
    const Transform id = Compose(t, Invert(t));
    EXPECT_LT(id.translation().norm(), 1e-9);
    EXPECT_LT(RotationDistance(id, Transform::Identity()), 1e-9);
  }
}

TEST(TransformTest, ComposeMatchesMatrixProduct) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Transform a = RandomTransform(rng), b = RandomTransform(rng);
    const Eigen::Matrix4d oracle = a.ToMatrix() * b.ToMatrix();
    EXPECT_LT((Compose(a, b).ToMatrix() - oracle).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TransformTest, InverseMatchesMatrixInverse) {
  EXPECT_TRUE(Invert(Transform::Identity()) == Transform::Identity());
  const Transform t = Invert(Transform::FromTranslation({1, 2, 3}));
  EXPECT_EQ(t.translation(), Eigen::Vector3d(-1, -2, -3));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const Transform a = RandomTransform(rng);
    EXPECT_LT((Invert(a).ToMatrix() - a.ToMatrix().inverse()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TransformTest, ComposeIsAssociative) {
  std::mt19937_64 rng(5);
  const Transform a = RandomTransform(rng), b = RandomTransform(rng), c = RandomTransform(rng);
  const Transform l = (a * b) * c, r = a * (b * c);
  EXPECT_LT(TranslationDistance(l, r), 1e-12);
  EXPECT_LT(RotationDistance(l, r), 1e-9);
}

TEST(TransformTest, QuaternionStaysNormalizedOverLongChains) {
  std::mt19937_64 rng(6);
  Transform acc;
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    std::normal_distribution<double> n(0.0, 0.3);
    acc = acc * Transform::FromRotationVector({n(rng), n(rng), n(rng)});
    if (i % 1000 == 0) acc = Transform(acc.rotation(), Eigen::Vector3d::Zero());
    worst = std::max(worst, std::abs(acc.rotation().norm() - 1.0));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(TransformTest, RpyFollowsFixedAxisConvention) {
  const Eigen::Vector3d rpy(0.3, -0.7, 1.1), xyz(0.1, 0.2, 0.3);
  const Eigen::Matrix4d oracle = testing::RpyMatrix(xyz, rpy);
  const Transform t = Transform::FromRpy(xyz, rpy);
  EXPECT_LT((t.ToMatrix() - oracle).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((t.Rpy() - rpy).norm(), 1e-12);
}

TEST(TransformTest, RotationVectorRoundTrip) {
  const Eigen::Vector3d v(0.2, -0.4, 0.9);
  EXPECT_LT((Transform::FromRotationVector(v).RotationVector() - v).norm(), 1e-12);
  EXPECT_NEAR(Transform::FromAxisAngle({0, 0, 2}, std::numbers::pi).RotationVector().norm(),
              std::numbers::pi, 1e-12);
}

TEST(TransformTest, FromMatrixRejectsNonRotation) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(0, 0) = 2.0;
  EXPECT_EQ(testing::CaptureCode([&] { Transform::FromMatrix(m); }), ErrorCode::kInvalidArgument);
}

TEST(ProjectTest, OpticalAxisHitsPrincipalPoint) {
  CameraIntrinsics k{100, 100, 42, 24, 84, 48};
  const auto uv = Project(Eigen::Vector3d(0, 0, 1), k);
  ASSERT_TRUE(uv);
  EXPECT_EQ(*uv, Eigen::Vector2d(42, 24));
}

TEST(ProjectTest, BehindCamera) {
  CameraIntrinsics k{100, 100, 50, 50, 100, 100};
  EXPECT_FALSE(Project(Eigen::Vector3d(0, 0, -1), k));
  EXPECT_FALSE(Project(Eigen::Vector3d(0, 0, 1e-9), k));
  EXPECT_FALSE(Project(Eigen::Vector3d(0, 0, 0), k));
}

TEST(ProjectTest, HandEvaluatedPinhole) {
  CameraIntrinsics k{100, 100, 50, 50, 100, 100};
  const auto uv = Project(Eigen::Vector3d(0.1, -0.2, 0.5), k);
  ASSERT_TRUE(uv);
  EXPECT_NEAR(uv->x(), 70.0, 1e-12);
  EXPECT_NEAR(uv->y(), 10.0, 1e-12);
}

TEST(ProjectTest, UnprojectRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> px(0, 640), depth(0.1, 5.0);
  const Camera pin(CameraIntrinsics{525, 520, 319.5, 239.5, 640, 480});
  const Camera ortho = Camera::Orthographic(64, 64, 64);
  for (const Camera& cam : {pin, ortho}) {
    for (int i = 0; i < 1000; ++i) {
      const Eigen::Vector2d uv(px(rng), px(rng));
      const auto back = Project(Unproject(uv, depth(rng), cam), cam);
      ASSERT_TRUE(back);
      EXPECT_LT((*back - uv).norm(), 1e-6);
    }
  }
}

TEST(ProjectTest, OrthographicIgnoresDepth) {
  const Camera cam = Camera::Orthographic(100, 64, 64);
  const auto a = Project(Eigen::Vector3d(0.1, 0.05, 1.0), cam);
  const auto b = Project(Eigen::Vector3d(0.1, 0.05, -3.0), cam);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
  EXPECT_EQ(*a, Eigen::Vector2d(42, 37));
}

TEST(IntrinsicsTest, ValidateRejectsBadValues) {
  EXPECT_EQ(testing::CaptureCode([] { CameraIntrinsics{0, 1, 0, 0, 1, 1}.Validate(); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(testing::CaptureCode([] { CameraIntrinsics{1, 1, 0, 0, 0, 1}.Validate(); }),
            ErrorCode::kInvalidArgument);
}

TEST(PerturbTest, ZeroNoiseIsBitIdentical) {
  std::mt19937_64 rng(8);
  const Transform t = RandomTransform(rng);
  EXPECT_TRUE(PerturbExtrinsics(t, {0.0, 0.0, 123}) == t);
}

TEST(PerturbTest, SeededAndDistinct) {
  std::mt19937_64 rng(9);
  const Transform t = RandomTransform(rng);
  const CalibrationNoiseSpec a{0.02, 0.1, 5}, b{0.02, 0.1, 6};
  EXPECT_TRUE(PerturbExtrinsics(t, a) == PerturbExtrinsics(t, a));
  EXPECT_FALSE(PerturbExtrinsics(t, a) == PerturbExtrinsics(t, b));
}

TEST(PerturbTest, TranslationStdMatchesSigma) {
  const Transform t = Transform::FromTranslation({1, 2, 3});
  constexpr int kN = 10000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sq = Eigen::Vector3d::Zero();
  for (int i = 0; i < kN; ++i) {
    const Eigen::Vector3d d =
        PerturbExtrinsics(t, {0.01, 0.0, static_cast<std::uint64_t>(i)}).translation() -
        t.translation();
    sum += d;
    sq += d.cwiseProduct(d);
  }
  for (int axis = 0; axis < 3; ++axis) {
    const double mean = sum[axis] / kN;
    const double sd = std::sqrt(sq[axis] / kN - mean * mean);
    EXPECT_NEAR(sd, 0.01, 0.0005) << "axis " << axis;
  }
}

TEST(PerturbTest, RotationAngleStdMatchesSigma) {
  constexpr int kN = 10000;
  double sq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const Transform p = PerturbExtrinsics(Transform(), {0.0, 0.05, static_cast<std::uint64_t>(i)});
    const double a = RotationDistance(p, Transform());
    sq += a * a;
  }
  EXPECT_NEAR(std::sqrt(sq / kN), 0.05, 0.0025);
}

TEST(PerturbTest, NegativeSigmaRejected) {
  EXPECT_EQ(testing::CaptureCode([] { PerturbExtrinsics(Transform(), {-1.0, 0.0, 0}); }),
            ErrorCode::kInvalidArgument);
}

TEST(CalibrationTest, RoundTripsThroughJson) {
  Calibration c;
  c.camera = Camera(CameraIntrinsics{500, 510, 320, 240, 640, 480});
  c.extrinsics["a"] = Transform::FromRpy({0.1, 0.2, 0.3}, {0.4, 0.5, 0.6});
  c.extrinsics["b"] = Transform::FromTranslation({1, 0, 0});
  const Calibration back = ParseCalibration(SerializeCalibration(c));
  EXPECT_EQ(back.camera, c.camera);
  EXPECT_TRUE(back.Extrinsics("a") == c.extrinsics["a"]);
  EXPECT_TRUE(back.Extrinsics("b") == c.extrinsics["b"]);
  EXPECT_EQ(testing::CaptureCode([&] { back.Extrinsics("c"); }), ErrorCode::kSchemaError);

  Calibration o;
  o.camera = Camera::Orthographic(80, 64, 64);
  EXPECT_EQ(ParseCalibration(SerializeCalibration(o)).camera, o.camera);
}

TEST(CalibrationTest, MalformedDocumentsAreSchemaErrors) {
  EXPECT_EQ(testing::CaptureCode([] { ParseCalibration("{"); }), ErrorCode::kSchemaError);
  EXPECT_EQ(testing::CaptureCode([] { ParseCalibration(R"({"extrinsics": {}})"); }),
            ErrorCode::kSchemaError);
  EXPECT_EQ(testing::CaptureCode([] {
              ParseCalibration(
                  R"({"intrinsics": {"fx": 1, "fy": 1, "cx": 0, "cy": 0, "width": 4, "height": 4},
                      "extrinsics": {"a": {"quaternion": [1, 0, 0], "translation": [0, 0, 0]}}})");
            }),
            ErrorCode::kSchemaError);
}

}  // namespace
}  // namespace shadowkit
