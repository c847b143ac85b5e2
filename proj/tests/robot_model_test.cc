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

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "shadowkit/error.h"
#include "shadowkit/kinematics.h"
#include "shadowkit/mesh.h"
#include "shadowkit/robot_model.h"
#include "shadowkit/urdf.h"
#include "test_support.h"

namespace shadowkit {
namespace {

using testing::CaptureCode;
using testing::DataPath;

constexpr char kAsciiCube[] = R"(solid cube
facet normal 0 0 -1
 outer loop
  vertex 0 0 0
  vertex 1 1 0
  vertex 1 0 0
 endloop
endfacet
facet normal 0 0 -1
 outer loop
  vertex 0 0 0
  vertex 0 1 0
  vertex 1 1 0
 endloop
endfacet
facet normal 0 0 1
 outer loop
  vertex 0 0 1
  vertex 1 0 1
  vertex 1 1 1
 endloop
endfacet
facet normal 0 0 1
 outer loop
  vertex 0 0 1
  vertex 1 1 1
  vertex 0 1 1
 endloop
endfacet
facet normal 0 -1 0
 outer loop
  vertex 0 0 0
  vertex 1 0 0
  vertex 1 0 1
 endloop
endfacet
facet normal 0 -1 0
 outer loop
  vertex 0 0 0
  vertex 1 0 1
  vertex 0 0 1
 endloop
endfacet
facet normal 0 1 0
 outer loop
  vertex 0 1 0
  vertex 1 1 1
  vertex 1 1 0
 endloop
endfacet
facet normal 0 1 0
 outer loop
  vertex 0 1 0
  vertex 0 1 1
  vertex 1 1 1
 endloop
endfacet
facet normal -1 0 0
 outer loop
  vertex 0 0 0
  vertex 0 0 1
  vertex 0 1 1
 endloop
endfacet
facet normal -1 0 0
 outer loop
  vertex 0 0 0
  vertex 0 1 1
  vertex 0 1 0
 endloop
endfacet
facet normal 1 0 0
 outer loop
  vertex 1 0 0
  vertex 1 1 0
  vertex 1 1 1
 endloop
endfacet
facet normal 1 0 0
 outer loop
  vertex 1 0 0
  vertex 1 1 1
  vertex 1 0 1
 endloop
endfacet
endsolid cube
)";

std::string BinaryStl(int declared, int records) {
  std::string s(80, ' ');
  const std::uint32_t n = static_cast<std::uint32_t>(declared);
  s.append(reinterpret_cast<const char*>(&n), 4);
  for (int i = 0; i < records; ++i) {
    float f[12] = {0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, static_cast<float>(i)};
    s.append(reinterpret_cast<const char*>(f), sizeof(f));
    s.append(2, '\0');
  }
  return s;
}

TEST(StlTest, AsciiCubeWeldsToEightVertices) {
  const TriangleMesh m = ParseStl(kAsciiCube);
  EXPECT_EQ(m.triangles.size(), 12u);
  EXPECT_EQ(m.vertices.size(), 8u);
  m.Validate();
}

TEST(StlTest, BinaryCountMismatchIsTruncated) {
  EXPECT_EQ(ParseStl(BinaryStl(10, 10)).triangles.size(), 10u);
  EXPECT_EQ(CaptureCode([] { ParseStl(BinaryStl(10, 9)); }), ErrorCode::kTruncatedFile);
  EXPECT_EQ(CaptureCode([] { ParseStl(std::string(40, 'x')); }), ErrorCode::kTruncatedFile);
}

TEST(StlTest, BinaryFixtureMatchesAsciiFixture) {
  const TriangleMesh bin = LoadMesh(DataPath("meshes/link_box.stl"));
  const TriangleMesh txt = LoadMesh(DataPath("meshes/link_box_ascii.stl"));
  EXPECT_EQ(bin.triangles.size(), 12u);
  EXPECT_EQ(bin.vertices.size(), 8u);
  EXPECT_EQ(txt.triangles, bin.triangles);
  ASSERT_EQ(txt.vertices.size(), bin.vertices.size());
  for (std::size_t i = 0; i < bin.vertices.size(); ++i) {
    EXPECT_LT((txt.vertices[i] - bin.vertices[i]).norm(), 1e-7);
  }
}

TEST(ObjTest, QuadBecomesTwoTrianglesPreservingWinding) {
  const TriangleMesh m = ParseObj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
  ASSERT_EQ(m.triangles.size(), 2u);
  EXPECT_EQ(m.triangles[0], (std::array<std::uint32_t, 3>{0, 1, 2}));
  EXPECT_EQ(m.triangles[1], (std::array<std::uint32_t, 3>{0, 2, 3}));
  // Both triangles keep the counter-clockwise normal of the quad.
  for (const auto& t : m.triangles) {
    const Eigen::Vector3d n = (m.vertices[t[1]] - m.vertices[t[0]])
                                  .cross(m.vertices[t[2]] - m.vertices[t[0]]);
    EXPECT_GT(n.z(), 0.0);
  }
}

TEST(ObjTest, SlashFormsAndNegativeIndices) {
  const TriangleMesh m = ParseObj("v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvn 0 0 1\nf -3/1/1 -2/1/1 -1/1/1\n");
  ASSERT_EQ(m.triangles.size(), 1u);
  EXPECT_EQ(m.triangles[0], (std::array<std::uint32_t, 3>{0, 1, 2}));
  const TriangleMesh fixture = LoadMesh(DataPath("meshes/link_box.obj"));
  EXPECT_EQ(fixture.triangles.size(), 12u);
  EXPECT_EQ(fixture.vertices.size(), 8u);
}

TEST(ObjTest, BadFaceIndex) {
  EXPECT_EQ(CaptureCode([] { ParseObj("v 0 0 0\nv 1 0 0\nf 1 2 3\n"); }), ErrorCode::kBadFaceIndex);
  EXPECT_EQ(CaptureCode([] { ParseObj("v 0 0 0\nf 0 1 1\n"); }), ErrorCode::kBadFaceIndex);
  EXPECT_EQ(CaptureCode([] { ParseObj("v 0 0 0\nf a b c\n"); }), ErrorCode::kBadFaceIndex);
}

TEST(ObjTest, WriteObjRoundTrips) {
  const TriangleMesh m = MakeCylinder(0.05, 0.2);
  const TriangleMesh back = ParseObj(WriteObj(m));
  EXPECT_EQ(back.triangles, m.triangles);
  EXPECT_EQ(back.vertices, m.vertices);
}

// Corrupted inputs must raise library errors, never crash or yield bad
// indices.
TEST(MeshFuzzTest, CorruptedInputsErrorOrValidate) {
  const std::string sources[] = {kAsciiCube, BinaryStl(6, 6),
                                 testing::ReadBytes(DataPath("meshes/link_box.obj"))};
  std::mt19937_64 rng(11);
  int parsed = 0, rejected = 0;
  for (int round = 0; round < 2000; ++round) {
    std::string s = sources[round % 3];
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits; ++e) {
      switch (rng() % 3) {
        case 0:
          s.resize(rng() % (s.size() + 1));
          break;
        case 1:
          if (!s.empty()) s[rng() % s.size()] = static_cast<char>(rng() % 256);
          break;
        default:
          if (!s.empty()) s.erase(rng() % s.size(), 1 + rng() % 8);
      }
    }
    try {
      const TriangleMesh m = round % 3 == 2 ? ParseObj(s) : ParseStl(s);
      for (const auto& t : m.triangles) {
        for (std::uint32_t i : t) ASSERT_LT(i, m.vertices.size());
      }
      ++parsed;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_GT(rejected, 0);
  EXPECT_GT(parsed, 0);
}

TEST(PrimitiveTest, Counts) {
  EXPECT_EQ(MakeBox({1, 2, 3}).triangles.size(), 12u);
  const TriangleMesh c = MakeCylinder(1.0, 2.0);
  EXPECT_EQ(c.triangles.size(), 4u * kPrimitiveSegments);
  for (const auto& v : c.vertices) {
    EXPECT_LE(std::hypot(v.x(), v.y()), 1.0 + 1e-12);
    EXPECT_LE(std::abs(v.z()), 1.0 + 1e-12);
  }
  for (const auto& v : MakeSphere(0.5).vertices) EXPECT_NEAR(v.norm(), 0.5, 1e-12);
}

constexpr char kTwoLink[] = R"(<robot name="r">
  <link name="a"/><link name="b"><visual><geometry><box size="1 1 1"/></geometry></visual></link>
  <joint name="j" type="revolute"><parent link="a"/><child link="b"/>
    <axis xyz="0 0 2"/><limit lower="-1" upper="1"/></joint>
</robot>)";

TEST(UrdfTest, TwoLinkRevolute) {
  const RobotModel m = ParseUrdf(kTwoLink, ".");
  EXPECT_EQ(m.links.size(), 2u);
  ASSERT_EQ(m.joints.size(), 1u);
  EXPECT_EQ(m.joints[0].type, JointType::kRevolute);
  EXPECT_EQ(m.joints[0].axis, Eigen::Vector3d(0, 0, 1));
  EXPECT_EQ(m.root_link, "a");
}

TEST(UrdfTest, CycleIsRejected) {
  const std::string xml = R"(<robot name="r"><link name="a"/><link name="b"/><link name="c"/>
    <joint name="j1" type="fixed"><parent link="a"/><child link="b"/></joint>
    <joint name="j2" type="fixed"><parent link="b"/><child link="c"/></joint>
    <joint name="j3" type="fixed"><parent link="c"/><child link="b"/></joint></robot>)";
  EXPECT_EQ(CaptureCode([&] { ParseUrdf(xml, "."); }), ErrorCode::kCyclicKinematics);
  const std::string loop = R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j1" type="fixed"><parent link="a"/><child link="b"/></joint>
    <joint name="j2" type="fixed"><parent link="b"/><child link="a"/></joint></robot>)";
  EXPECT_EQ(CaptureCode([&] { ParseUrdf(loop, "."); }), ErrorCode::kCyclicKinematics);
}

TEST(UrdfTest, ErrorsByKind) {
  EXPECT_EQ(CaptureCode([] { ParseUrdf("<robot name='r'><link name='a'>", "."); }),
            ErrorCode::kMalformedXml);
  EXPECT_EQ(CaptureCode([] {
              ParseUrdf(R"(<robot name="r"><link name="a"/><link name="b"/>
                <joint name="j" type="floating"><parent link="a"/><child link="b"/></joint></robot>)",
                        ".");
            }),
            ErrorCode::kUnsupportedJointType);
  EXPECT_EQ(CaptureCode([] {
              ParseUrdf(R"(<robot name="r"><link name="a"><visual><geometry>
                <mesh filename="package://nowhere/missing.stl"/></geometry></visual></link></robot>)",
                        DataPath(""));
            }),
            ErrorCode::kMissingMeshFile);
  EXPECT_EQ(CaptureCode([] {
              ParseUrdf(R"(<robot name="r"><link name="a"/>
                <joint name="j" type="fixed"><parent link="a"/><child link="zz"/></joint></robot>)",
                        ".");
            }),
            ErrorCode::kMalformedXml);
}

TEST(UrdfTest, ContinuousBecomesRevoluteAndSkippedElementsWarn) {
  std::vector<std::string> warnings;
  const RobotModel m = LoadUrdf(DataPath("ur_like.urdf"), DataPath(""), &warnings);
  const int j = *m.JointIndex("wrist_3_joint");
  EXPECT_EQ(m.joints[j].type, JointType::kRevolute);
  EXPECT_DOUBLE_EQ(m.joints[j].upper, 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(m.joints[j].lower, -2 * std::numbers::pi);

  warnings.clear();
  LoadUrdf(DataPath("panda_like.urdf"), DataPath(""), &warnings);
  EXPECT_GE(warnings.size(), 2u);  // one collision, one transmission
}

// Counted by hand from panda_like.urdf: 9 links, 8 joints of which 7 move.
TEST(UrdfTest, SevenDofFixture) {
  const RobotModel m = LoadUrdf(DataPath("panda_like.urdf"), DataPath(""));
  EXPECT_EQ(m.links.size(), 9u);
  EXPECT_EQ(m.joints.size(), 8u);
  const Embodiment e = MakeEmbodiment(m);
  EXPECT_EQ(e.dof(), 7);
  EXPECT_EQ(e.flange_link(), "link8");
  EXPECT_EQ(m.root_link, "link0");
  // Mesh visuals from the STL (package://) and the OBJ (relative path).
  EXPECT_EQ(m.links[*m.LinkIndex("link0")].visuals[0].mesh.triangles.size(), 12u);
  EXPECT_EQ(m.links[*m.LinkIndex("link4")].visuals[0].mesh.triangles.size(), 12u);
}

TEST(UrdfTest, WriteThenLoadRebuildsTheTree) {
  testing::TempDir dir;
  for (const char* name : {"panda_like.urdf", "ur_like.urdf", "gripper.urdf", "two_link.urdf"}) {
    const RobotModel m = LoadUrdf(DataPath(name), DataPath(""));
    const RobotModel back = LoadUrdf(WriteUrdf(m, dir.path() / name));
    ASSERT_EQ(back.links.size(), m.links.size()) << name;
    ASSERT_EQ(back.joints.size(), m.joints.size()) << name;
    EXPECT_EQ(back.root_link, m.root_link);
    for (std::size_t i = 0; i < m.joints.size(); ++i) {
      const JointSpec &a = m.joints[i], &b = back.joints[i];
      EXPECT_EQ(a.name, b.name);
      EXPECT_EQ(a.type, b.type);
      EXPECT_EQ(a.parent_link, b.parent_link);
      EXPECT_EQ(a.child_link, b.child_link);
      EXPECT_LT((a.axis - b.axis).norm(), 1e-12);
      EXPECT_LT((a.origin.ToMatrix() - b.origin.ToMatrix()).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_EQ(a.lower, b.lower);
      EXPECT_EQ(a.upper, b.upper);
    }
    for (std::size_t i = 0; i < m.links.size(); ++i) {
      ASSERT_EQ(back.links[i].visuals.size(), m.links[i].visuals.size());
      for (std::size_t v = 0; v < m.links[i].visuals.size(); ++v) {
        EXPECT_EQ(back.links[i].visuals[v].mesh.triangles, m.links[i].visuals[v].mesh.triangles);
      }
    }
  }
}

TEST(EmbodimentTest, GripperAttachmentAndNaming) {
  const RobotModel arm = LoadUrdf(DataPath("panda_like.urdf"), DataPath(""));
  const RobotModel hand = LoadUrdf(DataPath("gripper.urdf"), DataPath(""));
  const Transform tcp = Transform::FromTranslation({0, 0, 0.1034});
  const Embodiment e = AttachGripper(arm, hand, Transform(), tcp);
  EXPECT_EQ(e.dof(), 7);
  EXPECT_EQ(e.finger_joint_names().size(), 2u);
  EXPECT_EQ(e.model().links.size(), arm.links.size() + hand.links.size());
  EXPECT_TRUE(e.model().JointIndex("gripper_mount"));
  // Every non-fixed arm joint appears exactly once in q.
  std::set<std::string> names(e.actuated_joint_names().begin(), e.actuated_joint_names().end());
  EXPECT_EQ(names.size(), 7u);

  // A gripper sharing a link name with the arm gets prefixed.
  RobotModel clash = hand;
  clash.links[0].name = "link1";
  for (auto& j : clash.joints) j.parent_link = "link1";
  clash.Finalize();
  const Embodiment c = AttachGripper(arm, clash, Transform(), tcp);
  EXPECT_TRUE(c.model().LinkIndex("gripper/link1"));
}

TEST(EmbodimentTest, EmptyGripperIdentityTcpIsFlange) {
  const Embodiment e = testing::LoadFixture("ur_like.urdf");
  std::mt19937_64 rng(12);
  for (int i = 0; i < 10; ++i) {
    const FkResult fk = ForwardKinematics(e, testing::RandomJoints(e, rng));
    EXPECT_TRUE(fk.ee == fk.flange);
  }
}

TEST(EmbodimentTest, TcpOffsetAlongFlangeZ) {
  const Embodiment e = testing::LoadFixture("ur_like.urdf", Transform::FromTranslation({0, 0, 0.1}));
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const FkResult fk = ForwardKinematics(e, testing::RandomJoints(e, rng));
    const Eigen::Vector3d local = fk.flange.Inverse() * fk.ee.translation();
    EXPECT_LT((local - Eigen::Vector3d(0, 0, 0.1)).norm(), 1e-12);
  }
}

TEST(EmbodimentTest, FingerJointsFollowAperture) {
  const RobotModel arm = LoadUrdf(DataPath("two_link.urdf"), DataPath(""));
  const RobotModel hand = LoadUrdf(DataPath("gripper.urdf"), DataPath(""));
  const Embodiment e = AttachGripper(arm, hand, Transform(), Transform());
  JointState q{{0.0, 0.0}, 1.0};
  const FkResult open = ForwardKinematics(e, q);
  q.aperture = 0.0;
  const FkResult closed = ForwardKinematics(e, q);
  const int left = *e.model().LinkIndex("left_finger");
  const int right = *e.model().LinkIndex("right_finger");
  const double gap_open =
      (open.link_poses[left].translation() - open.link_poses[right].translation()).norm();
  const double gap_closed =
      (closed.link_poses[left].translation() - closed.link_poses[right].translation()).norm();
  EXPECT_NEAR(gap_open, 0.08, 1e-12);
  EXPECT_NEAR(gap_closed, 0.0, 1e-12);
}

}  // namespace
}  // namespace shadowkit
