#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace ghg {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using PointCloud = std::vector<Vec3>;

/// Rigid transform [R|t] mapping object coordinates into camera space.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_inverse(const Vec3& x) const { return rotation.transpose() * (x - translation); }
  Pose inverse() const { return {rotation.transpose(), -(rotation.transpose() * translation)}; }
  Pose compose(const Pose& inner) const {
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }
};

}  // namespace ghg
