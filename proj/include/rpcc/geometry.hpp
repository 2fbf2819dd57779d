#ifndef RPCC_GEOMETRY_HPP
#define RPCC_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rpcc {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

inline bool is_finite(const Vec3& p) {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

// Rigid transform: p -> rotation * p + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  // this ∘ other: apply `other` first, then this.
  Pose compose(const Pose& other) const {
    Pose out;
    out.rotation = rotation * other.rotation;
    out.translation = rotation * other.translation + translation;
    return out;
  }

  bool is_rigid(double tol = 1e-9) const {
    const Mat3 gram = rotation.transpose() * rotation;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
  }

  void validate(double tol = 1e-9) const {
    if (!is_rigid(tol)) throw std::invalid_argument("pose rotation is not a proper rotation matrix");
  }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<float> intensity;  // empty, or one value in [0,1] per point
  uint32_t frame_index = 0;
  Pose pose;  // maps this cloud's frame into the world frame

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_intensity() const { return !intensity.empty(); }

  void validate() const {
    if (has_intensity() && intensity.size() != points.size())
      throw std::invalid_argument("intensity count does not match point count");
    for (const Vec3& p : points)
      if (!is_finite(p)) throw std::invalid_argument("point cloud contains non-finite coordinates");
    for (float v : intensity)
      if (!(v >= 0.0f && v <= 1.0f))
        throw std::invalid_argument("intensity values must lie in [0, 1]");
  }
};

// 3D box with yaw about z only (no roll/pitch).
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  double width = 1.0;   // local x extent
  double length = 1.0;  // local y extent
  double height = 1.0;  // local z extent
  double yaw = 0.0;     // radians, in [-pi, pi]
  int class_id = 0;

  static constexpr double kMinDimension = 1e-6;

  bool degenerate() const {
    return width <= kMinDimension || length <= kMinDimension || height <= kMinDimension;
  }
};

inline PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose) {
  pose.validate();
  PointCloud out = cloud;
  for (Vec3& p : out.points) p = pose.apply(p);
  return out;
}

}  // namespace rpcc

#endif  // RPCC_GEOMETRY_HPP
