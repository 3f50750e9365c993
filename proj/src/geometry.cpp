#include "imucal/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace imucal {

namespace {
constexpr double kNormTolerance = 1e-9;
constexpr double kSmallAngle = 1e-8;
}  // namespace

UnitQuaternion::UnitQuaternion(double x, double y, double z, double w) : xyzw_(x, y, z, w) {
  const double norm = xyzw_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw std::invalid_argument("quaternion norm deviates from 1 by more than 1e-9");
  }
  normalize_and_canonicalize();
}

UnitQuaternion UnitQuaternion::from_vector(const Eigen::Vector4d& xyzw) {
  const double norm = xyzw.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument("cannot normalize near-zero quaternion");
  }
  UnitQuaternion q;
  q.xyzw_ = xyzw / norm;
  q.normalize_and_canonicalize();
  return q;
}

void UnitQuaternion::normalize_and_canonicalize() {
  xyzw_ /= xyzw_.norm();
  // Sign canon: w >= 0; on the w == 0 great circle, first nonzero of x,y,z >= 0.
  bool flip = false;
  if (xyzw_[3] < 0.0) {
    flip = true;
  } else if (xyzw_[3] == 0.0) {
    for (int i = 0; i < 3; ++i) {
      if (xyzw_[i] != 0.0) {
        flip = xyzw_[i] < 0.0;
        break;
      }
    }
  }
  if (flip) xyzw_ = -xyzw_;
}

UnitQuaternion UnitQuaternion::conjugate() const {
  UnitQuaternion q;
  q.xyzw_ << -xyzw_[0], -xyzw_[1], -xyzw_[2], xyzw_[3];
  q.normalize_and_canonicalize();
  return q;
}

double UnitQuaternion::angle() const {
  const double v = vec().norm();
  return 2.0 * std::atan2(v, std::abs(xyzw_[3]));
}

RotationMatrix::RotationMatrix(const Eigen::Matrix3d& m) : m_(m) {
  if (((m * m.transpose()) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("matrix is not orthonormal");
  }
  if (std::abs(m.determinant() - 1.0) > 1e-10) {
    throw std::invalid_argument("matrix determinant is not +1");
  }
}

RotationMatrix quat_to_rot(const UnitQuaternion& q) {
  const double x = q.x(), y = q.y(), z = q.z(), w = q.w();
  Eigen::Matrix3d m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),   //
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return RotationMatrix(m, RotationMatrix::Unchecked{});
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Eigen::Vector3d av = a.vec(), bv = b.vec();
  const double aw = a.w(), bw = b.w();
  const Eigen::Vector3d v = aw * bv + bw * av + av.cross(bv);
  const double w = aw * bw - av.dot(bv);
  return UnitQuaternion::from_vector((Eigen::Vector4d() << v, w).finished());
}

Eigen::Matrix4d left_matrix(const UnitQuaternion& q) {
  Eigen::Matrix4d m;
  m.topLeftCorner<3, 3>() = q.w() * Eigen::Matrix3d::Identity() + skew(q.vec());
  m.topRightCorner<3, 1>() = q.vec();
  m.bottomLeftCorner<1, 3>() = -q.vec().transpose();
  m(3, 3) = q.w();
  return m;
}

Eigen::Matrix4d right_matrix(const UnitQuaternion& q) {
  Eigen::Matrix4d m;
  m.topLeftCorner<3, 3>() = q.w() * Eigen::Matrix3d::Identity() - skew(q.vec());
  m.topRightCorner<3, 1>() = q.vec();
  m.bottomLeftCorner<1, 3>() = -q.vec().transpose();
  m(3, 3) = q.w();
  return m;
}

UnitQuaternion delta_quat(const Eigen::Vector3d& omega, double dt) {
  return quat_exp(omega * dt);
}

UnitQuaternion quat_exp(const Eigen::Vector3d& phi) {
  const double angle = phi.norm();
  Eigen::Vector4d xyzw;
  if (angle < kSmallAngle) {
    xyzw << 0.5 * phi, 1.0;
  } else {
    const double half = 0.5 * angle;
    xyzw << (phi / angle) * std::sin(half), std::cos(half);
  }
  return UnitQuaternion::from_vector(xyzw);
}

UnitQuaternion euler_xyz_to_quat(const Eigen::Vector3d& angles_deg) {
  const Eigen::Vector3d r = angles_deg * (M_PI / 180.0);
  const UnitQuaternion qx = quat_exp(Eigen::Vector3d(r.x(), 0, 0));
  const UnitQuaternion qy = quat_exp(Eigen::Vector3d(0, r.y(), 0));
  const UnitQuaternion qz = quat_exp(Eigen::Vector3d(0, 0, r.z()));
  return quat_mul(qz, quat_mul(qy, qx));
}

Eigen::Vector3d quat_to_euler_xyz(const UnitQuaternion& q) {
  const Eigen::Matrix3d m = quat_to_rot(q).matrix();
  // C = Rz(c) Ry(b) Rx(a): m(2,0) = -sin b, m(2,1) = cos b sin a,
  // m(2,2) = cos b cos a, m(1,0) = sin c cos b, m(0,0) = cos c cos b.
  double a, b, c;
  const double sb = -m(2, 0);
  if (std::abs(sb) < 1.0 - 1e-12) {
    b = std::asin(sb);
    a = std::atan2(m(2, 1), m(2, 2));
    c = std::atan2(m(1, 0), m(0, 0));
  } else {
    // Gimbal lock: only a +/- c is determined; pin a = 0.
    b = std::copysign(M_PI / 2.0, sb);
    a = 0.0;
    c = std::atan2(-m(0, 1), m(1, 1));
  }
  return Eigen::Vector3d(a, b, c) * (180.0 / M_PI);
}

double quat_angle_deg(const UnitQuaternion& a, const UnitQuaternion& b) {
  return quat_mul(a, b.conjugate()).angle() * (180.0 / M_PI);
}

}  // namespace imucal
