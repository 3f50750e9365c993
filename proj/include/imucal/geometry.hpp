#pragma once

#include <Eigen/Dense>

namespace imucal {

/// Unit quaternion, Hamilton convention, stored as [x, y, z, w] (vector part
/// first). Every constructor renormalizes and canonicalizes the sign so that
/// w >= 0 (and if w == 0, the first nonzero of x, y, z is >= 0); q and -q
/// therefore compare equal component-wise.
class UnitQuaternion {
 public:
  /// Identity rotation.
  UnitQuaternion() : xyzw_(0.0, 0.0, 0.0, 1.0) {}

  /// From components; throws std::invalid_argument if the norm deviates from
  /// 1 by more than 1e-9.
  UnitQuaternion(double x, double y, double z, double w);

  /// Normalizes an arbitrary nonzero 4-vector (used e.g. for eigenvector
  /// output); throws std::invalid_argument on a near-zero vector.
  static UnitQuaternion from_vector(const Eigen::Vector4d& xyzw);

  double x() const { return xyzw_[0]; }
  double y() const { return xyzw_[1]; }
  double z() const { return xyzw_[2]; }
  double w() const { return xyzw_[3]; }
  Eigen::Vector3d vec() const { return xyzw_.head<3>(); }
  const Eigen::Vector4d& coeffs() const { return xyzw_; }

  UnitQuaternion conjugate() const;

  /// Rotation angle in [0, pi], radians.
  double angle() const;

  bool operator==(const UnitQuaternion& other) const { return xyzw_ == other.xyzw_; }

 private:
  Eigen::Vector4d xyzw_;

  void normalize_and_canonicalize();
};

/// Proper rotation matrix. Validates orthonormality (1e-10) and det = +1
/// (1e-10) on construction from a raw matrix.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Eigen::Matrix3d::Identity()) {}
  explicit RotationMatrix(const Eigen::Matrix3d& m);

  const Eigen::Matrix3d& matrix() const { return m_; }
  operator const Eigen::Matrix3d&() const { return m_; }

  Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

 private:
  struct Unchecked {};
  RotationMatrix(const Eigen::Matrix3d& m, Unchecked) : m_(m) {}
  Eigen::Matrix3d m_;

  friend RotationMatrix quat_to_rot(const UnitQuaternion&);
};

/// C(q): ^B p = C(^B_A q) ^A p. C(q) == C(-q).
RotationMatrix quat_to_rot(const UnitQuaternion& q);

/// skew(v) u = v x u.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Hamilton product a (x) b, so that C(a (x) b) = C(a) C(b).
UnitQuaternion quat_mul(const UnitQuaternion& a, const UnitQuaternion& b);

/// Left operator matrix: L(a) b = a (x) b on [x,y,z,w] 4-vectors.
Eigen::Matrix4d left_matrix(const UnitQuaternion& q);
/// Right operator matrix: R(b) a = a (x) b on [x,y,z,w] 4-vectors.
Eigen::Matrix4d right_matrix(const UnitQuaternion& q);

/// Rotation of the sensor frame from t_k to t_{k+1} under constant angular
/// velocity omega over dt: [ (omega/|omega|) sin(|omega| dt / 2),
/// cos(|omega| dt / 2) ]. Below 1e-8 rad total angle the first-order limit
/// (omega dt / 2, 1) is used.
UnitQuaternion delta_quat(const Eigen::Vector3d& omega, double dt);

/// Exponential of a rotation vector phi (angle |phi| about phi/|phi|);
/// C(quat_exp(phi)) is the matrix exponential of skew(phi).
UnitQuaternion quat_exp(const Eigen::Vector3d& phi);

/// Quaternion for intrinsic XYZ Euler angles in degrees: rotations applied
/// X then Y then Z, i.e. C(q) = Rz(c) Ry(b) Rx(a) for input (a, b, c).
UnitQuaternion euler_xyz_to_quat(const Eigen::Vector3d& angles_deg);

/// Inverse of euler_xyz_to_quat; returns (a, b, c) in degrees with
/// b in [-90, 90]. Used for reporting only.
Eigen::Vector3d quat_to_euler_xyz(const UnitQuaternion& q);

/// Angle of the relative rotation between two quaternions, degrees.
double quat_angle_deg(const UnitQuaternion& a, const UnitQuaternion& b);

}  // namespace imucal
