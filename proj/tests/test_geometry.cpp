#include <doctest.h>

#include <random>

#include "imucal/geometry.hpp"
#include "test_helpers.hpp"

using namespace imucal;

TEST_CASE("quat_to_rot identity and 90 degree z rotation") {
  CHECK((quat_to_rot(UnitQuaternion()).matrix() - Eigen::Matrix3d::Identity()).norm() ==
        doctest::Approx(0.0));

  const double s = std::sin(M_PI / 4), c = std::cos(M_PI / 4);
  const Eigen::Vector3d rotated = quat_to_rot(UnitQuaternion(0, 0, s, c)) * Eigen::Vector3d(1, 0, 0);
  CHECK((rotated - Eigen::Vector3d(0, 1, 0)).norm() < 1e-12);
}

TEST_CASE("quat_to_rot rejects non-normalized input") {
  CHECK_THROWS_AS(UnitQuaternion(0, 0, 0, 1.1), std::invalid_argument);
}

TEST_CASE("rotation matrices are orthonormal and multiplicative on random input") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const UnitQuaternion a = test::random_quat(rng);
    const UnitQuaternion b = test::random_quat(rng);
    const Eigen::Matrix3d ca = quat_to_rot(a).matrix();
    const Eigen::Matrix3d cb = quat_to_rot(b).matrix();
    CHECK((ca * ca.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((quat_to_rot(quat_mul(a, b)).matrix() - ca * cb).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("q and -q canonicalize to identical storage") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector4d v = test::random_quat(rng).coeffs();
    CHECK(UnitQuaternion::from_vector(v) == UnitQuaternion::from_vector(-v));
  }
}

TEST_CASE("skew matches the cross product definition") {
  Eigen::Matrix3d expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((skew({1, 2, 3}) - expected).norm() == doctest::Approx(0.0));
  CHECK(skew(Eigen::Vector3d::Zero()).norm() == doctest::Approx(0.0));

  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d v = test::random_vec3(rng);
    const Eigen::Vector3d u = test::random_vec3(rng);
    CHECK((skew(v) * u - v.cross(u)).norm() < 1e-14);
    CHECK((skew(v) * (skew(v) * u) - v.cross(v.cross(u))).norm() < 1e-13);
    CHECK((skew(v).transpose() + skew(v)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("quat_mul identity, angle addition, associativity") {
  const UnitQuaternion z45 = quat_exp({0, 0, M_PI / 4});
  const UnitQuaternion z90 = quat_exp({0, 0, M_PI / 2});
  CHECK(quat_mul(z45, UnitQuaternion()) == z45);
  CHECK((quat_mul(z45, z45).coeffs() - z90.coeffs()).norm() < 1e-15);

  std::mt19937_64 rng(10);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = test::random_quat(rng);
    const UnitQuaternion b = test::random_quat(rng);
    const UnitQuaternion c = test::random_quat(rng);
    CHECK((quat_mul(quat_mul(a, b), c).coeffs() - quat_mul(a, quat_mul(b, c)).coeffs()).norm() <
          1e-12);
  }
}

TEST_CASE("left and right operator matrices realize the Hamilton product") {
  CHECK((left_matrix(UnitQuaternion()) - Eigen::Matrix4d::Identity()).norm() ==
        doctest::Approx(0.0));
  CHECK((right_matrix(UnitQuaternion()) - Eigen::Matrix4d::Identity()).norm() ==
        doctest::Approx(0.0));

  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion a = test::random_quat(rng);
    const UnitQuaternion b = test::random_quat(rng);
    const Eigen::Vector4d prod = quat_mul(a, b).coeffs();
    const Eigen::Vector4d via_left = left_matrix(a) * b.coeffs();
    const Eigen::Vector4d via_right = right_matrix(b) * a.coeffs();
    CHECK((via_left - via_right).norm() < 1e-14);
    // The product canonicalizes the sign; compare up to sign.
    CHECK(std::min((via_left - prod).norm(), (via_left + prod).norm()) < 1e-14);
    CHECK((left_matrix(a) * UnitQuaternion().coeffs() - a.coeffs()).norm() < 1e-15);
  }
}

TEST_CASE("delta_quat formula, zero limit and composition") {
  const UnitQuaternion q = delta_quat({0, 0, M_PI}, 0.5);
  CHECK(q.z() == doctest::Approx(std::sin(M_PI / 4)).epsilon(1e-14));
  CHECK(q.w() == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-14));

  CHECK(delta_quat(Eigen::Vector3d::Zero(), 0.1) == UnitQuaternion());

  const Eigen::Vector3d omega(0.3, -1.1, 0.7);
  UnitQuaternion composed;
  for (int i = 0; i < 100; ++i) composed = quat_mul(delta_quat(omega, 0.01), composed);
  CHECK((composed.coeffs() - delta_quat(omega, 1.0).coeffs()).norm() < 1e-9);

  const UnitQuaternion split = quat_mul(delta_quat(omega, 0.4), delta_quat(omega, 0.6));
  CHECK((split.coeffs() - delta_quat(omega, 1.0).coeffs()).norm() < 1e-10);
}

TEST_CASE("euler xyz conversions reproduce the reference half-turn poses") {
  CHECK(euler_xyz_to_quat({0, 0, 0}) == UnitQuaternion());

  const UnitQuaternion half_x = euler_xyz_to_quat({180, 0, 0});
  CHECK((half_x.coeffs() - Eigen::Vector4d(1, 0, 0, 0)).norm() < 1e-15);

  for (const Eigen::Vector3d angles :
       {Eigen::Vector3d(180, 0, 0), Eigen::Vector3d(0, 180, 0), Eigen::Vector3d(0, 0, 180)}) {
    const UnitQuaternion q = euler_xyz_to_quat(angles);
    const UnitQuaternion back = euler_xyz_to_quat(quat_to_euler_xyz(q));
    CHECK(quat_angle_deg(q, back) < 1e-9);
  }

  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion q = test::random_quat(rng);
    const UnitQuaternion back = euler_xyz_to_quat(quat_to_euler_xyz(q));
    CHECK(quat_angle_deg(q, back) < 1e-7);
  }
}
