#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "core/actions.hpp"
#include "core/errors.hpp"
#include "testutil.hpp"

using namespace torquot;
using tqtest::Rng;
constexpr double kPi = std::numbers::pi;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(int(v.size()));
  int i = 0;
  for (double t : v) x[i++] = t;
  return x;
}
}  // namespace

TEST_CASE("weights (1,2): theta = pi flips plane 1 and fixes plane 2") {
  auto a = TorusAction::create(1, 2, 0, IntMatrix{{1, 2}});
  Eigen::MatrixXd R = a.rotation(vec({kPi}));
  Eigen::MatrixXd expect = Eigen::MatrixXd::Identity(4, 4);
  expect(0, 0) = expect(1, 1) = -1.0;
  CHECK((R - expect).norm() < 1e-12);
  CHECK((a.rotation(vec({0.0})) - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-15);
}

TEST_CASE("rotation is a homomorphism") {
  Rng rng(11);
  auto a = TorusAction::create(2, 3, 1, IntMatrix{{1, 0, 2}, {0, 1, -1}});
  for (int it = 0; it < 25; ++it) {
    Eigen::VectorXd t1 = tqtest::random_gaussian(2, rng);
    Eigen::VectorXd t2 = tqtest::random_gaussian(2, rng);
    Eigen::MatrixXd lhs = a.rotation(t1 + t2);
    Eigen::MatrixXd rhs = a.rotation(t1) * a.rotation(t2);
    CHECK((lhs - rhs).norm() < 1e-12);
    CHECK((a.rotation(t1).transpose() * a.rotation(t1) -
           Eigen::MatrixXd::Identity(a.m(), a.m()))
              .norm() < 1e-12);
  }
}

TEST_CASE("killing fields: planar rotation generator and frozen example") {
  auto rot2 = TorusAction::create(1, 1, 0, IntMatrix{{1}});
  Eigen::VectorXd v = rot2.killing_field(vec({1.0}), vec({0.3, -0.7}));
  CHECK(v[0] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(rot2.killing_field(vec({1.0}), vec({0.0, 0.0})).norm() == 0.0);

  auto teardrop = TorusAction::create(1, 2, 0, IntMatrix{{1, 2}});
  Eigen::VectorXd w = teardrop.killing_field(vec({1.0}), vec({1, 0, 1, 0}));
  CHECK((w - vec({0, 1, 0, 2})).norm() < 1e-15);
}

TEST_CASE("killing field is the derivative of the rotation flow") {
  Rng rng(13);
  auto a = TorusAction::create(2, 2, 1, IntMatrix{{1, 1}, {0, 3}});
  for (int it = 0; it < 10; ++it) {
    Eigen::VectorXd c = tqtest::random_gaussian(2, rng);
    Eigen::VectorXd x = tqtest::random_gaussian(a.m(), rng);
    double h = 1e-6;
    Eigen::VectorXd fd = (a.rotation(h * c) * x - a.rotation(-h * c) * x) / (2 * h);
    CHECK((fd - a.killing_field(c, x)).norm() < 1e-8 * (1 + x.norm()));
  }
}

TEST_CASE("vertical space dimensions") {
  auto teardrop = TorusAction::create(1, 2, 0, IntMatrix{{1, 2}});
  CHECK(teardrop.vertical_space(vec({1, 0, 1, 0})).cols() == 1);
  CHECK(teardrop.vertical_space(vec({0, 0, 0, 0})).cols() == 0);
  CHECK(teardrop.is_principal(vec({0, 0, 1, 0})));

  auto line = TorusAction::create(1, 1, 1, IntMatrix{{1}});
  CHECK(line.vertical_space(vec({0, 0, 5})).cols() == 0);  // fixed axis
  CHECK(!line.is_principal(vec({0, 0, 5})));
  Eigen::MatrixXd H = line.horizontal_space(vec({1, 0, 0}));
  CHECK(H.cols() == 2);
  CHECK((H.transpose() * line.killing_basis(vec({1, 0, 0}))).norm() < 1e-12);
}

TEST_CASE("vertical/horizontal frames are orthonormal complements") {
  Rng rng(17);
  auto a = TorusAction::create(2, 3, 0, IntMatrix{{1, 0, 1}, {0, 1, 1}});
  Eigen::VectorXd x = tqtest::random_gaussian(a.m(), rng);
  Eigen::MatrixXd V = a.vertical_space(x), H = a.horizontal_space(x);
  CHECK(V.cols() + H.cols() == a.m());
  CHECK((V.transpose() * V - Eigen::MatrixXd::Identity(V.cols(), V.cols())).norm() < 1e-12);
  CHECK((H.transpose() * H - Eigen::MatrixXd::Identity(H.cols(), H.cols())).norm() < 1e-12);
  CHECK((V.transpose() * H).norm() < 1e-12);
}

TEST_CASE("constructor rejects bad weight matrices") {
  CHECK_THROWS_WITH_AS(TorusAction::create(2, 2, 0, IntMatrix{{1, 2}, {2, 4}}),
                       doctest::Contains("rank"), Error);
  CHECK_THROWS_WITH_AS(TorusAction::create(2, 2, 0, IntMatrix{{1, 2}, {0, 0}}),
                       doctest::Contains("zero"), Error);
  CHECK_THROWS_AS(TorusAction::create(1, 2, 0, IntMatrix{{1}}), Error);
}

TEST_CASE("acting kernel factors and effective weights") {
  auto a = TorusAction::create(1, 2, 0, IntMatrix{{2, 4}});
  REQUIRE(a.kernel_factors().size() == 1);
  CHECK(a.kernel_factors()[0] == 2);
  CHECK(a.W_eff() == IntMatrix{{1, 2}});

  auto b = TorusAction::create(2, 2, 0, IntMatrix{{1, 1}, {0, 2}});
  REQUIRE(b.kernel_factors().size() == 1);
  CHECK(b.kernel_factors()[0] == 2);

  auto c = TorusAction::create(1, 2, 0, IntMatrix{{1, 2}});
  CHECK(c.kernel_factors().empty());
  CHECK(c.W_eff() == c.W());
}

TEST_CASE("close_group: half-turn, dihedral-8, and a non-closing rotation") {
  Eigen::MatrixXd half = -Eigen::MatrixXd::Identity(2, 2);
  CHECK(close_group(2, {half}).order() == 2);

  auto mirror = [](double phi) {
    Eigen::MatrixXd M(2, 2);
    M << std::cos(2 * phi), std::sin(2 * phi), std::sin(2 * phi), -std::cos(2 * phi);
    return M;
  };
  FiniteOrthGroup d4 = close_group(2, {mirror(0.0), mirror(kPi / 4)});
  CHECK(d4.order() == 8);

  Eigen::MatrixXd rot1(2, 2);
  rot1 << std::cos(1.0), -std::sin(1.0), std::sin(1.0), std::cos(1.0);
  CHECK_THROWS_AS(close_group(2, {rot1}, 1e-9, 256), Error);
  try {
    close_group(2, {rot1}, 1e-9, 256);
  } catch (const Error& e) {
    CHECK(e.name() == "not_closed");
    CHECK(e.cls() == ErrorClass::ResourceLimit);
  }
}

TEST_CASE("group element lists are validated") {
  Eigen::MatrixXd mx(2, 2);
  mx << 1, 0, 0, -1;
  FiniteOrthGroup g = group_from_elements(2, {Eigen::MatrixXd::Identity(2, 2), mx});
  CHECK(g.order() == 2);
  CHECK(g.find(mx) == 1);

  Eigen::MatrixXd rot(2, 2);
  rot << std::cos(kPi / 3), -std::sin(kPi / 3), std::sin(kPi / 3), std::cos(kPi / 3);
  CHECK_THROWS_AS(group_from_elements(2, {rot}), Error);  // missing powers

  Eigen::MatrixXd notorth = Eigen::MatrixXd::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(group_from_elements(2, {notorth}), Error);
}

TEST_CASE("extended actions require normalization") {
  auto teardrop = TorusAction::create(1, 2, 0, IntMatrix{{1, 2}});

  Eigen::VectorXd flip_diag(4);
  flip_diag << 1, -1, 1, -1;  // conjugation inverts both angles: stays in the torus
  FiniteOrthGroup ok = close_group(4, {Eigen::MatrixXd(flip_diag.asDiagonal())});
  CHECK_NOTHROW(make_extended(teardrop, ok));

  Eigen::VectorXd bad_diag(4);
  bad_diag << -1, 1, 1, 1;  // inverts plane 1 only: (-t, 2t) leaves the image
  FiniteOrthGroup bad = close_group(4, {Eigen::MatrixXd(bad_diag.asDiagonal())});
  CHECK_THROWS_AS(make_extended(teardrop, bad), Error);

  // -I on a single plane is a rotation by pi: commutes, always fine.
  Eigen::VectorXd pi_rot(4);
  pi_rot << -1, -1, 1, 1;
  FiniteOrthGroup okrot = close_group(4, {Eigen::MatrixXd(pi_rot.asDiagonal())});
  CHECK_NOTHROW(make_extended(teardrop, okrot));
}

TEST_CASE("trivial torus with k = 0 is allowed") {
  auto a = TorusAction::create(0, 0, 3, IntMatrix(0, 0));
  CHECK(a.m() == 3);
  Eigen::VectorXd empty(0);
  CHECK((a.rotation(empty) - Eigen::MatrixXd::Identity(3, 3)).norm() == 0.0);
  CHECK(a.vertical_space(vec({1, 2, 3})).cols() == 0);
}
