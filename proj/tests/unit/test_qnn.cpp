#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "autohls/common.hpp"
#include "autohls/predictors/metrics.hpp"
#include "autohls/predictors/qnn.hpp"
#include "doctest.h"

using namespace autohls;
using namespace autohls::ml;

namespace {

using Dense = Eigen::Matrix<std::complex<double>, 32, 32>;
using Mat2 = Eigen::Matrix2cd;

// Full-register operator for a one-qubit gate on `qubit` (bit q of the index).
Dense lift(const Mat2& g, std::size_t qubit) {
  Dense m = Dense::Zero();
  for (std::size_t r = 0; r < 32; ++r) {
    for (std::size_t c = 0; c < 32; ++c) {
      if ((r & ~(std::size_t{1} << qubit)) != (c & ~(std::size_t{1} << qubit))) continue;
      m(r, c) = g((r >> qubit) & 1, (c >> qubit) & 1);
    }
  }
  return m;
}

Dense cz(std::size_t a, std::size_t b) {
  Dense m = Dense::Identity();
  for (std::size_t i = 0; i < 32; ++i) {
    if (((i >> a) & 1) && ((i >> b) & 1)) m(i, i) = -1.0;
  }
  return m;
}

Mat2 rz(double t) {
  Mat2 m;
  m << std::exp(std::complex<double>(0, -t / 2)), 0, 0, std::exp(std::complex<double>(0, t / 2));
  return m;
}

Mat2 ry(double t) {
  Mat2 m;
  m << std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2);
  return m;
}

Eigen::Matrix<std::complex<double>, 32, 1> dense_state(const std::array<double, kRotationParams>& a) {
  Dense u = Dense::Identity();
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t q = 0; q < kQubits; ++q) {
      const std::size_t g = (b * kQubits + q) * 3;
      u = lift(rz(a[g + 2]) * ry(a[g + 1]) * rz(a[g]), q) * u;
    }
    for (std::size_t q = 0; q < kQubits; ++q) u = cz(q, (q + 1) % kQubits) * u;
  }
  Eigen::Matrix<std::complex<double>, 32, 1> psi = Eigen::Matrix<std::complex<double>, 32, 1>::Zero();
  psi(0) = 1.0;
  return u * psi;
}

double dense_z(const Eigen::Matrix<std::complex<double>, 32, 1>& psi, std::size_t q) {
  double z = 0;
  for (std::size_t i = 0; i < 32; ++i) z += std::norm(psi(i)) * (((i >> q) & 1) ? -1.0 : 1.0);
  return z;
}

std::array<double, kRotationParams> random_angles(Rng& rng) {
  std::array<double, kRotationParams> a{};
  for (auto& v : a) v = (2 * uniform01(rng) - 1) * std::numbers::pi;
  return a;
}

}  // namespace

TEST_CASE("parameter budget") {
  CHECK(QnnModel::trainable_parameter_count() == 54);
  CHECK(QnnModel::create(1).parameters().size() == 54);
}

TEST_CASE("gates are unitary") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const double t = 10 * uniform01(rng) - 5;
    for (const auto& g : {rz_gate(t), ry_gate(t)}) {
      Mat2 m;
      m << g[0], g[1], g[2], g[3];
      CHECK((m.adjoint() * m - Mat2::Identity()).norm() < 1e-14);
    }
  }
}

TEST_CASE("trivial circuits") {
  std::array<double, kRotationParams> a{};
  CHECK(std::fabs(expectation_z(run_circuit(a), 0) - 1.0) < 1e-15);
  a[1] = std::numbers::pi;  // block 0, qubit 0, RY
  CHECK(std::fabs(expectation_z(run_circuit(a), 0) + 1.0) < 1e-12);
  QnnModel zero;
  zero.readout = {0.0, 0.0, 0.0};
  const std::vector<double> x{0.3, 0.6, 0.9};
  CHECK(qnn_predict(zero, x) == 0.5);
  CHECK(qnn_expectation(zero, x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("norm stays at one after every gate") {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_angles(rng);
    std::size_t gates = 0;
    double worst = 0;
    run_circuit(a, [&](const StateVector& psi) {
      ++gates;
      worst = std::max(worst, std::fabs(norm(psi) - 1.0));
    });
    CHECK(gates == kBlocks * kQubits * 4);
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("statevector matches a dense unitary simulation") {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto a = random_angles(rng);
    const auto psi = run_circuit(a);
    const auto ref = dense_state(a);
    for (std::size_t k = 0; k < 32; ++k) CHECK(std::abs(psi[k] - ref(k)) < 1e-10);
    CHECK(std::fabs(expectation_z(psi, 0) - dense_z(ref, 0)) < 1e-10);
    CHECK(std::fabs(expectation_z(psi, 1) - dense_z(ref, 1)) < 1e-10);
  }
}

TEST_CASE("encoder uses the first three features cyclically") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
  for (std::size_t j = 0; j < 6; ++j) CHECK(encoded_feature(x, j) == x[j % 3]);
  const std::vector<double> two{0.25, 0.75};
  CHECK(encoded_feature(two, 2) == 0.25);
  CHECK(encoded_feature(std::vector<double>{}, 4) == 0.0);

  Rng rng(4);
  auto m = QnnModel::create(5);
  const auto angles = gate_angles(m, x);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t q = 0; q < kQubits; ++q) {
      for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t g = (b * kQubits + q) * 3 + k;
        const std::size_t j = (3 * q + k) % 6;
        CHECK(angles[g] == doctest::Approx(m.theta[g] + m.encoding[j] * x[j % 3]).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("parameter shift matches central differences") {
  Rng rng(5);
  const double h = 1e-5;
  for (int cfg = 0; cfg < 20; ++cfg) {
    auto a = random_angles(rng);
    const auto sg = parameter_shift(a);
    double worst = 0;
    for (std::size_t g = 0; g < kRotationParams; ++g) {
      auto up = a, down = a;
      up[g] += h;
      down[g] -= h;
      const auto su = run_circuit(up), sd = run_circuit(down);
      const double fd0 = (expectation_z(su, 0) - expectation_z(sd, 0)) / (2 * h);
      const double fd1 = (expectation_z(su, 1) - expectation_z(sd, 1)) / (2 * h);
      worst = std::max({worst, std::fabs(fd0 - sg.dz0[g]), std::fabs(fd1 - sg.dz1[g])});
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("loss gradient over all 54 parameters") {
  Rng rng(6);
  Dataset d;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> x{uniform01(rng), uniform01(rng), uniform01(rng)};
    d.push_back(x, i % 2);
  }
  std::vector<std::size_t> rows(d.rows);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  const std::vector<double> w(d.rows, 1.0);
  for (int cfg = 0; cfg < 5; ++cfg) {
    auto m = QnnModel::create(100 + cfg);
    auto p = m.parameters();
    for (auto& v : p) v += 0.3 * (uniform01(rng) - 0.5);
    m.set_parameters(p);
    std::vector<double> grad, scratch;
    qnn_loss_and_gradient(m, d, rows, w, grad);
    REQUIRE(grad.size() == 54);
    for (std::size_t i = 0; i < 54; ++i) {
      const double h = 1e-5;
      auto q = p;
      q[i] += h;
      m.set_parameters(q);
      const double up = qnn_loss_and_gradient(m, d, rows, w, scratch);
      q[i] -= 2 * h;
      m.set_parameters(q);
      const double down = qnn_loss_and_gradient(m, d, rows, w, scratch);
      CHECK(std::fabs((up - down) / (2 * h) - grad[i]) <= 1e-6);
    }
    m.set_parameters(p);
  }
}

TEST_CASE("training") {
  Rng rng(7);
  Dataset xor_set;
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x{uniform01(rng), uniform01(rng)};
    xor_set.push_back(x, (x[0] > 0.5) != (x[1] > 0.5) ? 1.0 : 0.0);
  }
  QnnTrainOptions o;
  o.lr = 0.0;
  o.epochs = 2;
  o.seed = 3;
  CHECK(qnn_train(xor_set, o).model.parameters() == QnnModel::create(derive_seed(3, 1)).parameters());

  o.lr = 0.1;
  o.epochs = 150;
  const auto r = qnn_train(xor_set, o);
  std::vector<double> scores;
  for (std::size_t i = 0; i < xor_set.rows; ++i) scores.push_back(qnn_predict(r.model, xor_set.row(i)));
  CHECK(accuracy(scores, xor_set.y) >= 0.9);
  CHECK(qnn_train(xor_set, o).model.parameters() == r.model.parameters());
}
