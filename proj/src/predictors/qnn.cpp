// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/qnn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace autohls::ml {

Gate2x2 rz_gate(double angle) {
  const Amplitude e = std::polar(1.0, -angle / 2.0);
  return {e, 0.0, 0.0, std::conj(e)};
}

Gate2x2 ry_gate(double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  return {c, -s, s, c};
}

void apply_single_qubit(StateVector& psi, const Gate2x2& u, std::size_t qubit) {
  const std::size_t bit = std::size_t{1} << qubit;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if (i & bit) continue;
    const Amplitude a0 = psi[i];
    const Amplitude a1 = psi[i | bit];
    psi[i] = u[0] * a0 + u[1] * a1;
    psi[i | bit] = u[2] * a0 + u[3] * a1;
  }
}

void apply_cz(StateVector& psi, std::size_t control, std::size_t target) {
  const std::size_t mask = (std::size_t{1} << control) | (std::size_t{1} << target);
  for (std::size_t i = 0; i < kStateDim; ++i) {
    if ((i & mask) == mask) psi[i] = -psi[i];
  }
}

double expectation_z(const StateVector& psi, std::size_t qubit) {
  double e = 0.0;
  for (std::size_t i = 0; i < kStateDim; ++i) {
    e += std::norm(psi[i]) * (((i >> qubit) & 1U) ? -1.0 : 1.0);
  }
  return e;
}

double norm(const StateVector& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return std::sqrt(s);
}

QnnModel QnnModel::create(std::uint64_t seed) {
  QnnModel m;
  Rng rng(seed);
  for (auto& t : m.theta) t = (2.0 * uniform01(rng) - 1.0) * std::numbers::pi;
  m.encoding.fill(1.0);
  return m;
}

std::vector<double> QnnModel::parameters() const {
  std::vector<double> p(theta.begin(), theta.end());
  p.insert(p.end(), encoding.begin(), encoding.end());
  p.insert(p.end(), readout.begin(), readout.end());
  return p;
}

void QnnModel::set_parameters(std::span<const double> flat) {
  if (flat.size() != trainable_parameter_count()) throw ContractError("qnn parameter vector size mismatch");
  std::copy_n(flat.begin(), kRotationParams, theta.begin());
  std::copy_n(flat.begin() + kRotationParams, kEncoderArity, encoding.begin());
  std::copy_n(flat.begin() + kRotationParams + kEncoderArity, kReadoutParams, readout.begin());
}

double encoded_feature(std::span<const double> x, std::size_t j) {
  if (x.empty()) return 0.0;
  return x[j % std::min(x.size(), kEncodedInputs)];
}

namespace {
std::size_t encoder_slot(std::size_t q, std::size_t k) { return (kAnglesPerQubit * q + k) % kEncoderArity; }
}  // namespace

std::array<double, kRotationParams> gate_angles(const QnnModel& m, std::span<const double> x) {
  std::array<double, kRotationParams> a{};
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t q = 0; q < kQubits; ++q) {
      for (std::size_t k = 0; k < kAnglesPerQubit; ++k) {
        const std::size_t g = (b * kQubits + q) * kAnglesPerQubit + k;
        const std::size_t j = encoder_slot(q, k);
        a[g] = m.theta[g] + m.encoding[j] * encoded_feature(x, j);
      }
    }
  }
  return a;
}

StateVector run_circuit(std::span<const double, kRotationParams> angles, const GateObserver& observer) {
  StateVector psi{};
  psi[0] = 1.0;
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t q = 0; q < kQubits; ++q) {
      const std::size_t g = (b * kQubits + q) * kAnglesPerQubit;
      apply_single_qubit(psi, rz_gate(angles[g]), q);
      if (observer) observer(psi);
      apply_single_qubit(psi, ry_gate(angles[g + 1]), q);
      if (observer) observer(psi);
      apply_single_qubit(psi, rz_gate(angles[g + 2]), q);
      if (observer) observer(psi);
    }
    for (std::size_t q = 0; q < kQubits; ++q) {
      apply_cz(psi, q, (q + 1) % kQubits);
      if (observer) observer(psi);
    }
  }
  return psi;
}

double qnn_expectation(const QnnModel& m, std::span<const double> x) {
  const auto a = gate_angles(m, x);
  return expectation_z(run_circuit(a), 0);
}

double qnn_predict(const QnnModel& m, std::span<const double> x) {
  const auto a = gate_angles(m, x);
  const auto psi = run_circuit(a);
  return sigmoid(m.readout[0] * expectation_z(psi, 0) + m.readout[1] * expectation_z(psi, 1) + m.readout[2]);
}

ShiftGradients parameter_shift(std::span<const double, kRotationParams> angles) {
  ShiftGradients g;
  const auto psi = run_circuit(angles);
  g.z0 = expectation_z(psi, 0);
  g.z1 = expectation_z(psi, 1);
  std::array<double, kRotationParams> shifted{};
  std::copy(angles.begin(), angles.end(), shifted.begin());
  constexpr double kShift = std::numbers::pi / 2.0;
  for (std::size_t i = 0; i < kRotationParams; ++i) {
    shifted[i] = angles[i] + kShift;
    const auto plus = run_circuit(shifted);
    shifted[i] = angles[i] - kShift;
    const auto minus = run_circuit(shifted);
    shifted[i] = angles[i];
    g.dz0[i] = 0.5 * (expectation_z(plus, 0) - expectation_z(minus, 0));
    g.dz1[i] = 0.5 * (expectation_z(plus, 1) - expectation_z(minus, 1));
  }
  return g;
}

double qnn_loss_and_gradient(const QnnModel& m, const Dataset& data, std::span<const std::size_t> rows,
                             std::span<const double> weights, std::vector<double>& grad) {
  grad.assign(QnnModel::trainable_parameter_count(), 0.0);
  if (rows.size() != weights.size()) throw ContractError("qnn batch weights mismatch");
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(wsum > 0.0)) throw ContractError("sample weights must sum to a positive value");
  double loss = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto x = data.row(rows[r]);
    const double y = data.y[rows[r]];
    const auto angles = gate_angles(m, x);
    const auto sg = parameter_shift(angles);
    const double logit = m.readout[0] * sg.z0 + m.readout[1] * sg.z1 + m.readout[2];
    loss += weights[r] * (softplus(logit) - y * logit);
    const double dlogit = weights[r] * (sigmoid(logit) - y) / wsum;
    for (std::size_t g = 0; g < kRotationParams; ++g) {
      const double dangle = dlogit * (m.readout[0] * sg.dz0[g] + m.readout[1] * sg.dz1[g]);
      grad[g] += dangle;
      const std::size_t q = (g / kAnglesPerQubit) % kQubits;
      const std::size_t j = encoder_slot(q, g % kAnglesPerQubit);
      grad[kRotationParams + j] += dangle * encoded_feature(x, j);
    }
    grad[kRotationParams + kEncoderArity + 0] += dlogit * sg.z0;
    grad[kRotationParams + kEncoderArity + 1] += dlogit * sg.z1;
    grad[kRotationParams + kEncoderArity + 2] += dlogit;
  }
  return loss / wsum;
}

QnnTrainResult qnn_train(const Dataset& data, const QnnTrainOptions& opt) {
  data.validate(Task::Classification);
  if (opt.batch < 1) throw ContractError("qnn batch size must be >= 1");
  QnnTrainResult result;
  result.model = QnnModel::create(derive_seed(opt.seed, 1));
  const std::vector<double> weights =
      opt.class_weighting ? class_weights(data.y) : std::vector<double>(data.rows, 1.0);
  Rng rng(derive_seed(opt.seed, 2));
  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> params = result.model.parameters();
  std::vector<double> grad, wb;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch) {
      const std::size_t end = std::min(order.size(), start + opt.batch);
      const std::span<const std::size_t> rows(order.data() + start, end - start);
      wb.clear();
      for (const auto r : rows) wb.push_back(weights[r]);
      const double loss = qnn_loss_and_gradient(result.model, data, rows, wb, grad);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(epoch, "qnn training diverged at epoch " + std::to_string(epoch));
      }
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= opt.lr * grad[i];
      result.model.set_parameters(params);
      total += loss;
      ++batches;
    }
    result.epoch_loss.push_back(batches ? total / static_cast<double>(batches) : 0.0);
  }
  return result;
}

}  // namespace autohls::ml
