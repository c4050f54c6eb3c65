// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "autohls/predictors/dataset.hpp"

namespace autohls::ml {

// Five-qubit statevector; qubit q is bit q of the basis index.
inline constexpr std::size_t kQubits = 5;
inline constexpr std::size_t kStateDim = std::size_t{1} << kQubits;
inline constexpr std::size_t kBlocks = 3;
inline constexpr std::size_t kAnglesPerQubit = 3;
inline constexpr std::size_t kRotationParams = kBlocks * kQubits * kAnglesPerQubit;  // 45
inline constexpr std::size_t kEncoderArity = 6;
inline constexpr std::size_t kEncodedInputs = 3;
inline constexpr std::size_t kReadoutParams = 3;

using Amplitude = std::complex<double>;
using StateVector = std::array<Amplitude, kStateDim>;
using Gate2x2 = std::array<Amplitude, 4>;  // row-major

Gate2x2 rz_gate(double angle);
Gate2x2 ry_gate(double angle);

void apply_single_qubit(StateVector& psi, const Gate2x2& u, std::size_t qubit);
void apply_cz(StateVector& psi, std::size_t control, std::size_t target);
double expectation_z(const StateVector& psi, std::size_t qubit);
double norm(const StateVector& psi);

// Data re-uploading variational classifier. Each block applies, per qubit q,
// RZ(phi0) RY(phi1) RZ(phi2) with phi_k = theta[b][q][k] + w[j] * x~[j],
// j = (3q + k) mod 6 and x~ the input cyclically extended to six entries,
// followed by a ring of CZ gates (q, q+1 mod 5).
struct QnnModel {
  std::array<double, kRotationParams> theta{};  // [block][qubit][angle]
  std::array<double, kEncoderArity> encoding{};
  // logit = readout[0] * <Z0> + readout[1] * <Z1> + readout[2]
  std::array<double, kReadoutParams> readout{1.0, 0.0, 0.0};

  static constexpr std::size_t trainable_parameter_count() {
    return kRotationParams + kEncoderArity + kReadoutParams;
  }
  static QnnModel create(std::uint64_t seed);

  std::vector<double> parameters() const;  // theta, encoding, readout
  void set_parameters(std::span<const double> flat);
};

// Gate angles (45, circuit order) for input x.
std::array<double, kRotationParams> gate_angles(const QnnModel& m, std::span<const double> x);
// x~[j]: the first kEncodedInputs features repeated cyclically (zero for empty x).
double encoded_feature(std::span<const double> x, std::size_t j);

using GateObserver = std::function<void(const StateVector&)>;

// Runs the circuit from |00000> with explicit per-gate angles; the observer
// (if any) sees the state after every gate.
StateVector run_circuit(std::span<const double, kRotationParams> angles,
                        const GateObserver& observer = {});

// <Z0> of the final state.
double qnn_expectation(const QnnModel& m, std::span<const double> x);
// sigmoid(readout affine of <Z0>, <Z1>), i.e. P(success).
double qnn_predict(const QnnModel& m, std::span<const double> x);

// d<Z_q>/d angle_g for every gate by the parameter-shift rule.
struct ShiftGradients {
  double z0 = 0.0;
  double z1 = 0.0;
  std::array<double, kRotationParams> dz0{};
  std::array<double, kRotationParams> dz1{};
};
ShiftGradients parameter_shift(std::span<const double, kRotationParams> angles);

// Weighted cross-entropy loss of a batch and its gradient in parameters() order.
double qnn_loss_and_gradient(const QnnModel& m, const Dataset& data, std::span<const std::size_t> rows,
                             std::span<const double> weights, std::vector<double>& grad);

struct QnnTrainOptions {
  std::size_t epochs = 100;
  double lr = 0.05;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  bool class_weighting = true;
};

struct QnnTrainResult {
  QnnModel model;
  std::vector<double> epoch_loss;
};

QnnTrainResult qnn_train(const Dataset& data, const QnnTrainOptions& options);

}  // namespace autohls::ml
