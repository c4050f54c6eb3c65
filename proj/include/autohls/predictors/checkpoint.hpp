// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "autohls/predictors/baselines.hpp"
#include "autohls/predictors/mlp.hpp"
#include "autohls/predictors/qnn.hpp"
#include "json.hpp"

namespace autohls::ml {

using PredictorModel = std::variant<MlpModel, QnnModel, BaselineModel>;

inline constexpr int kCheckpointVersion = 1;

nlohmann::json model_to_json(const PredictorModel& model);
// Throws ConfigError on a foreign format, a version mismatch or bad shapes.
PredictorModel model_from_json(const nlohmann::json& j);
void save_model(const PredictorModel& model, const std::filesystem::path& path);
PredictorModel load_model(const std::filesystem::path& path);
std::string model_kind(const PredictorModel& model);

// Model families usable as a failure gate.
enum class PredictorKind { Mlp, Qnn, LogReg, Svm };
PredictorKind parse_predictor_kind(std::string_view name);
std::string_view to_string(PredictorKind kind);

struct PredictorTraining {
  std::size_t epochs = 100;
  double lr = 0.05;
  std::size_t batch = 32;
  bool class_weighting = true;
  BaselineParams baseline;
};

// Wraps a trained classifier; the model output is P(success) and the gate
// consumes its complement.
class FailurePredictor {
 public:
  FailurePredictor() = default;
  explicit FailurePredictor(PredictorModel model);
  static FailurePredictor train(PredictorKind kind, const Dataset& data, const PredictorTraining& training,
                                std::uint64_t seed);

  double success_probability(std::span<const double> x) const;
  double failure_probability(std::span<const double> x) const { return 1.0 - success_probability(x); }
  std::vector<double> success_scores(const Dataset& data) const;
  const PredictorModel& model() const { return model_; }

 private:
  PredictorModel model_;
};

}  // namespace autohls::ml
