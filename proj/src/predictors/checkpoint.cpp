// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace autohls::ml {

using nlohmann::json;

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

json eigen_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd to_eigen(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string_view task_name(Task t) { return t == Task::Classification ? "classification" : "regression"; }

Task parse_task(const std::string& s) {
  if (s == "classification") return Task::Classification;
  if (s == "regression") return Task::Regression;
  throw ConfigError("unknown task '" + s + "'");
}

json mlp_json(const MlpModel& m) {
  json dense = json::array();
  for (const auto& L : m.dense()) {
    dense.push_back({{"in", L.in}, {"out", L.out}, {"weight", L.weight}, {"bias", L.bias}});
  }
  json bn = json::array();
  for (const auto& B : m.batch_norm()) {
    bn.push_back({{"width", B.width},
                  {"gamma", B.gamma},
                  {"beta", B.beta},
                  {"running_mean", B.running_mean},
                  {"running_var", B.running_var},
                  {"momentum", B.momentum},
                  {"eps", B.eps}});
  }
  return {{"task", task_name(m.task())},
          {"dropout", m.dropout()},
          {"target_mean", m.target_mean()},
          {"target_scale", m.target_scale()},
          {"dense", dense},
          {"batch_norm", bn}};
}

MlpModel mlp_from(const json& j) {
  std::vector<DenseLayer> dense;
  for (const auto& d : j.at("dense")) {
    dense.push_back({d.at("in").get<std::size_t>(), d.at("out").get<std::size_t>(),
                     d.at("weight").get<std::vector<double>>(), d.at("bias").get<std::vector<double>>()});
  }
  std::vector<BatchNormLayer> bn;
  for (const auto& b : j.at("batch_norm")) {
    BatchNormLayer B;
    B.width = b.at("width").get<std::size_t>();
    B.gamma = b.at("gamma").get<std::vector<double>>();
    B.beta = b.at("beta").get<std::vector<double>>();
    B.running_mean = b.at("running_mean").get<std::vector<double>>();
    B.running_var = b.at("running_var").get<std::vector<double>>();
    B.momentum = b.at("momentum").get<double>();
    B.eps = b.at("eps").get<double>();
    bn.push_back(std::move(B));
  }
  return MlpModel::from_parts(parse_task(j.at("task").get<std::string>()), j.at("dropout").get<double>(),
                              std::move(dense), std::move(bn), j.at("target_mean").get<double>(),
                              j.at("target_scale").get<double>());
}

json qnn_json(const QnnModel& m) {
  return {{"qubits", kQubits}, {"blocks", kBlocks}, {"theta", m.theta}, {"encoding", m.encoding},
          {"readout", m.readout}};
}

QnnModel qnn_from(const json& j) {
  if (j.at("qubits").get<std::size_t>() != kQubits || j.at("blocks").get<std::size_t>() != kBlocks) {
    throw ConfigError("qnn checkpoint layout does not match this build");
  }
  QnnModel m;
  const auto theta = j.at("theta").get<std::vector<double>>();
  const auto enc = j.at("encoding").get<std::vector<double>>();
  const auto ro = j.at("readout").get<std::vector<double>>();
  if (theta.size() != kRotationParams || enc.size() != kEncoderArity || ro.size() != kReadoutParams) {
    throw ConfigError("qnn checkpoint has wrong parameter counts");
  }
  std::copy(theta.begin(), theta.end(), m.theta.begin());
  std::copy(enc.begin(), enc.end(), m.encoding.begin());
  std::copy(ro.begin(), ro.end(), m.readout.begin());
  return m;
}

json baseline_json(const BaselineModel& m) {
  json j{{"family", to_string(m.kind)}, {"weights", eigen_vector(m.weights)}, {"bias", m.bias}};
  if (m.kind == BaselineKind::Krr) {
    j["kernel"] = m.kernel == KrrKernel::Rbf ? "rbf" : "linear";
    j["rbf_gamma"] = m.rbf_gamma;
    j["dual"] = eigen_vector(m.dual);
    j["train_rows"] = m.train_x.rows();
    j["train_cols"] = m.train_x.cols();
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < m.train_x.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.train_x.cols(); ++c) flat.push_back(m.train_x(r, c));
    }
    j["train_x"] = flat;
  }
  if (m.kind == BaselineKind::BayesRidge) {
    j["alpha"] = m.alpha;
    j["lambda"] = m.lambda;
  }
  return j;
}

BaselineModel baseline_from(const json& j) {
  BaselineModel m;
  m.kind = parse_baseline_kind(j.at("family").get<std::string>());
  m.weights = to_eigen(j.at("weights"));
  m.bias = j.at("bias").get<double>();
  if (m.kind == BaselineKind::Krr) {
    const auto k = j.at("kernel").get<std::string>();
    if (k != "rbf" && k != "linear") throw ConfigError("unknown krr kernel '" + k + "'");
    m.kernel = k == "rbf" ? KrrKernel::Rbf : KrrKernel::Linear;
    m.rbf_gamma = j.at("rbf_gamma").get<double>();
    m.dual = to_eigen(j.at("dual"));
    const auto rows = j.at("train_rows").get<Eigen::Index>();
    const auto cols = j.at("train_cols").get<Eigen::Index>();
    const auto flat = j.at("train_x").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols || m.dual.size() != rows) {
      throw ConfigError("krr checkpoint shape mismatch");
    }
    m.train_x.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m.train_x(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    }
  }
  if (m.kind == BaselineKind::BayesRidge) {
    m.alpha = j.at("alpha").get<double>();
    m.lambda = j.at("lambda").get<double>();
  }
  return m;
}

}  // namespace

std::string model_kind(const PredictorModel& model) {
  return std::visit(Overloaded{[](const MlpModel&) { return std::string("mlp"); },
                               [](const QnnModel&) { return std::string("qnn"); },
                               [](const BaselineModel& b) { return std::string(to_string(b.kind)); }},
                    model);
}

json model_to_json(const PredictorModel& model) {
  json body = std::visit(Overloaded{[](const MlpModel& m) { return mlp_json(m); },
                                    [](const QnnModel& m) { return qnn_json(m); },
                                    [](const BaselineModel& m) { return baseline_json(m); }},
                         model);
  return {{"format", "autohls-model"}, {"version", kCheckpointVersion}, {"kind", model_kind(model)},
          {"model", body}};
}

PredictorModel model_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "autohls-model") {
      throw ConfigError("not an autohls model checkpoint");
    }
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ConfigError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kCheckpointVersion) + ")");
    }
    const auto kind = j.at("kind").get<std::string>();
    const auto& body = j.at("model");
    if (kind == "mlp") return mlp_from(body);
    if (kind == "qnn") return qnn_from(body);
    return baseline_from(body);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model checkpoint: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("invalid model checkpoint: ") + e.what());
  }
}

void save_model(const PredictorModel& model, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp);
    out << model_to_json(model).dump(1) << '\n';
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PredictorModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

PredictorKind parse_predictor_kind(std::string_view name) {
  if (name == "mlp") return PredictorKind::Mlp;
  if (name == "qnn") return PredictorKind::Qnn;
  if (name == "logreg") return PredictorKind::LogReg;
  if (name == "svm") return PredictorKind::Svm;
  throw ConfigError("unknown predictor '" + std::string(name) + "' (expected mlp, qnn, logreg or svm)");
}

std::string_view to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::Mlp: return "mlp";
    case PredictorKind::Qnn: return "qnn";
    case PredictorKind::LogReg: return "logreg";
    case PredictorKind::Svm: return "svm";
  }
  return "?";
}

FailurePredictor::FailurePredictor(PredictorModel model) : model_(std::move(model)) {
  if (const auto* m = std::get_if<MlpModel>(&model_); m && m->task() != Task::Classification) {
    throw ContractError("failure predictor needs a classification model");
  }
  if (const auto* b = std::get_if<BaselineModel>(&model_); b && !is_classifier(b->kind)) {
    throw ContractError("failure predictor needs a classifier, got " + std::string(to_string(b->kind)));
  }
}

FailurePredictor FailurePredictor::train(PredictorKind kind, const Dataset& data, const PredictorTraining& t,
                                         std::uint64_t seed) {
  switch (kind) {
    case PredictorKind::Mlp: {
      MlpTrainOptions o;
      o.epochs = t.epochs;
      o.lr = t.lr;
      o.batch = t.batch;
      o.seed = seed;
      o.class_weighting = t.class_weighting;
      return FailurePredictor(mlp_train(data, Task::Classification, o).model);
    }
    case PredictorKind::Qnn: {
      QnnTrainOptions o;
      o.epochs = t.epochs;
      o.lr = t.lr;
      o.batch = t.batch;
      o.seed = seed;
      o.class_weighting = t.class_weighting;
      return FailurePredictor(qnn_train(data, o).model);
    }
    case PredictorKind::LogReg:
    case PredictorKind::Svm: {
      BaselineParams p = t.baseline;
      p.class_weighting = t.class_weighting;
      return FailurePredictor(
          fit_baseline(data, kind == PredictorKind::LogReg ? BaselineKind::LogReg : BaselineKind::Svm, p));
    }
  }
  throw ContractError("unhandled predictor kind");
}

double FailurePredictor::success_probability(std::span<const double> x) const {
  return std::visit(Overloaded{[&](const MlpModel& m) { return m.predict(x); },
                               [&](const QnnModel& m) { return qnn_predict(m, x); },
                               [&](const BaselineModel& m) { return m.probability(x); }},
                    model_);
}

std::vector<double> FailurePredictor::success_scores(const Dataset& data) const {
  std::vector<double> s(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) s[i] = success_probability(data.row(i));
  return s;
}

}  // namespace autohls::ml
