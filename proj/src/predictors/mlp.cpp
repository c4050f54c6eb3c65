// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "autohls/simd/kernels.hpp"

namespace autohls::ml {

namespace {

DenseLayer make_dense(std::size_t in, std::size_t out) {
  return DenseLayer{in, out, std::vector<double>(in * out, 0.0), std::vector<double>(out, 0.0)};
}

BatchNormLayer make_bn(std::size_t width) {
  BatchNormLayer bn;
  bn.width = width;
  bn.gamma.assign(width, 1.0);
  bn.beta.assign(width, 0.0);
  bn.running_mean.assign(width, 0.0);
  bn.running_var.assign(width, 1.0);
  return bn;
}

// out[b, o] = W[o] . in[b] + bias[o]
void dense_forward(const DenseLayer& L, std::span<const double> in, std::size_t rows,
                   std::vector<double>& out) {
  const auto& k = simd::active();
  out.resize(rows * L.out);
  for (std::size_t b = 0; b < rows; ++b) {
    const double* x = in.data() + b * L.in;
    for (std::size_t o = 0; o < L.out; ++o) {
      out[b * L.out + o] = k.dot_f64(L.weight.data() + o * L.in, x, L.in) + L.bias[o];
    }
  }
}

}  // namespace

MlpModel MlpModel::zeros(std::size_t input_dim, Task task, std::vector<std::size_t> hidden) {
  if (input_dim == 0 || hidden.empty()) throw ContractError("mlp needs input_dim >= 1 and a hidden layer");
  MlpModel m;
  m.task_ = task;
  std::size_t prev = input_dim;
  for (const auto h : hidden) {
    m.dense_.push_back(make_dense(prev, h));
    m.bn_.push_back(make_bn(h));
    prev = h;
  }
  m.dense_.push_back(make_dense(prev, 1));
  return m;
}

MlpModel MlpModel::create(std::size_t input_dim, Task task, std::uint64_t seed,
                          std::vector<std::size_t> hidden, double dropout) {
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ContractError("dropout must lie in [0, 1)");
  MlpModel m = zeros(input_dim, task, std::move(hidden));
  m.dropout_ = dropout;
  Rng rng(seed);
  for (auto& L : m.dense_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
    for (auto& w : L.weight) w = (2.0 * uniform01(rng) - 1.0) * limit;
  }
  return m;
}

MlpModel MlpModel::from_parts(Task task, double dropout, std::vector<DenseLayer> dense,
                              std::vector<BatchNormLayer> bn, double target_mean, double target_scale) {
  if (dense.size() != bn.size() + 1 || dense.empty()) throw ContractError("mlp layer count mismatch");
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const auto& L = dense[i];
    if (L.weight.size() != L.in * L.out || L.bias.size() != L.out) throw ContractError("mlp dense shape mismatch");
    if (i > 0 && dense[i - 1].out != L.in) throw ContractError("mlp layer widths do not chain");
    if (i < bn.size() && (bn[i].width != L.out || bn[i].gamma.size() != L.out || bn[i].beta.size() != L.out ||
                          bn[i].running_mean.size() != L.out || bn[i].running_var.size() != L.out)) {
      throw ContractError("mlp batch-norm shape mismatch");
    }
  }
  if (dense.back().out != 1) throw ContractError("mlp output layer must have width 1");
  MlpModel m;
  m.task_ = task;
  m.dropout_ = dropout;
  m.dense_ = std::move(dense);
  m.bn_ = std::move(bn);
  m.target_mean_ = target_mean;
  m.target_scale_ = target_scale;
  return m;
}

std::vector<std::size_t> MlpModel::widths() const {
  std::vector<std::size_t> w;
  if (dense_.empty()) return w;
  w.push_back(dense_.front().in);
  for (const auto& L : dense_) w.push_back(L.out);
  return w;
}

std::size_t MlpModel::trainable_parameter_count() const {
  std::size_t n = 0;
  for (const auto& L : dense_) n += L.weight.size() + L.bias.size();
  for (const auto& bn : bn_) n += bn.gamma.size() + bn.beta.size();
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> flat;
  flat.reserve(trainable_parameter_count());
  for (const auto& L : dense_) {
    flat.insert(flat.end(), L.weight.begin(), L.weight.end());
    flat.insert(flat.end(), L.bias.begin(), L.bias.end());
  }
  for (const auto& bn : bn_) {
    flat.insert(flat.end(), bn.gamma.begin(), bn.gamma.end());
    flat.insert(flat.end(), bn.beta.begin(), bn.beta.end());
  }
  return flat;
}

void MlpModel::set_parameters(std::span<const double> flat) {
  if (flat.size() != trainable_parameter_count()) throw ContractError("mlp parameter vector size mismatch");
  auto it = flat.begin();
  auto take = [&](std::vector<double>& dst) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
    it += static_cast<std::ptrdiff_t>(dst.size());
  };
  for (auto& L : dense_) {
    take(L.weight);
    take(L.bias);
  }
  for (auto& bn : bn_) {
    take(bn.gamma);
    take(bn.beta);
  }
}

double MlpModel::predict(std::span<const double> x) const {
  if (x.size() != input_dim()) {
    throw ContractError("mlp input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(input_dim()));
  }
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < bn_.size(); ++l) {
    dense_forward(dense_[l], a, 1, z);
    const auto& bn = bn_[l];
    for (std::size_t j = 0; j < bn.width; ++j) {
      const double u = bn.gamma[j] * (z[j] - bn.running_mean[j]) / std::sqrt(bn.running_var[j] + bn.eps) + bn.beta[j];
      z[j] = u > 0.0 ? u : 0.0;
    }
    a.swap(z);
  }
  dense_forward(dense_.back(), a, 1, z);
  if (task_ == Task::Classification) return sigmoid(z[0]);
  return z[0] * target_scale_ + target_mean_;
}

std::vector<double> MlpModel::predict_batch(const Dataset& data) const {
  std::vector<double> out(data.rows);
  for (std::size_t i = 0; i < data.rows; ++i) out[i] = predict(data.row(i));
  return out;
}

double MlpModel::loss_and_gradient(std::span<const double> batch, std::size_t rows,
                                   std::span<const double> targets, std::span<const double> weights,
                                   std::span<const double> keep, std::vector<double>& grad,
                                   bool update_running_stats) {
  const std::size_t H = bn_.size();
  const std::size_t d = input_dim();
  if (rows == 0 || batch.size() != rows * d || targets.size() != rows || weights.size() != rows) {
    throw ContractError("mlp batch shape mismatch");
  }
  const std::size_t last = dense_[H - 1].out;
  if (!keep.empty() && keep.size() != rows * last) throw ContractError("dropout mask shape mismatch");
  const auto& k = simd::active();
  const double B = static_cast<double>(rows);

  // Forward caches per hidden layer.
  std::vector<std::vector<double>> acts(H + 1);  // inputs to each dense layer
  std::vector<std::vector<double>> xhat(H), pre_relu(H), inv_std(H);
  acts[0].assign(batch.begin(), batch.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < H; ++l) {
    dense_forward(dense_[l], acts[l], rows, z);
    auto& bn = bn_[l];
    const std::size_t w = bn.width;
    xhat[l].resize(rows * w);
    pre_relu[l].resize(rows * w);
    inv_std[l].resize(w);
    acts[l + 1].resize(rows * w);
    for (std::size_t j = 0; j < w; ++j) {
      double mean = 0.0;
      for (std::size_t b = 0; b < rows; ++b) mean += z[b * w + j];
      mean /= B;
      double var = 0.0;
      for (std::size_t b = 0; b < rows; ++b) var += (z[b * w + j] - mean) * (z[b * w + j] - mean);
      var /= B;
      const double is = 1.0 / std::sqrt(var + bn.eps);
      inv_std[l][j] = is;
      for (std::size_t b = 0; b < rows; ++b) {
        const double xh = (z[b * w + j] - mean) * is;
        const double u = bn.gamma[j] * xh + bn.beta[j];
        xhat[l][b * w + j] = xh;
        pre_relu[l][b * w + j] = u;
        acts[l + 1][b * w + j] = u > 0.0 ? u : 0.0;
      }
      if (update_running_stats) {
        const double unbiased = rows > 1 ? var * B / (B - 1.0) : var;
        bn.running_mean[j] = (1.0 - bn.momentum) * bn.running_mean[j] + bn.momentum * mean;
        bn.running_var[j] = (1.0 - bn.momentum) * bn.running_var[j] + bn.momentum * unbiased;
      }
    }
  }
  const double keep_scale = dropout_ > 0.0 ? 1.0 / (1.0 - dropout_) : 1.0;
  std::vector<double> head_in = acts[H];
  if (!keep.empty()) {
    for (std::size_t i = 0; i < head_in.size(); ++i) head_in[i] *= keep[i] * keep_scale;
  }
  std::vector<double> out;
  dense_forward(dense_[H], head_in, rows, out);

  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(wsum > 0.0)) throw ContractError("sample weights must sum to a positive value");
  double loss = 0.0;
  std::vector<double> dout(rows);
  for (std::size_t b = 0; b < rows; ++b) {
    const double zb = out[b];
    if (task_ == Task::Classification) {
      loss += weights[b] * (softplus(zb) - targets[b] * zb);
      dout[b] = weights[b] * (sigmoid(zb) - targets[b]) / wsum;
    } else {
      const double t = (targets[b] - target_mean_) / target_scale_;
      loss += weights[b] * (zb - t) * (zb - t);
      dout[b] = weights[b] * 2.0 * (zb - t) / wsum;
    }
  }
  loss /= wsum;

  // Gradient buffers laid out like parameters().
  grad.assign(trainable_parameter_count(), 0.0);
  std::vector<std::size_t> w_off(H + 1), b_off(H + 1), g_off(H), be_off(H);
  std::size_t off = 0;
  for (std::size_t l = 0; l <= H; ++l) {
    w_off[l] = off;
    off += dense_[l].weight.size();
    b_off[l] = off;
    off += dense_[l].bias.size();
  }
  for (std::size_t l = 0; l < H; ++l) {
    g_off[l] = off;
    off += bn_[l].width;
    be_off[l] = off;
    off += bn_[l].width;
  }

  // Output layer.
  const auto& Lh = dense_[H];
  std::vector<double> da(rows * last, 0.0);
  for (std::size_t b = 0; b < rows; ++b) {
    k.axpy_f64(dout[b], head_in.data() + b * last, grad.data() + w_off[H], last);
    grad[b_off[H]] += dout[b];
    k.axpy_f64(dout[b], Lh.weight.data(), da.data() + b * last, last);
  }
  if (!keep.empty()) {
    for (std::size_t i = 0; i < da.size(); ++i) da[i] *= keep[i] * keep_scale;
  }

  for (std::size_t l = H; l-- > 0;) {
    const auto& bn = bn_[l];
    const std::size_t w = bn.width;
    std::vector<double> dz(rows * w);
    for (std::size_t j = 0; j < w; ++j) {
      double sum_dxh = 0.0, sum_dxh_xh = 0.0, dgamma = 0.0, dbeta = 0.0;
      for (std::size_t b = 0; b < rows; ++b) {
        const std::size_t i = b * w + j;
        const double du = pre_relu[l][i] > 0.0 ? da[i] : 0.0;
        dgamma += du * xhat[l][i];
        dbeta += du;
        const double dxh = du * bn.gamma[j];
        sum_dxh += dxh;
        sum_dxh_xh += dxh * xhat[l][i];
        dz[i] = dxh;
      }
      grad[g_off[l] + j] = dgamma;
      grad[be_off[l] + j] = dbeta;
      for (std::size_t b = 0; b < rows; ++b) {
        const std::size_t i = b * w + j;
        dz[i] = inv_std[l][j] / B * (B * dz[i] - sum_dxh - xhat[l][i] * sum_dxh_xh);
      }
    }
    const auto& L = dense_[l];
    std::vector<double> da_prev(l > 0 ? rows * L.in : 0, 0.0);
    for (std::size_t b = 0; b < rows; ++b) {
      for (std::size_t o = 0; o < L.out; ++o) {
        const double g = dz[b * w + o];
        if (g == 0.0) continue;
        k.axpy_f64(g, acts[l].data() + b * L.in, grad.data() + w_off[l] + o * L.in, L.in);
        grad[b_off[l] + o] += g;
        if (l > 0) k.axpy_f64(g, L.weight.data() + o * L.in, da_prev.data() + b * L.in, L.in);
      }
    }
    da.swap(da_prev);
  }
  return loss;
}

MlpTrainResult mlp_train(const Dataset& data, Task task, const MlpTrainOptions& opt) {
  data.validate(task);
  if (opt.batch < 2) throw ContractError("mlp batch size must be >= 2 for batch normalization");
  MlpTrainResult result;
  result.model = MlpModel::create(data.cols, task, derive_seed(opt.seed, 1), opt.hidden, opt.dropout);
  auto& model = result.model;
  if (task == Task::Regression) {
    const double mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(data.rows);
    double var = 0.0;
    for (const double v : data.y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(data.rows));
    model.set_target_scaling(mean, sd > 0.0 ? sd : 1.0);
  }
  const std::vector<double> weights = task == Task::Classification && opt.class_weighting
                                          ? class_weights(data.y)
                                          : std::vector<double>(data.rows, 1.0);
  Rng rng(derive_seed(opt.seed, 2));
  std::vector<std::size_t> order(data.rows);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t last = model.dense()[model.batch_norm().size() - 1].out;

  std::vector<double> params = model.parameters();
  std::vector<double> grad, xb, yb, wb, keep;
  for (std::size_t epoch = 0; epoch < opt.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();) {
      std::size_t end = std::min(order.size(), start + opt.batch);
      // A trailing singleton cannot be batch-normalized; fold it in.
      if (order.size() - end == 1) end = order.size();
      const std::size_t rows = end - start;
      if (rows < 2) break;
      xb.clear();
      yb.clear();
      wb.clear();
      for (std::size_t p = start; p < end; ++p) {
        const auto r = data.row(order[p]);
        xb.insert(xb.end(), r.begin(), r.end());
        yb.push_back(data.y[order[p]]);
        wb.push_back(weights[order[p]]);
      }
      keep.clear();
      if (model.dropout() > 0.0) {
        keep.resize(rows * last);
        for (auto& m : keep) m = uniform01(rng) >= model.dropout() ? 1.0 : 0.0;
      }
      const double loss = model.loss_and_gradient(xb, rows, yb, wb, keep, grad, true);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(epoch, "mlp training diverged at epoch " + std::to_string(epoch));
      }
      for (std::size_t i = 0; i < params.size(); ++i) params[i] -= opt.lr * grad[i];
      model.set_parameters(params);
      epoch_loss += loss;
      ++batches;
      start = end;
    }
    result.epoch_loss.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
  }
  return result;
}

}  // namespace autohls::ml
