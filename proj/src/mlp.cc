// Copyright 2026 The ShadowKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shadowkit/mlp.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shadowkit/error.h"

namespace shadowkit {

using nlohmann::json;

namespace {

void CheckSizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw Error(ErrorCode::kInvalidArgument, "network needs input and output sizes");
  for (int s : sizes) {
    if (s <= 0) throw Error(ErrorCode::kInvalidArgument, "layer sizes must be positive");
  }
}

}  // namespace

Mlp::Mlp(const std::vector<int>& sizes, std::uint64_t seed) : sizes_(sizes) {
  CheckSizes(sizes);
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const double bound = std::sqrt(6.0 / sizes[l]);
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(sizes[l + 1], sizes[l]);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(sizes[l + 1]));
  }
}

Mlp Mlp::Zeros(const std::vector<int>& sizes) {
  Mlp m(sizes, 0);
  for (auto& w : m.weights_) w.setZero();
  return m;
}

Eigen::MatrixXd Mlp::Forward(const Eigen::MatrixXd& x) const {
  if (x.rows() != input_size()) {
    throw Error(ErrorCode::kDimensionMismatch, "network expects " + std::to_string(input_size()) +
                                                   " inputs, got " + std::to_string(x.rows()));
  }
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * a;
    z.colwise() += biases_[l];
    a = l + 1 < weights_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return a;
}

Eigen::VectorXd Mlp::ForwardOne(const Eigen::VectorXd& x) const {
  return Forward(Eigen::MatrixXd(x)).col(0);
}

double Mlp::Loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, MlpGradients* grad) const {
  if (x.rows() != input_size() || y.rows() != output_size() || x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "sample matrices do not match the network");
  }
  const std::size_t layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts(layers + 1);
  acts[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = weights_[l] * acts[l];
    z.colwise() += biases_[l];
    acts[l + 1] = l + 1 < layers ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  const double count = static_cast<double>(y.size());
  const Eigen::MatrixXd err = acts[layers] - y;
  const double loss = err.squaredNorm() / count;
  if (grad == nullptr) return loss;
  grad->weights.resize(layers);
  grad->biases.resize(layers);
  Eigen::MatrixXd delta = (2.0 / count) * err;
  for (std::size_t l = layers; l-- > 0;) {
    grad->weights[l] = delta * acts[l].transpose();
    grad->biases[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (weights_[l].transpose() * delta).cwiseProduct(
          (acts[l].array() > 0.0).cast<double>().matrix());
    }
  }
  return loss;
}

std::size_t Mlp::ParameterCount() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
  return n;
}

Eigen::VectorXd Mlp::Parameters() const {
  Eigen::VectorXd p(ParameterCount());
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    p.segment(k, weights_[l].size()) = weights_[l].reshaped();
    k += weights_[l].size();
    p.segment(k, biases_[l].size()) = biases_[l];
    k += biases_[l].size();
  }
  return p;
}

void Mlp::SetParameters(const Eigen::VectorXd& p) {
  if (static_cast<std::size_t>(p.size()) != ParameterCount()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector has the wrong length");
  }
  Eigen::Index k = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    weights_[l].reshaped() = p.segment(k, weights_[l].size());
    k += weights_[l].size();
    biases_[l] = p.segment(k, biases_[l].size());
    k += biases_[l].size();
  }
}

bool Mlp::AllFinite() const {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
  }
  return true;
}

json Mlp::ToJson() const {
  json layers = json::array();
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Eigen::VectorXd w = weights_[l].reshaped();
    layers.push_back({{"weights", std::vector<double>(w.data(), w.data() + w.size())},
                      {"bias", std::vector<double>(biases_[l].data(),
                                                   biases_[l].data() + biases_[l].size())}});
  }
  return {{"sizes", sizes_}, {"layers", layers}};
}

Mlp Mlp::FromJson(const json& j) {
  try {
    Mlp m = Zeros(j.at("sizes").get<std::vector<int>>());
    const json& layers = j.at("layers");
    if (layers.size() != m.weights_.size()) throw Error(ErrorCode::kSchemaError, "layer count mismatch");
    for (std::size_t l = 0; l < m.weights_.size(); ++l) {
      const auto w = layers[l].at("weights").get<std::vector<double>>();
      const auto b = layers[l].at("bias").get<std::vector<double>>();
      if (w.size() != static_cast<std::size_t>(m.weights_[l].size()) ||
          b.size() != static_cast<std::size_t>(m.biases_[l].size())) {
        throw Error(ErrorCode::kSchemaError, "layer " + std::to_string(l) + " has the wrong size");
      }
      m.weights_[l].reshaped() = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
      m.biases_[l] = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("network: ") + e.what());
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (sizes_ != other.sizes_) return false;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l] != other.weights_[l] || biases_[l] != other.biases_[l]) return false;
  }
  return true;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || momentum < 0.0 || momentum >= 1.0 || epochs < 0 ||
      batch_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
  for (int h : hidden) {
    if (h <= 0) throw Error(ErrorCode::kInvalidArgument, "hidden sizes must be positive");
  }
}

TrainResult TrainMlp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TrainConfig& cfg) {
  cfg.Validate();
  if (x.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "no training samples");
  if (x.cols() != y.cols()) throw Error(ErrorCode::kDimensionMismatch, "inputs and labels differ in count");
  std::vector<int> sizes{static_cast<int>(x.rows())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(static_cast<int>(y.rows()));
  TrainResult result{Mlp(sizes, cfg.seed), 0.0, {}};
  Mlp& net = result.net;
  MlpGradients velocity;
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    velocity.weights.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
    velocity.biases.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
  }
  std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);
  std::vector<Eigen::Index> order(x.cols());
  std::iota(order.begin(), order.end(), 0);
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, x.cols());
  Eigen::MatrixXd bx(x.rows(), batch);
  Eigen::MatrixXd by(y.rows(), batch);
  MlpGradients g;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    Eigen::Index seen = 0;
    for (Eigen::Index start = 0; start < x.cols(); start += batch) {
      const Eigen::Index n = std::min(batch, x.cols() - start);
      bx.resize(x.rows(), n);
      by.resize(y.rows(), n);
      for (Eigen::Index k = 0; k < n; ++k) {
        bx.col(k) = x.col(order[start + k]);
        by.col(k) = y.col(order[start + k]);
      }
      sum += net.Loss(bx, by, &g) * n;
      seen += n;
      for (std::size_t l = 0; l < g.weights.size(); ++l) {
        velocity.weights[l] = cfg.momentum * velocity.weights[l] - cfg.learning_rate * g.weights[l];
        velocity.biases[l] = cfg.momentum * velocity.biases[l] - cfg.learning_rate * g.biases[l];
        net.weights()[l] += velocity.weights[l];
        net.biases()[l] += velocity.biases[l];
      }
    }
    result.epoch_loss.push_back(sum / seen);
  }
  double total = 0.0;
  for (Eigen::Index start = 0; start < x.cols(); start += 256) {
    const Eigen::Index n = std::min<Eigen::Index>(256, x.cols() - start);
    total += net.Loss(x.middleCols(start, n), y.middleCols(start, n), nullptr) * n;
  }
  result.final_loss = total / x.cols();
  return result;
}

}  // namespace shadowkit
