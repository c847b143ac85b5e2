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

#ifndef SHADOWKIT_MLP_H_
#define SHADOWKIT_MLP_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace shadowkit {

struct MlpGradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

// Fully connected network with ReLU hidden layers and a linear output.
// Samples are columns.
class Mlp {
 public:
  Mlp() = default;
  // sizes = {inputs, hidden..., outputs}. He-uniform weights drawn from
  // `seed`, zero biases. Throws Error(kInvalidArgument) for fewer than two
  // sizes or a non-positive size.
  Mlp(const std::vector<int>& sizes, std::uint64_t seed);
  static Mlp Zeros(const std::vector<int>& sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  int input_size() const { return sizes_.empty() ? 0 : sizes_.front(); }
  int output_size() const { return sizes_.empty() ? 0 : sizes_.back(); }
  std::vector<Eigen::MatrixXd>& weights() { return weights_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  std::vector<Eigen::VectorXd>& biases() { return biases_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  Eigen::MatrixXd Forward(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd ForwardOne(const Eigen::VectorXd& x) const;

  // Mean of squared errors over every output of every sample. Fills
  // `grad` when non-null. Throws Error(kDimensionMismatch) on shape errors.
  double Loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, MlpGradients* grad) const;

  std::size_t ParameterCount() const;
  // Weights then bias of each layer, weights column-major.
  Eigen::VectorXd Parameters() const;
  void SetParameters(const Eigen::VectorXd& p);
  bool AllFinite() const;

  nlohmann::json ToJson() const;
  static Mlp FromJson(const nlohmann::json& j);

  bool operator==(const Mlp& other) const;

 private:
  std::vector<int> sizes_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

struct TrainConfig {
  std::vector<int> hidden{256, 128};
  double learning_rate = 0.003;
  double momentum = 0.9;
  int epochs = 15;
  int batch_size = 32;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct TrainResult {
  Mlp net;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;
};

// Mini-batch SGD with momentum on the mean squared error. The sample order
// of every epoch is drawn from cfg.seed, so results are bit-reproducible.
// Throws Error(kInvalidArgument) without samples and
// Error(kDimensionMismatch) when x and y disagree.
TrainResult TrainMlp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const TrainConfig& cfg);

}  // namespace shadowkit

#endif  // SHADOWKIT_MLP_H_
