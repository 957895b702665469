#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pmarl/tensor/matrix.hpp"

namespace pmarl::tensor {

// Named view of one parameter tensor, flattened. The order in which views are
// produced is the order the optimizer walks them.
struct ParamView {
  std::string name;
  std::span<double> values;
};

struct GradView {
  std::string name;
  std::span<const double> values;
};

// Fully connected network: tanh on every hidden layer, identity on the output.
// weights[i] is layer_sizes[i+1] x layer_sizes[i].
struct MlpParams {
  std::vector<std::size_t> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static MlpParams zeros(std::vector<std::size_t> layer_sizes);
  // Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static MlpParams init_uniform(std::vector<std::size_t> layer_sizes, std::mt19937_64& rng);

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;

  // Throws ContractViolation if shapes disagree with layer_sizes.
  void validate() const;
  bool all_finite() const;

  std::vector<ParamView> views(const std::string& prefix);

  bool operator==(const MlpParams&) const = default;
};

std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Vector input;

  static MlpGrads zeros_like(const MlpParams& params);
  void set_zero();
  std::vector<GradView> views(const std::string& prefix) const;
};

Vector mlp_forward(const MlpParams& params, std::span<const double> input);

// Gradients of <upstream, f(input)> with respect to every parameter and the input.
MlpGrads mlp_backward(const MlpParams& params, std::span<const double> input,
                      std::span<const double> upstream_grad);

// Batched path used by training. Each row of `inputs` is one sample.
struct BatchCache {
  // activations[0] is the input batch; activations[i] is the output of layer i.
  std::vector<Matrix> activations;
};

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& inputs,
                         BatchCache* cache = nullptr);

// Parameter gradients are summed over the batch rows and written into `grads`
// (overwriting). If `input_grad` is non-null it receives d/d inputs.
void mlp_backward_batch(const MlpParams& params, const BatchCache& cache,
                        const Matrix& upstream, MlpGrads& grads, Matrix* input_grad = nullptr);

}  // namespace pmarl::tensor
