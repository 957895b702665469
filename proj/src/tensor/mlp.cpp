#include "pmarl/tensor/mlp.hpp"

#include <algorithm>
#include <Eigen/Dense>
#include <cmath>

#include "pmarl/errors.hpp"

namespace pmarl::tensor {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXd>;
using MapVec = Eigen::Map<Eigen::VectorXd>;

ConstMapMat as_eigen(const Matrix& m) {
  return ConstMapMat(m.data.data(), static_cast<Eigen::Index>(m.rows),
                     static_cast<Eigen::Index>(m.cols));
}

MapMat as_eigen(Matrix& m) {
  return MapMat(m.data.data(), static_cast<Eigen::Index>(m.rows),
                static_cast<Eigen::Index>(m.cols));
}

void check_layer_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw ContractViolation("mlp: need at least input and output sizes");
  for (auto s : sizes) {
    if (s == 0) throw ContractViolation("mlp: layer size must be positive");
  }
}

}  // namespace

std::size_t parameter_count(std::span<const std::size_t> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    n += layer_sizes[i + 1] * layer_sizes[i] + layer_sizes[i + 1];
  }
  return n;
}

MlpParams MlpParams::zeros(std::vector<std::size_t> layer_sizes) {
  check_layer_sizes(layer_sizes);
  MlpParams p;
  p.layer_sizes = std::move(layer_sizes);
  for (std::size_t i = 0; i + 1 < p.layer_sizes.size(); ++i) {
    p.weights.emplace_back(p.layer_sizes[i + 1], p.layer_sizes[i]);
    p.biases.emplace_back(p.layer_sizes[i + 1], 0.0);
  }
  return p;
}

MlpParams MlpParams::init_uniform(std::vector<std::size_t> layer_sizes, std::mt19937_64& rng) {
  MlpParams p = zeros(std::move(layer_sizes));
  for (std::size_t i = 0; i < p.num_layers(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.layer_sizes[i]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : p.weights[i].data) w = dist(rng);
    for (auto& b : p.biases[i]) b = dist(rng);
  }
  return p;
}

std::size_t MlpParams::parameter_count() const { return tensor::parameter_count(layer_sizes); }

void MlpParams::validate() const {
  check_layer_sizes(layer_sizes);
  if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
    throw ContractViolation("mlp: layer count does not match layer_sizes");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const auto& w = weights[i];
    if (w.rows != layer_sizes[i + 1] || w.cols != layer_sizes[i] || w.data.size() != w.rows * w.cols) {
      throw ContractViolation("mlp: weight " + std::to_string(i) + " has wrong shape");
    }
    if (biases[i].size() != layer_sizes[i + 1]) {
      throw ContractViolation("mlp: bias " + std::to_string(i) + " has wrong length");
    }
  }
}

bool MlpParams::all_finite() const {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!weights[i].all_finite() || !tensor::all_finite(biases[i])) return false;
  }
  return true;
}

std::vector<ParamView> MlpParams::views(const std::string& prefix) {
  std::vector<ParamView> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::string layer = prefix + "layer" + std::to_string(i);
    out.push_back({layer + ".weight", weights[i].data});
    out.push_back({layer + ".bias", biases[i]});
  }
  return out;
}

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
  MlpGrads g;
  for (std::size_t i = 0; i < params.num_layers(); ++i) {
    g.weights.emplace_back(params.weights[i].rows, params.weights[i].cols);
    g.biases.emplace_back(params.biases[i].size(), 0.0);
  }
  g.input.assign(params.input_size(), 0.0);
  return g;
}

void MlpGrads::set_zero() {
  for (auto& w : weights) w.set_zero();
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
  std::fill(input.begin(), input.end(), 0.0);
}

std::vector<GradView> MlpGrads::views(const std::string& prefix) const {
  std::vector<GradView> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::string layer = prefix + "layer" + std::to_string(i);
    out.push_back({layer + ".weight", weights[i].data});
    out.push_back({layer + ".bias", biases[i]});
  }
  return out;
}

Matrix mlp_forward_batch(const MlpParams& params, const Matrix& inputs, BatchCache* cache) {
  if (inputs.cols != params.input_size()) {
    throw ContractViolation("mlp_forward: input width " + std::to_string(inputs.cols) +
                            " != " + std::to_string(params.input_size()));
  }
  if (cache) {
    cache->activations.resize(params.num_layers() + 1);
    cache->activations[0] = inputs;
  }
  Matrix current = inputs;
  for (std::size_t i = 0; i < params.num_layers(); ++i) {
    Matrix next(inputs.rows, params.layer_sizes[i + 1]);
    auto out = as_eigen(next);
    out.noalias() = as_eigen(current) * as_eigen(params.weights[i]).transpose();
    out.rowwise() += ConstMapVec(params.biases[i].data(), static_cast<Eigen::Index>(params.biases[i].size()))
                         .transpose();
    if (i + 1 < params.num_layers()) out = out.array().tanh().matrix();
    if (cache) cache->activations[i + 1] = next;
    current = std::move(next);
  }
  return current;
}

void mlp_backward_batch(const MlpParams& params, const BatchCache& cache, const Matrix& upstream,
                        MlpGrads& grads, Matrix* input_grad) {
  const std::size_t layers = params.num_layers();
  if (cache.activations.size() != layers + 1) {
    throw ContractViolation("mlp_backward: cache does not match network depth");
  }
  const std::size_t batch = cache.activations[0].rows;
  if (upstream.rows != batch || upstream.cols != params.output_size()) {
    throw ContractViolation("mlp_backward: upstream gradient shape mismatch");
  }
  if (grads.weights.size() != layers) grads = MlpGrads::zeros_like(params);

  RowMat delta = as_eigen(upstream);
  for (std::size_t li = layers; li-- > 0;) {
    const auto act_in = as_eigen(cache.activations[li]);
    as_eigen(grads.weights[li]).noalias() = delta.transpose() * act_in;
    // Fixed summation order keeps results independent of buffer alignment.
    auto& bg = grads.biases[li];
    std::fill(bg.begin(), bg.end(), 0.0);
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
      for (Eigen::Index c = 0; c < delta.cols(); ++c) bg[static_cast<std::size_t>(c)] += delta(r, c);
    }
    if (li == 0 && input_grad == nullptr) break;
    RowMat back = delta * as_eigen(params.weights[li]);
    if (li > 0) {
      back.array() *= (1.0 - act_in.array().square());
      delta = std::move(back);
    } else {
      *input_grad = Matrix(batch, params.input_size());
      as_eigen(*input_grad) = back;
    }
  }
}

Vector mlp_forward(const MlpParams& params, std::span<const double> input) {
  if (input.size() != params.input_size()) {
    throw ContractViolation("mlp_forward: input length " + std::to_string(input.size()) +
                            " != " + std::to_string(params.input_size()));
  }
  Vector current(input.begin(), input.end());
  for (std::size_t i = 0; i < params.num_layers(); ++i) {
    const auto& w = params.weights[i];
    Vector next(params.biases[i]);
    Eigen::Map<Eigen::VectorXd> out(next.data(), static_cast<Eigen::Index>(next.size()));
    out.noalias() += as_eigen(w) * ConstMapVec(current.data(), static_cast<Eigen::Index>(current.size()));
    if (i + 1 < params.num_layers()) {
      for (auto& v : next) v = std::tanh(v);
    }
    current = std::move(next);
  }
  return current;
}

MlpGrads mlp_backward(const MlpParams& params, std::span<const double> input,
                      std::span<const double> upstream_grad) {
  if (input.size() != params.input_size()) {
    throw ContractViolation("mlp_backward: input length mismatch");
  }
  if (upstream_grad.size() != params.output_size()) {
    throw ContractViolation("mlp_backward: upstream gradient length mismatch");
  }
  Matrix in(1, input.size());
  std::copy(input.begin(), input.end(), in.data.begin());
  Matrix up(1, upstream_grad.size());
  std::copy(upstream_grad.begin(), upstream_grad.end(), up.data.begin());

  BatchCache cache;
  mlp_forward_batch(params, in, &cache);
  MlpGrads grads = MlpGrads::zeros_like(params);
  Matrix input_grad;
  mlp_backward_batch(params, cache, up, grads, &input_grad);
  grads.input = std::move(input_grad.data);
  return grads;
}

}  // namespace pmarl::tensor
