// Small dense tanh networks with hand-written backprop. Samples are columns.
#pragma once

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace mci {

template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Cache {
    std::vector<Matrix> activations;  // [0] = input, [i] = output of layer i
  };

  Mlp() = default;

  /// sizes = {inputs, hidden..., outputs}; hidden layers use tanh, the last is linear.
  explicit Mlp(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
      weights_.push_back(Matrix::Zero(sizes_[l + 1], sizes_[l]));
      biases_.push_back(Vector::Zero(sizes_[l + 1]));
    }
  }

  const std::vector<int>& sizes() const { return sizes_; }
  int inputs() const { return sizes_.front(); }
  int outputs() const { return sizes_.back(); }
  std::size_t layers() const { return weights_.size(); }

  Matrix& weight(std::size_t l) { return weights_[l]; }
  const Matrix& weight(std::size_t l) const { return weights_[l]; }
  Vector& bias(std::size_t l) { return biases_[l]; }
  const Vector& bias(std::size_t l) const { return biases_[l]; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
  }

  /// Layout per layer: weight (column-major) then bias.
  void set_parameters(std::span<const Scalar> flat) {
    if (flat.size() != parameter_count()) throw std::invalid_argument("Mlp: parameter count mismatch");
    std::size_t at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      weights_[l] = Eigen::Map<const Matrix>(flat.data() + at, weights_[l].rows(), weights_[l].cols());
      at += weights_[l].size();
      biases_[l] = Eigen::Map<const Vector>(flat.data() + at, biases_[l].size());
      at += biases_[l].size();
    }
  }

  void get_parameters(std::span<Scalar> flat) const {
    if (flat.size() != parameter_count()) throw std::invalid_argument("Mlp: parameter count mismatch");
    std::size_t at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Eigen::Map<Matrix>(flat.data() + at, weights_[l].rows(), weights_[l].cols()) = weights_[l];
      at += weights_[l].size();
      Eigen::Map<Vector>(flat.data() + at, biases_[l].size()) = biases_[l];
      at += biases_[l].size();
    }
  }

  template <typename Derived>
  Matrix forward(const Eigen::MatrixBase<Derived>& x, Cache* cache = nullptr) const {
    Matrix h = x;
    if (cache) {
      cache->activations.clear();
      cache->activations.push_back(h);
    }
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      Matrix z = (weights_[l] * h).colwise() + biases_[l];
      if (l + 1 < weights_.size()) z = z.array().tanh().matrix();
      h = std::move(z);
      if (cache) cache->activations.push_back(h);
    }
    return h;
  }

  /// Accumulates dLoss/dparams into `grad` (same layout as get_parameters)
  /// given dLoss/doutput for the batch held in `cache`.
  void backward(const Cache& cache, const Matrix& grad_out, std::span<Scalar> grad) const {
    assert(grad.size() == parameter_count());
    std::vector<std::size_t> offsets(weights_.size());
    std::size_t at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      offsets[l] = at;
      at += weights_[l].size() + biases_[l].size();
    }
    Matrix delta = grad_out;
    for (std::size_t l = weights_.size(); l-- > 0;) {
      const Matrix& input = cache.activations[l];
      Eigen::Map<Matrix>(grad.data() + offsets[l], weights_[l].rows(), weights_[l].cols()).noalias() +=
          delta * input.transpose();
      Eigen::Map<Vector>(grad.data() + offsets[l] + weights_[l].size(), biases_[l].size()) += delta.rowwise().sum();
      if (l > 0) {
        Matrix back = weights_[l].transpose() * delta;
        delta = (back.array() * (Scalar(1) - input.array().square())).matrix();
      }
    }
  }

 private:
  std::vector<int> sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
};

/// Log-probabilities of a categorical over the `allowed` entries of each
/// column; disallowed entries get -inf. Columns with no allowed entry are an error.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> masked_log_softmax(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& logits,
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    Scalar peak = neg_inf;
    for (Eigen::Index r = 0; r < logits.rows(); ++r)
      if (allowed(r, c)) peak = std::max(peak, logits(r, c));
    if (peak == neg_inf) throw std::invalid_argument("masked_log_softmax: column has no allowed entry");
    Scalar total = 0;
    for (Eigen::Index r = 0; r < logits.rows(); ++r)
      if (allowed(r, c)) total += std::exp(logits(r, c) - peak);
    const Scalar log_z = peak + std::log(total);
    for (Eigen::Index r = 0; r < logits.rows(); ++r) out(r, c) = allowed(r, c) ? logits(r, c) - log_z : neg_inf;
  }
  return out;
}

/// Actor and critic as two separate tanh networks sharing an input.
template <typename Scalar>
class ActorCritic {
 public:
  using MlpT = Mlp<Scalar>;

  ActorCritic() = default;
  ActorCritic(int inputs, int hidden, int actions)
      : actor_({inputs, hidden, hidden, actions}), critic_({inputs, hidden, hidden, 1}) {}

  MlpT& actor() { return actor_; }
  const MlpT& actor() const { return actor_; }
  MlpT& critic() { return critic_; }
  const MlpT& critic() const { return critic_; }

  std::size_t parameter_count() const { return actor_.parameter_count() + critic_.parameter_count(); }

  void set_parameters(std::span<const Scalar> flat) {
    if (flat.size() != parameter_count()) throw std::invalid_argument("ActorCritic: parameter count mismatch");
    actor_.set_parameters(flat.first(actor_.parameter_count()));
    critic_.set_parameters(flat.subspan(actor_.parameter_count()));
  }

  void get_parameters(std::span<Scalar> flat) const {
    actor_.get_parameters(flat.first(actor_.parameter_count()));
    critic_.get_parameters(flat.subspan(actor_.parameter_count()));
  }

  std::vector<Scalar> parameters() const {
    std::vector<Scalar> flat(parameter_count());
    get_parameters(flat);
    return flat;
  }

 private:
  MlpT actor_;
  MlpT critic_;
};

}  // namespace mci
