// SPDX-License-Identifier: Apache-2.0
//
// Gated recurrent unit in the reset-after form with separate input and
// recurrent biases:
//
//   z  = sigmoid(x Wz + bxz + h Uz + bhz)
//   r  = sigmoid(x Wr + bxr + h Ur + bhr)
//   n  = tanh(x Wn + bxn + r * (h Un + bhn))
//   h' = z * h + (1 - z) * n
//
// Kernels store the gate blocks side by side in the order z, r, n, so a
// cell over x_dim inputs with h units holds 3h(x_dim + h + 2) parameters.
#pragma once

#include <string>
#include <vector>

#include "core/layer_common.hpp"

namespace sentigru {

template <class T>
struct GruCell {
  GruCell(std::size_t input_dim, std::size_t units);

  void initialize(Rng& rng);
  void zero_grad();

  std::size_t input_dim() const { return input_kernel.dim(0); }
  std::size_t units() const { return recurrent_kernel.dim(0); }
  std::size_t param_count() const {
    return input_kernel.size() + recurrent_kernel.size() + input_bias.size() +
           recurrent_bias.size();
  }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

  Tensor<T> input_kernel;      // [x_dim x 3h]
  Tensor<T> recurrent_kernel;  // [h x 3h]
  Tensor<T> input_bias;        // [3h]
  Tensor<T> recurrent_bias;    // [3h]

  Tensor<T> input_kernel_grad;
  Tensor<T> recurrent_kernel_grad;
  Tensor<T> input_bias_grad;
  Tensor<T> recurrent_bias_grad;
};

/// One recurrence step: [B x x_dim], [B x h] -> [B x h].
template <class T>
Tensor<T> gru_cell_step(const Tensor<T>& x_t, const Tensor<T>& h_prev,
                        const GruCell<T>& cell);

/// Activations kept from a sequence forward pass for BPTT.
template <class T>
struct GruSequenceCache {
  Tensor<T> input;  // [B x T x x_dim]
  bool reverse = false;
  // Indexed by processing step s, not by time.
  std::vector<Tensor<T>> h_prev, update, reset, candidate, recurrent_candidate;
};

/// Runs the cell over all T steps (t = T-1..0 when `reverse`), returning the
/// hidden state for every time index as [B x T x h]; outputs of a reversed
/// pass are stored at the time index they consumed. `h0` defaults to zeros.
template <class T>
Tensor<T> gru_sequence_forward(const Tensor<T>& x, const GruCell<T>& cell,
                               bool reverse = false,
                               const Tensor<T>* h0 = nullptr,
                               GruSequenceCache<T>* cache = nullptr);

/// Full backpropagation through time. `grad_states` is [B x T x h] and holds
/// dL/dh_t for every time index (zeros where the output is unused).
/// Accumulates parameter gradients into `cell`; returns dL/dx.
template <class T>
Tensor<T> gru_sequence_backward(const Tensor<T>& grad_states,
                                const GruSequenceCache<T>& cache,
                                GruCell<T>& cell);

template <class T>
struct BidirectionalCache {
  GruSequenceCache<T> forward;
  GruSequenceCache<T> backward;
  std::size_t steps = 0;
};

/// Forward and time-reversed GRU passes concatenated on the feature axis
/// (forward half first). Without return_sequences the output is the forward
/// state at t = T-1 joined with the reverse state at t = 0, which is the
/// last step the reverse cell processes.
template <class T>
class BidirectionalGru {
 public:
  BidirectionalGru(std::size_t input_dim, std::size_t units,
                   bool return_sequences);

  void initialize(Rng& rng);

  /// [B x T x x_dim] -> [B x T x 2h] or [B x 2h].
  Tensor<T> forward(const Tensor<T>& x, BidirectionalCache<T>* cache) const;
  Tensor<T> backward(const Tensor<T>& grad_out,
                     const BidirectionalCache<T>& cache);

  std::size_t units() const { return forward_cell.units(); }
  std::size_t output_dim() const { return 2 * units(); }
  bool return_sequences() const { return return_sequences_; }
  std::size_t param_count() const {
    return forward_cell.param_count() + backward_cell.param_count();
  }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

  GruCell<T> forward_cell;
  GruCell<T> backward_cell;

 private:
  bool return_sequences_;
};

}  // namespace sentigru
