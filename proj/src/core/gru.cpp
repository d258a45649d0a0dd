// SPDX-License-Identifier: Apache-2.0
#include "core/gru.hpp"

#include <cmath>

#include "core/ops.hpp"

namespace sentigru {
namespace {

template <class T>
void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

// One step on precomputed input projections.
//   xproj: [B x 3h], already including the input bias.
//   Fills z, r, n, g (= h Un + bhn) and returns h'.
template <class T>
Tensor<T> step_from_projection(const Tensor<T>& xproj, const Tensor<T>& h_prev,
                               const GruCell<T>& cell, Tensor<T>& z,
                               Tensor<T>& r, Tensor<T>& n, Tensor<T>& g) {
  const std::size_t batch = h_prev.dim(0);
  const std::size_t h = cell.units();
  Tensor<T> hproj;
  gemm(h_prev, false, cell.recurrent_kernel, false, hproj);
  z = Tensor<T>({batch, h});
  r = Tensor<T>({batch, h});
  n = Tensor<T>({batch, h});
  g = Tensor<T>({batch, h});
  Tensor<T> out({batch, h});
  const T* bh = cell.recurrent_bias.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* xp = xproj.data() + b * 3 * h;
    const T* hp = hproj.data() + b * 3 * h;
    for (std::size_t j = 0; j < h; ++j) {
      const T zj = sigmoid(xp[j] + hp[j] + bh[j]);
      const T rj = sigmoid(xp[h + j] + hp[h + j] + bh[h + j]);
      const T gj = hp[2 * h + j] + bh[2 * h + j];
      const T nj = std::tanh(xp[2 * h + j] + rj * gj);
      const T prev = h_prev.at(b, j);
      z.at(b, j) = zj;
      r.at(b, j) = rj;
      g.at(b, j) = gj;
      n.at(b, j) = nj;
      out.at(b, j) = zj * prev + (T{1} - zj) * nj;
    }
  }
  return out;
}

template <class T>
Tensor<T> project_inputs(const Tensor<T>& x2d, const GruCell<T>& cell) {
  Tensor<T> proj;
  gemm(x2d, false, cell.input_kernel, false, proj);
  const std::size_t width = proj.dim(1);
  for (std::size_t row = 0; row < proj.dim(0); ++row) {
    T* p = proj.data() + row * width;
    for (std::size_t j = 0; j < width; ++j) p[j] += cell.input_bias[j];
  }
  return proj;
}

}  // namespace

template <class T>
GruCell<T>::GruCell(std::size_t input_dim, std::size_t units)
    : input_kernel({input_dim, 3 * units}),
      recurrent_kernel({units, 3 * units}),
      input_bias({3 * units}),
      recurrent_bias({3 * units}),
      input_kernel_grad({input_dim, 3 * units}),
      recurrent_kernel_grad({units, 3 * units}),
      input_bias_grad({3 * units}),
      recurrent_bias_grad({3 * units}) {}

template <class T>
void GruCell<T>::initialize(Rng& rng) {
  fill_glorot_uniform(input_kernel, rng);
  fill_orthogonal(recurrent_kernel, rng);
  input_bias.fill(T{0});
  recurrent_bias.fill(T{0});
}

template <class T>
void GruCell<T>::zero_grad() {
  input_kernel_grad.fill(T{0});
  recurrent_kernel_grad.fill(T{0});
  input_bias_grad.fill(T{0});
  recurrent_bias_grad.fill(T{0});
}

template <class T>
void GruCell<T>::collect(const std::string& prefix,
                         std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".input_kernel", &input_kernel, &input_kernel_grad});
  out.push_back(
      {prefix + ".recurrent_kernel", &recurrent_kernel, &recurrent_kernel_grad});
  out.push_back({prefix + ".input_bias", &input_bias, &input_bias_grad});
  out.push_back(
      {prefix + ".recurrent_bias", &recurrent_bias, &recurrent_bias_grad});
}

template <class T>
Tensor<T> gru_cell_step(const Tensor<T>& x_t, const Tensor<T>& h_prev,
                        const GruCell<T>& cell) {
  require<T>(x_t.rank() == 2 && x_t.dim(1) == cell.input_dim(),
             "gru step input has shape " + shape_string(x_t.shape()));
  require<T>(h_prev.rank() == 2 && h_prev.dim(0) == x_t.dim(0) &&
                 h_prev.dim(1) == cell.units(),
             "gru step state has shape " + shape_string(h_prev.shape()));
  Tensor<T> z, r, n, g;
  return step_from_projection(project_inputs(x_t, cell), h_prev, cell, z, r, n,
                              g);
}

template <class T>
Tensor<T> gru_sequence_forward(const Tensor<T>& x, const GruCell<T>& cell,
                               bool reverse, const Tensor<T>* h0,
                               GruSequenceCache<T>* cache) {
  require<T>(x.rank() == 3 && x.dim(2) == cell.input_dim(),
             "gru sequence input has shape " + shape_string(x.shape()) +
                 ", expected feature width " +
                 std::to_string(cell.input_dim()));
  const std::size_t batch = x.dim(0);
  const std::size_t steps = x.dim(1);
  const std::size_t h = cell.units();

  Tensor<T> state({batch, h});
  if (h0) {
    require<T>(h0->shape() == Shape{batch, h},
               "initial state has shape " + shape_string(h0->shape()));
    state = *h0;
  }

  // Rows are ordered b * T + t.
  const Tensor<T> proj =
      project_inputs(x.reshaped({batch * steps, x.dim(2)}), cell);

  if (cache) {
    cache->input = x;
    cache->reverse = reverse;
    cache->h_prev.assign(steps, {});
    cache->update.assign(steps, {});
    cache->reset.assign(steps, {});
    cache->candidate.assign(steps, {});
    cache->recurrent_candidate.assign(steps, {});
  }

  Tensor<T> out({batch, steps, h});
  Tensor<T> xproj({batch, 3 * h});
  Tensor<T> z, r, n, g;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(proj.data() + (b * steps + t) * 3 * h, 3 * h,
                  xproj.data() + b * 3 * h);
    }
    Tensor<T> next = step_from_projection(xproj, state, cell, z, r, n, g);
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(next.data() + b * h, h, out.data() + (b * steps + t) * h);
    }
    if (cache) {
      cache->h_prev[s] = std::move(state);
      cache->update[s] = z;
      cache->reset[s] = r;
      cache->candidate[s] = n;
      cache->recurrent_candidate[s] = g;
    }
    state = std::move(next);
  }
  return out;
}

template <class T>
Tensor<T> gru_sequence_backward(const Tensor<T>& grad_states,
                                const GruSequenceCache<T>& cache,
                                GruCell<T>& cell) {
  const Tensor<T>& x = cache.input;
  const std::size_t batch = x.dim(0);
  const std::size_t steps = x.dim(1);
  const std::size_t h = cell.units();
  require<T>(grad_states.shape() == Shape{batch, steps, h},
             "gru gradient has shape " + shape_string(grad_states.shape()));

  Tensor<T> grad_proj({batch * steps, 3 * h});  // dL/d(x W + bx), rows b*T+t
  Tensor<T> grad_hproj({batch, 3 * h});         // dL/d(h U + bh) at one step
  Tensor<T> grad_h({batch, h});                 // flowing into h_{t-1}

  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = cache.reverse ? steps - 1 - s : s;
    const Tensor<T>& prev = cache.h_prev[s];
    const Tensor<T>& z = cache.update[s];
    const Tensor<T>& r = cache.reset[s];
    const Tensor<T>& n = cache.candidate[s];
    const Tensor<T>& g = cache.recurrent_candidate[s];
    for (std::size_t b = 0; b < batch; ++b) {
      T* dx = grad_proj.data() + (b * steps + t) * 3 * h;
      T* dhp = grad_hproj.data() + b * 3 * h;
      for (std::size_t j = 0; j < h; ++j) {
        const T dh = grad_states.at(b, t, j) + grad_h.at(b, j);
        const T zj = z.at(b, j);
        const T rj = r.at(b, j);
        const T nj = n.at(b, j);
        const T dz = dh * (prev.at(b, j) - nj);
        const T dn = dh * (T{1} - zj);
        const T da_n = dn * (T{1} - nj * nj);
        const T da_z = dz * zj * (T{1} - zj);
        const T da_r = da_n * g.at(b, j) * rj * (T{1} - rj);
        dx[j] = da_z;
        dx[h + j] = da_r;
        dx[2 * h + j] = da_n;
        dhp[j] = da_z;
        dhp[h + j] = da_r;
        dhp[2 * h + j] = da_n * rj;
        grad_h.at(b, j) = dh * zj;
      }
    }
    gemm(prev, true, grad_hproj, false, cell.recurrent_kernel_grad, true);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t j = 0; j < 3 * h; ++j) {
        cell.recurrent_bias_grad[j] += grad_hproj.at(b, j);
      }
    }
    gemm(grad_hproj, false, cell.recurrent_kernel, true, grad_h, true);
  }

  const Tensor<T> x2d = x.reshaped({batch * steps, x.dim(2)});
  gemm(x2d, true, grad_proj, false, cell.input_kernel_grad, true);
  for (std::size_t row = 0; row < batch * steps; ++row) {
    for (std::size_t j = 0; j < 3 * h; ++j) {
      cell.input_bias_grad[j] += grad_proj.at(row, j);
    }
  }
  Tensor<T> grad_x;
  gemm(grad_proj, false, cell.input_kernel, true, grad_x);
  return grad_x.reshaped(x.shape());
}

template <class T>
BidirectionalGru<T>::BidirectionalGru(std::size_t input_dim, std::size_t units,
                                      bool return_sequences)
    : forward_cell(input_dim, units),
      backward_cell(input_dim, units),
      return_sequences_(return_sequences) {}

template <class T>
void BidirectionalGru<T>::initialize(Rng& rng) {
  forward_cell.initialize(rng);
  backward_cell.initialize(rng);
}

template <class T>
Tensor<T> BidirectionalGru<T>::forward(const Tensor<T>& x,
                                       BidirectionalCache<T>* cache) const {
  const Tensor<T> fwd = gru_sequence_forward<T>(
      x, forward_cell, false, nullptr, cache ? &cache->forward : nullptr);
  const Tensor<T> bwd = gru_sequence_forward<T>(
      x, backward_cell, true, nullptr, cache ? &cache->backward : nullptr);
  const std::size_t batch = x.dim(0);
  const std::size_t steps = x.dim(1);
  const std::size_t h = units();
  if (cache) cache->steps = steps;

  if (return_sequences_) {
    Tensor<T> out({batch, steps, 2 * h});
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < steps; ++t) {
        T* dst = out.data() + (b * steps + t) * 2 * h;
        std::copy_n(fwd.data() + (b * steps + t) * h, h, dst);
        std::copy_n(bwd.data() + (b * steps + t) * h, h, dst + h);
      }
    }
    return out;
  }
  Tensor<T> out({batch, 2 * h});
  for (std::size_t b = 0; b < batch; ++b) {
    T* dst = out.data() + b * 2 * h;
    std::copy_n(fwd.data() + (b * steps + steps - 1) * h, h, dst);
    std::copy_n(bwd.data() + (b * steps) * h, h, dst + h);
  }
  return out;
}

template <class T>
Tensor<T> BidirectionalGru<T>::backward(const Tensor<T>& grad_out,
                                        const BidirectionalCache<T>& cache) {
  const std::size_t batch = cache.forward.input.dim(0);
  const std::size_t steps = cache.steps;
  const std::size_t h = units();
  Tensor<T> grad_fwd({batch, steps, h});
  Tensor<T> grad_bwd({batch, steps, h});
  if (return_sequences_) {
    require<T>(grad_out.shape() == Shape{batch, steps, 2 * h},
               "bidirectional gradient has shape " +
                   shape_string(grad_out.shape()));
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < steps; ++t) {
        const T* src = grad_out.data() + (b * steps + t) * 2 * h;
        std::copy_n(src, h, grad_fwd.data() + (b * steps + t) * h);
        std::copy_n(src + h, h, grad_bwd.data() + (b * steps + t) * h);
      }
    }
  } else {
    require<T>(grad_out.shape() == Shape{batch, 2 * h},
               "bidirectional gradient has shape " +
                   shape_string(grad_out.shape()));
    for (std::size_t b = 0; b < batch; ++b) {
      const T* src = grad_out.data() + b * 2 * h;
      std::copy_n(src, h, grad_fwd.data() + (b * steps + steps - 1) * h);
      std::copy_n(src + h, h, grad_bwd.data() + (b * steps) * h);
    }
  }
  Tensor<T> grad_x = gru_sequence_backward(grad_fwd, cache.forward, forward_cell);
  const Tensor<T> grad_x_bwd =
      gru_sequence_backward(grad_bwd, cache.backward, backward_cell);
  for (std::size_t i = 0; i < grad_x.size(); ++i) grad_x[i] += grad_x_bwd[i];
  return grad_x;
}

template <class T>
void BidirectionalGru<T>::collect(const std::string& prefix,
                                  std::vector<ParamRef<T>>& out) {
  forward_cell.collect(prefix + ".forward", out);
  backward_cell.collect(prefix + ".backward", out);
}

#define SENTIGRU_INSTANTIATE(T)                                                \
  template struct GruCell<T>;                                                  \
  template class BidirectionalGru<T>;                                          \
  template Tensor<T> gru_cell_step<T>(const Tensor<T>&, const Tensor<T>&,      \
                                      const GruCell<T>&);                      \
  template Tensor<T> gru_sequence_forward<T>(const Tensor<T>&,                 \
                                             const GruCell<T>&, bool,          \
                                             const Tensor<T>*,                 \
                                             GruSequenceCache<T>*);            \
  template Tensor<T> gru_sequence_backward<T>(                                 \
      const Tensor<T>&, const GruSequenceCache<T>&, GruCell<T>&);

SENTIGRU_INSTANTIATE(float)
SENTIGRU_INSTANTIATE(double)

#undef SENTIGRU_INSTANTIATE

}  // namespace sentigru
