#pragma once

#include <span>
#include <vector>

#include "pinn/jet.hpp"
#include "pinn/network.hpp"

namespace pinn {

// ---------------------------------------------------------------------------
// Structure-specialised forward-over-reverse sweep for dense MLPs.
//
// This is the training hot path: the same jet scalars the general Tape can
// carry, but with the layer structure made explicit so the inner loops are
// plain dot products over component planes. One forward pass produces the
// output jet (value, K first and K pure second input-derivatives); one
// backward pass pulls an arbitrary cotangent of those components back to the
// full parameter gradient. Equivalence with the general tape is
// property-tested in tests/autodiff and exercised by the acceptance suite.
// ---------------------------------------------------------------------------

template <int K>
class JetMlp {
 public:
  static constexpr int kComps = 2 * K + 1;  // v, d[0..K), h[0..K)

  explicit JetMlp(Architecture arch) : arch_(std::move(arch)) {
    const int layers = arch_.num_layers();
    act_.resize(layers + 1);
    pre_.resize(layers);
    for (int l = 0; l <= layers; ++l)
      act_[l].assign(static_cast<std::size_t>(kComps) * arch_.sizes[l], 0.0);
    for (int l = 0; l < layers; ++l)
      pre_[l].assign(static_cast<std::size_t>(kComps) * arch_.sizes[l + 1], 0.0);
    wt_.resize(layers);
    int max_width = 0;
    for (int s : arch_.sizes) max_width = std::max(max_width, s);
    cot_a_.assign(static_cast<std::size_t>(kComps) * max_width, 0.0);
    cot_z_.assign(static_cast<std::size_t>(kComps) * max_width, 0.0);
  }

  const Architecture& arch() const { return arch_; }

  /// Caches theta and per-layer transposed weights; call whenever the
  /// parameter vector changes.
  void set_theta(std::span<const double> theta) {
    theta_.assign(theta.begin(), theta.end());
    std::size_t off = 0;
    for (int l = 0; l < arch_.num_layers(); ++l) {
      const int n_in = arch_.sizes[l], n_out = arch_.sizes[l + 1];
      wt_[l].assign(static_cast<std::size_t>(n_in) * n_out, 0.0);
      const double* w = theta_.data() + off;
      for (int i = 0; i < n_out; ++i)
        for (int j = 0; j < n_in; ++j)
          wt_[l][static_cast<std::size_t>(j) * n_out + i] = w[static_cast<std::size_t>(i) * n_in + j];
      off += static_cast<std::size_t>(n_out) * n_in + n_out;
    }
  }

  /// Forward pass; keeps activations and pre-activations for backward().
  Jet<K> forward(std::span<const Jet<K>> input) {
    const int layers = arch_.num_layers();
    const int n0 = arch_.sizes[0];
    for (int j = 0; j < n0; ++j) {
      plane(act_[0], 0, n0)[j] = input[j].v;
      for (int k = 0; k < K; ++k) {
        plane(act_[0], 1 + k, n0)[j] = input[j].d[k];
        plane(act_[0], 1 + K + k, n0)[j] = input[j].h[k];
      }
    }
    std::size_t off = 0;
    for (int l = 0; l < layers; ++l) {
      const int n_in = arch_.sizes[l], n_out = arch_.sizes[l + 1];
      const double* w = theta_.data() + off;
      const double* b = w + static_cast<std::size_t>(n_out) * n_in;
      // z = W a (+ bias on the value plane)
      for (int c = 0; c < kComps; ++c) {
        const double* __restrict a = plane(act_[l], c, n_in);
        double* __restrict z = plane(pre_[l], c, n_out);
        for (int i = 0; i < n_out; ++i) {
          const double* __restrict row = w + static_cast<std::size_t>(i) * n_in;
          double acc = 0.0;
          for (int j = 0; j < n_in; ++j) acc += row[j] * a[j];
          z[i] = acc;
        }
      }
      {
        double* zv = plane(pre_[l], 0, n_out);
        for (int i = 0; i < n_out; ++i) zv[i] += b[i];
      }
      // a = sigma(z), identity on the output layer
      const bool last = (l == layers - 1);
      const Activation act = last ? Activation::kIdentity : arch_.activation;
      apply_activation(act, pre_[l], act_[l + 1], n_out);
      off += static_cast<std::size_t>(n_out) * n_in + n_out;
    }
    const int n_last = arch_.sizes[layers];
    Jet<K> out;
    out.v = plane(act_[layers], 0, n_last)[0];
    for (int k = 0; k < K; ++k) {
      out.d[k] = plane(act_[layers], 1 + k, n_last)[0];
      out.h[k] = plane(act_[layers], 1 + K + k, n_last)[0];
    }
    return out;
  }

  /// Accumulates d <seed, output-jet> / d theta into `grad` (+=). Must be
  /// called right after forward() on the same point.
  void backward(const Cotangent<K>& seed, std::span<double> grad) {
    const int layers = arch_.num_layers();
    const int n_last = arch_.sizes[layers];
    std::fill(cot_a_.begin(), cot_a_.begin() + static_cast<std::size_t>(kComps) * n_last, 0.0);
    plane(cot_a_, 0, n_last)[0] = seed.v;
    for (int k = 0; k < K; ++k) {
      plane(cot_a_, 1 + k, n_last)[0] = seed.d[k];
      plane(cot_a_, 1 + K + k, n_last)[0] = seed.h[k];
    }

    std::size_t off = theta_.size();
    for (int l = layers - 1; l >= 0; --l) {
      const int n_in = arch_.sizes[l], n_out = arch_.sizes[l + 1];
      off -= static_cast<std::size_t>(n_out) * n_in + n_out;
      const bool last = (l == layers - 1);
      const Activation act = last ? Activation::kIdentity : arch_.activation;
      pull_through_activation(act, pre_[l], cot_a_, cot_z_, n_out);

      // parameter gradient: dL/dw_ij = <kz_i, a_j>, dL/db_i = kz_i.v
      double* gw = grad.data() + off;
      double* gb = gw + static_cast<std::size_t>(n_out) * n_in;
      for (int c = 0; c < kComps; ++c) {
        const double* __restrict kz = plane(cot_z_, c, n_out);
        const double* __restrict a = plane(act_[l], c, n_in);
        for (int i = 0; i < n_out; ++i) {
          const double coef = kz[i];
          if (coef == 0.0) continue;
          double* __restrict row = gw + static_cast<std::size_t>(i) * n_in;
          for (int j = 0; j < n_in; ++j) row[j] += coef * a[j];
        }
      }
      {
        const double* kzv = plane(cot_z_, 0, n_out);
        for (int i = 0; i < n_out; ++i) gb[i] += kzv[i];
      }

      // cotangent of the previous activations: ka = W^T kz (per plane)
      if (l > 0) {
        const double* wt = wt_[l].data();
        for (int c = 0; c < kComps; ++c) {
          const double* __restrict kz = plane(cot_z_, c, n_out);
          double* __restrict ka = plane(cot_a_, c, n_in);
          for (int j = 0; j < n_in; ++j) {
            const double* __restrict col = wt + static_cast<std::size_t>(j) * n_out;
            double acc = 0.0;
            for (int i = 0; i < n_out; ++i) acc += col[i] * kz[i];
            ka[j] = acc;
          }
        }
      }
    }
  }

 private:
  static double* plane(std::vector<double>& buf, int c, int n) {
    return buf.data() + static_cast<std::size_t>(c) * n;
  }
  static const double* plane(const std::vector<double>& buf, int c, int n) {
    return buf.data() + static_cast<std::size_t>(c) * n;
  }

  /// sigma over a layer of jets stored as component planes.
  void apply_activation(Activation act, const std::vector<double>& z_buf,
                        std::vector<double>& a_buf, int n) {
    const double* zv = plane(z_buf, 0, n);
    double* av = plane(a_buf, 0, n);
    if (act == Activation::kIdentity) {
      std::copy(z_buf.begin(), z_buf.begin() + static_cast<std::size_t>(kComps) * n,
                a_buf.begin());
      return;
    }
    for (int i = 0; i < n; ++i) {
      double f, f1, f2;
      if (act == Activation::kTanh) {
        const double t = std::tanh(zv[i]);
        const double s = 1.0 - t * t;
        f = t;
        f1 = s;
        f2 = -2.0 * t * s;
      } else {
        const double g = logistic(zv[i]);
        f = softplus(zv[i]);
        f1 = g;
        f2 = g * (1.0 - g);
      }
      av[i] = f;
      for (int k = 0; k < K; ++k) {
        const double zd = plane(z_buf, 1 + k, n)[i];
        const double zh = plane(z_buf, 1 + K + k, n)[i];
        plane(a_buf, 1 + k, n)[i] = f1 * zd;
        plane(a_buf, 1 + K + k, n)[i] = f1 * zh + f2 * zd * zd;
      }
    }
  }

  /// kz = pullback of ka through a = sigma(z); the local-partial jet is
  /// sigma'(z) evaluated in jet arithmetic, which brings in sigma'''.
  void pull_through_activation(Activation act, const std::vector<double>& z_buf,
                               const std::vector<double>& ka_buf, std::vector<double>& kz_buf,
                               int n) {
    if (act == Activation::kIdentity) {
      std::copy(ka_buf.begin(), ka_buf.begin() + static_cast<std::size_t>(kComps) * n,
                kz_buf.begin());
      return;
    }
    const double* zv = plane(z_buf, 0, n);
    for (int i = 0; i < n; ++i) {
      double f1, f2, f3;
      if (act == Activation::kTanh) {
        const double t = std::tanh(zv[i]);
        const double s = 1.0 - t * t;
        f1 = s;
        f2 = -2.0 * t * s;
        f3 = 2.0 * s * (3.0 * t * t - 1.0);
      } else {
        const double g = logistic(zv[i]);
        f1 = g;
        f2 = g * (1.0 - g);
        f3 = g * (1.0 - g) * (1.0 - 2.0 * g);
      }
      // local-partial jet p = sigma'(z)
      Jet<K> p;
      p.v = f1;
      for (int k = 0; k < K; ++k) {
        const double zd = plane(z_buf, 1 + k, n)[i];
        const double zh = plane(z_buf, 1 + K + k, n)[i];
        p.d[k] = f2 * zd;
        p.h[k] = f2 * zh + f3 * zd * zd;
      }
      Cotangent<K> ka;
      ka.v = plane(ka_buf, 0, n)[i];
      for (int k = 0; k < K; ++k) {
        ka.d[k] = plane(ka_buf, 1 + k, n)[i];
        ka.h[k] = plane(ka_buf, 1 + K + k, n)[i];
      }
      const Cotangent<K> kz = pullback(ka, p);
      plane(kz_buf, 0, n)[i] = kz.v;
      for (int k = 0; k < K; ++k) {
        plane(kz_buf, 1 + k, n)[i] = kz.d[k];
        plane(kz_buf, 1 + K + k, n)[i] = kz.h[k];
      }
    }
  }

  Architecture arch_;
  std::vector<double> theta_;
  std::vector<std::vector<double>> wt_;   ///< per-layer W^T
  std::vector<std::vector<double>> act_;  ///< component planes per layer
  std::vector<std::vector<double>> pre_;
  std::vector<double> cot_a_, cot_z_;
};

}  // namespace pinn
