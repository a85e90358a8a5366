#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pinn/common.hpp"
#include "pinn/dual.hpp"

namespace pinn {

enum class Activation { kTanh, kSoftplus, kIdentity };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::kTanh: return "tanh";
    case Activation::kSoftplus: return "softplus";
    case Activation::kIdentity: return "identity";
  }
  return "?";
}

template <class V>
V activate(Activation a, const V& z) {
  switch (a) {
    case Activation::kTanh: return tanh(z);
    case Activation::kSoftplus: return softplus(z);
    case Activation::kIdentity: return z;
  }
  return z;
}

/// Layer sizes from input to output, e.g. {2, 8, 4, 2, 1}, plus the hidden
/// activation. The final layer is always linear.
struct Architecture {
  std::vector<int> sizes;
  Activation activation = Activation::kTanh;

  int num_layers() const { return static_cast<int>(sizes.size()) - 1; }
  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
};

/// Total trainable parameter count: sum over layers of n_out * n_in + n_out.
inline long param_count(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2)
    throw StructuralError("param_count: need at least input and output sizes");
  long count = 0;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l - 1] <= 0)
      throw StructuralError("param_count: non-positive size at layer " + std::to_string(l));
    count += static_cast<long>(layer_sizes[l]) * layer_sizes[l - 1] + layer_sizes[l];
  }
  return count;
}

/// Weights and biases of a dense feed-forward network, stored flat in layer
/// order (row-major W, then b) so optimisers can treat theta as one vector.
struct NetworkParams {
  Architecture arch;
  std::vector<double> theta;

  long param_count() const { return pinn::param_count(arch.sizes); }

  std::size_t layer_offset(int l) const {
    std::size_t off = 0;
    for (int k = 0; k < l; ++k)
      off += static_cast<std::size_t>(arch.sizes[k + 1]) * arch.sizes[k] + arch.sizes[k + 1];
    return off;
  }
  std::span<const double> weights(int l) const {
    return {theta.data() + layer_offset(l),
            static_cast<std::size_t>(arch.sizes[l + 1]) * arch.sizes[l]};
  }
  std::span<const double> biases(int l) const {
    std::size_t n_w = static_cast<std::size_t>(arch.sizes[l + 1]) * arch.sizes[l];
    return {theta.data() + layer_offset(l) + n_w, static_cast<std::size_t>(arch.sizes[l + 1])};
  }
};

/// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
/// Identical seeds give bit-identical parameters.
inline NetworkParams init_params(std::vector<int> layer_sizes, Activation activation,
                                 std::uint64_t seed) {
  NetworkParams p;
  p.arch.sizes = std::move(layer_sizes);
  p.arch.activation = activation;
  p.theta.assign(static_cast<std::size_t>(param_count(p.arch.sizes)), 0.0);
  SplitMix64 rng(derive_seed(seed, /*tag=*/0xA11));
  std::size_t off = 0;
  for (int l = 0; l < p.arch.num_layers(); ++l) {
    const int n_in = p.arch.sizes[l], n_out = p.arch.sizes[l + 1];
    const double limit = std::sqrt(6.0 / (n_in + n_out));
    for (int i = 0; i < n_out * n_in; ++i) p.theta[off + i] = rng.uniform(-limit, limit);
    off += static_cast<std::size_t>(n_out) * n_in + n_out;  // biases stay 0
  }
  return p;
}

namespace detail {
template <class V, class W>
std::vector<V> forward_impl(const Architecture& arch, std::span<const W> theta,
                            std::span<const V> input) {
  if (static_cast<int>(input.size()) != arch.input_size())
    throw StructuralError("forward: input size " + std::to_string(input.size()) +
                          " does not match layer 0 fan-in " +
                          std::to_string(arch.input_size()));
  std::vector<V> a(input.begin(), input.end());
  std::vector<V> z;
  std::size_t off = 0;
  for (int l = 0; l < arch.num_layers(); ++l) {
    const int n_in = arch.sizes[l], n_out = arch.sizes[l + 1];
    const W* w = theta.data() + off;
    const W* b = theta.data() + off + static_cast<std::size_t>(n_out) * n_in;
    z.clear();
    z.reserve(n_out);
    const bool last = (l == arch.num_layers() - 1);
    for (int i = 0; i < n_out; ++i) {
      V acc = w[static_cast<std::size_t>(i) * n_in] * a[0];
      for (int j = 1; j < n_in; ++j) acc = acc + w[static_cast<std::size_t>(i) * n_in + j] * a[j];
      acc = acc + b[i];
      z.push_back(last ? acc : activate(arch.activation, acc));
    }
    a.swap(z);
    off += static_cast<std::size_t>(n_out) * n_in + n_out;
  }
  return a;
}
}  // namespace detail

/// Layer recursion a^[l] = sigma(W a^[l-1] + b) with identity on the final
/// layer. V may be double, a dual/jet scalar, or a tape variable.
template <class V>
std::vector<V> forward(const NetworkParams& params, std::span<const V> input) {
  return detail::forward_impl<V, double>(params.arch, std::span<const double>(params.theta), input);
}

inline std::vector<double> forward(const NetworkParams& params, std::span<const double> input) {
  return detail::forward_impl<double, double>(params.arch, std::span<const double>(params.theta),
                                              input);
}

/// Forward pass with the parameter vector itself as the active type, for
/// differentiating w.r.t. theta through the general tape.
template <class V>
std::vector<V> forward_with_theta(const Architecture& arch, std::span<const V> theta,
                                  std::span<const V> input) {
  return detail::forward_impl<V, V>(arch, theta, input);
}

/// Single-output convenience.
template <class V>
V forward_scalar(const NetworkParams& params, std::span<const V> input) {
  return forward(params, input).front();
}

// ---------------------------------------------------------------------------
// Parameter persistence: flat CSV of (layer,row,col,value); the bias of row r
// is stored at col == fan_in. 17 significant digits round-trip doubles
// bit-exactly.
// ---------------------------------------------------------------------------

inline void save_params_csv(const NetworkParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  out << "layer,row,col,value\n";
  char buf[64];
  for (int l = 0; l < p.arch.num_layers(); ++l) {
    const int n_in = p.arch.sizes[l], n_out = p.arch.sizes[l + 1];
    auto w = p.weights(l);
    auto b = p.biases(l);
    for (int i = 0; i < n_out; ++i) {
      for (int j = 0; j < n_in; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", w[static_cast<std::size_t>(i) * n_in + j]);
        out << l << ',' << i << ',' << j << ',' << buf << '\n';
      }
      std::snprintf(buf, sizeof buf, "%.17g", b[i]);
      out << l << ',' << i << ',' << n_in << ',' << buf << '\n';
    }
  }
  if (!out) throw ArgumentError("write failed for " + path);
}

/// Loads a parameter CSV into the given architecture (which defines the
/// expected shape); every entry must be present exactly once.
inline NetworkParams load_params_csv(const Architecture& arch, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  NetworkParams p;
  p.arch = arch;
  p.theta.assign(static_cast<std::size_t>(param_count(arch.sizes)), 0.0);
  std::vector<bool> seen(p.theta.size(), false);
  std::string line;
  if (!std::getline(in, line) || line.rfind("layer,row,col,value", 0) != 0)
    throw ArgumentError(path + ": missing params header");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int l, i, j;
    double v;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf", &l, &i, &j, &v) != 4)
      throw ArgumentError(path + ": malformed row '" + line + "'");
    if (l < 0 || l >= arch.num_layers()) throw ArgumentError(path + ": layer out of range");
    const int n_in = arch.sizes[l], n_out = arch.sizes[l + 1];
    if (i < 0 || i >= n_out || j < 0 || j > n_in)
      throw ArgumentError(path + ": index out of range at layer " + std::to_string(l));
    std::size_t off = p.layer_offset(l);
    std::size_t idx = (j == n_in)
                          ? off + static_cast<std::size_t>(n_out) * n_in + i
                          : off + static_cast<std::size_t>(i) * n_in + j;
    p.theta[idx] = v;
    seen[idx] = true;
    ++rows;
  }
  if (rows != p.theta.size())
    throw ArgumentError(path + ": expected " + std::to_string(p.theta.size()) + " entries, got " +
                        std::to_string(rows));
  for (bool s : seen)
    if (!s) throw ArgumentError(path + ": missing entries");
  return p;
}

}  // namespace pinn
