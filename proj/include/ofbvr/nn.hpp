#pragma once

#include <vector>

#include "ofbvr/core.hpp"
#include "ofbvr/rng.hpp"

namespace ofbvr::nn {

// Five 1D-convolution heads over the history vectors, one small dense head
// per scalar feature, everything concatenated into a single output layer.
// The critic uses the same body with a single output.
struct NetConfig {
  int history_len = 8;
  int n_history = 5;
  int n_scalars = 4;
  int conv_filters = 128;
  int conv_width = 3;
  int scalar_units = 128;
  int outputs = 216;

  int conv_out_len() const { return history_len - conv_width + 1; }
  int concat_size() const {
    return n_history * conv_filters * conv_out_len() + n_scalars * scalar_units;
  }
  void validate() const {
    if (history_len < conv_width || conv_width < 1 || conv_filters < 1 ||
        scalar_units < 1 || outputs < 1 || n_history < 0 || n_scalars < 0)
      throw InputError("bad network configuration");
  }
};

struct NetInput {
  std::vector<std::vector<double>> history;  // n_history x history_len
  std::vector<double> scalars;               // n_scalars
};

// Parameter block; doubles internally, serialized as 32-bit floats. Also
// used as the gradient container (same shapes).
struct Net {
  NetConfig cfg;
  std::vector<std::vector<double>> conv_w;  // per head, filters x width
  std::vector<std::vector<double>> conv_b;  // per head, filters
  std::vector<std::vector<double>> scal_w;  // per head, units
  std::vector<std::vector<double>> scal_b;  // per head, units
  std::vector<double> out_w;                // outputs x concat
  std::vector<double> out_b;                // outputs

  static Net zeros(const NetConfig& cfg);
  // Uniform fan-in initialization, deterministic in rng state. The output
  // layer starts at zero so an untrained actor is uniform.
  static Net initialized(const NetConfig& cfg, Rng& rng);

  void set_zero();
  void add_scaled(const Net& other, double factor);  // this += factor * other
  bool all_finite() const;
  std::vector<double*> flat_params();  // finite-difference hook
};

struct Cache {
  NetInput input;
  std::vector<std::vector<double>> conv_pre;  // per head, filters x T
  std::vector<std::vector<double>> scal_pre;  // per head, units
  std::vector<double> concat;                 // post-ReLU
  std::vector<double> logits;
};

void forward(const Net& net, const NetInput& in, Cache& cache);

std::vector<double> softmax(const std::vector<double>& logits);

// Entropy of a distribution, with the probability floor applied.
double entropy(const std::vector<double>& probs);

constexpr double kProbFloor = 1e-12;

// Accumulates d(loss)/d(params) into grad for the given d(loss)/d(logits).
void backward(const Net& net, const Cache& cache,
              const std::vector<double>& dlogits, Net& grad);

}  // namespace ofbvr::nn
