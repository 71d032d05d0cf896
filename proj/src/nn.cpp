#include "ofbvr/nn.hpp"

#include <algorithm>
#include <cmath>

namespace ofbvr::nn {

Net Net::zeros(const NetConfig& cfg) {
  cfg.validate();
  Net n;
  n.cfg = cfg;
  n.conv_w.assign(cfg.n_history,
                  std::vector<double>(
                      static_cast<std::size_t>(cfg.conv_filters) * cfg.conv_width, 0.0));
  n.conv_b.assign(cfg.n_history, std::vector<double>(cfg.conv_filters, 0.0));
  n.scal_w.assign(cfg.n_scalars, std::vector<double>(cfg.scalar_units, 0.0));
  n.scal_b.assign(cfg.n_scalars, std::vector<double>(cfg.scalar_units, 0.0));
  n.out_w.assign(static_cast<std::size_t>(cfg.outputs) * cfg.concat_size(), 0.0);
  n.out_b.assign(cfg.outputs, 0.0);
  return n;
}

Net Net::initialized(const NetConfig& cfg, Rng& rng) {
  Net n = zeros(cfg);
  auto fill = [&rng](std::vector<double>& v, int fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& x : v) x = rng.uniform(-bound, bound);
  };
  for (auto& w : n.conv_w) fill(w, cfg.conv_width);
  for (auto& w : n.scal_w) fill(w, 1);
  // output layer left zero
  return n;
}

void Net::set_zero() {
  for (auto& w : conv_w) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : conv_b) std::fill(b.begin(), b.end(), 0.0);
  for (auto& w : scal_w) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : scal_b) std::fill(b.begin(), b.end(), 0.0);
  std::fill(out_w.begin(), out_w.end(), 0.0);
  std::fill(out_b.begin(), out_b.end(), 0.0);
}

void Net::add_scaled(const Net& other, double factor) {
  auto axpy = [factor](std::vector<double>& dst, const std::vector<double>& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += factor * src[i];
  };
  for (int h = 0; h < cfg.n_history; ++h) {
    axpy(conv_w[h], other.conv_w[h]);
    axpy(conv_b[h], other.conv_b[h]);
  }
  for (int s = 0; s < cfg.n_scalars; ++s) {
    axpy(scal_w[s], other.scal_w[s]);
    axpy(scal_b[s], other.scal_b[s]);
  }
  axpy(out_w, other.out_w);
  axpy(out_b, other.out_b);
}

bool Net::all_finite() const {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  for (const auto& w : conv_w)
    if (!ok(w)) return false;
  for (const auto& b : conv_b)
    if (!ok(b)) return false;
  for (const auto& w : scal_w)
    if (!ok(w)) return false;
  for (const auto& b : scal_b)
    if (!ok(b)) return false;
  return ok(out_w) && ok(out_b);
}

std::vector<double*> Net::flat_params() {
  std::vector<double*> out;
  auto push = [&out](std::vector<double>& v) {
    for (double& x : v) out.push_back(&x);
  };
  for (auto& w : conv_w) push(w);
  for (auto& b : conv_b) push(b);
  for (auto& w : scal_w) push(w);
  for (auto& b : scal_b) push(b);
  push(out_w);
  push(out_b);
  return out;
}

void forward(const Net& net, const NetInput& in, Cache& cache) {
  const NetConfig& cfg = net.cfg;
  if (static_cast<int>(in.history.size()) != cfg.n_history ||
      static_cast<int>(in.scalars.size()) != cfg.n_scalars)
    throw InputError("network input arity mismatch");
  for (const auto& h : in.history)
    if (static_cast<int>(h.size()) != cfg.history_len)
      throw InputError("history vector length mismatch");
  for (const auto& h : in.history)
    for (double v : h)
      if (!std::isfinite(v)) throw InputError("non-finite state entry");
  for (double v : in.scalars)
    if (!std::isfinite(v)) throw InputError("non-finite state entry");

  int T = cfg.conv_out_len();
  int F = cfg.conv_filters;
  int W = cfg.conv_width;
  int U = cfg.scalar_units;
  int C = cfg.concat_size();

  cache.input = in;
  cache.conv_pre.assign(cfg.n_history,
                        std::vector<double>(static_cast<std::size_t>(F) * T));
  cache.scal_pre.assign(cfg.n_scalars, std::vector<double>(U));
  cache.concat.assign(C, 0.0);
  cache.logits.assign(cfg.outputs, 0.0);

  std::size_t off = 0;
  for (int h = 0; h < cfg.n_history; ++h) {
    const std::vector<double>& x = in.history[h];
    const std::vector<double>& w = net.conv_w[h];
    const std::vector<double>& b = net.conv_b[h];
    std::vector<double>& pre = cache.conv_pre[h];
    for (int f = 0; f < F; ++f) {
      for (int t = 0; t < T; ++t) {
        double acc = b[f];
        for (int k = 0; k < W; ++k) acc += w[static_cast<std::size_t>(f) * W + k] * x[t + k];
        pre[static_cast<std::size_t>(f) * T + t] = acc;
        cache.concat[off + static_cast<std::size_t>(f) * T + t] =
            acc > 0.0 ? acc : 0.0;
      }
    }
    off += static_cast<std::size_t>(F) * T;
  }
  for (int s = 0; s < cfg.n_scalars; ++s) {
    double x = in.scalars[s];
    std::vector<double>& pre = cache.scal_pre[s];
    for (int u = 0; u < U; ++u) {
      double acc = net.scal_w[s][u] * x + net.scal_b[s][u];
      pre[u] = acc;
      cache.concat[off + u] = acc > 0.0 ? acc : 0.0;
    }
    off += U;
  }

  for (int o = 0; o < cfg.outputs; ++o) {
    double acc = net.out_b[o];
    const double* wrow = &net.out_w[static_cast<std::size_t>(o) * C];
    for (int c = 0; c < C; ++c) acc += wrow[c] * cache.concat[c];
    cache.logits[o] = acc;
  }
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    double q = std::max(p, kProbFloor);
    h -= p * std::log(q);
  }
  return h;
}

void backward(const Net& net, const Cache& cache,
              const std::vector<double>& dlogits, Net& grad) {
  const NetConfig& cfg = net.cfg;
  int T = cfg.conv_out_len();
  int F = cfg.conv_filters;
  int W = cfg.conv_width;
  int U = cfg.scalar_units;
  int C = cfg.concat_size();

  std::vector<double> dconcat(C, 0.0);
  for (int o = 0; o < cfg.outputs; ++o) {
    double d = dlogits[o];
    if (d == 0.0) continue;
    grad.out_b[o] += d;
    const double* wrow = &net.out_w[static_cast<std::size_t>(o) * C];
    double* grow = &grad.out_w[static_cast<std::size_t>(o) * C];
    for (int c = 0; c < C; ++c) {
      grow[c] += d * cache.concat[c];
      dconcat[c] += d * wrow[c];
    }
  }

  std::size_t off = 0;
  for (int h = 0; h < cfg.n_history; ++h) {
    const std::vector<double>& x = cache.input.history[h];
    const std::vector<double>& pre = cache.conv_pre[h];
    for (int f = 0; f < F; ++f) {
      for (int t = 0; t < T; ++t) {
        std::size_t i = static_cast<std::size_t>(f) * T + t;
        if (pre[i] <= 0.0) continue;  // ReLU gate
        double d = dconcat[off + i];
        if (d == 0.0) continue;
        grad.conv_b[h][f] += d;
        for (int k = 0; k < W; ++k)
          grad.conv_w[h][static_cast<std::size_t>(f) * W + k] += d * x[t + k];
      }
    }
    off += static_cast<std::size_t>(F) * T;
  }
  for (int s = 0; s < cfg.n_scalars; ++s) {
    double x = cache.input.scalars[s];
    const std::vector<double>& pre = cache.scal_pre[s];
    for (int u = 0; u < U; ++u) {
      if (pre[u] <= 0.0) continue;
      double d = dconcat[off + u];
      grad.scal_b[s][u] += d;
      grad.scal_w[s][u] += d * x;
    }
    off += U;
  }
}

}  // namespace ofbvr::nn
