#include "ofbvr/abr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ofbvr {

double chunk_reward(double psnr, double rebuffer_s, double miss_ratio,
                    const double* prev_psnr, const RewardWeights& w) {
  double r = psnr - w.alpha * rebuffer_s - w.beta * miss_ratio;
  if (prev_psnr) r -= std::abs(psnr - *prev_psnr);
  return r;
}

double total_reward(std::span<const ChunkOutcome> outcomes,
                    const RewardWeights& w) {
  if (outcomes.empty()) throw InputError("reward needs at least one outcome");
  double total = 0.0;
  for (std::size_t n = 0; n < outcomes.size(); ++n) {
    const ChunkOutcome& oc = outcomes[n];
    const double* prev = n > 0 ? &outcomes[n - 1].psnr_of : nullptr;
    total += chunk_reward(oc.psnr_of, oc.rebuffer_s, oc.outside_miss_ratio,
                          prev, w);
  }
  return total;
}

namespace {

// Exact group-knapsack below this budget; above it bytes are quantized into
// kBins steps (weights rounded up, so picks always fit the true budget).
constexpr double kExactBudget = 8192.0;
constexpr int kBins = 2048;

std::vector<int> knapsack(const std::vector<RectOptions>& rects,
                          double budget) {
  int n = static_cast<int>(rects.size());
  double gran = budget <= kExactBudget
                    ? 1.0
                    : std::ceil(budget / static_cast<double>(kBins));
  int cap = static_cast<int>(std::floor(budget / gran));

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> dp(static_cast<std::size_t>(cap) + 1, kNegInf);
  dp[0] = 0.0;
  // choice[r][c]: level picked for rect r at capacity c
  std::vector<std::vector<std::int8_t>> choice(
      n, std::vector<std::int8_t>(static_cast<std::size_t>(cap) + 1, -1));

  std::vector<double> next(static_cast<std::size_t>(cap) + 1);
  for (int r = 0; r < n; ++r) {
    std::fill(next.begin(), next.end(), kNegInf);
    int levels = static_cast<int>(rects[r].bytes.size());
    for (int l = 0; l < levels; ++l) {
      double b = rects[r].bytes[l];
      if (b < 0) throw InputError("negative tile size");
      long w = static_cast<long>(std::ceil(b / gran));
      if (w > cap) continue;
      double v = rects[r].value[l];
      for (int c = static_cast<int>(w); c <= cap; ++c) {
        double base = dp[c - w];
        if (base == kNegInf) continue;
        double cand = base + v;
        if (cand > next[c]) {
          next[c] = cand;
          choice[r][c] = static_cast<std::int8_t>(l);
        }
      }
    }
    dp.swap(next);
  }

  int best_c = 0;
  for (int c = 1; c <= cap; ++c)
    if (dp[c] > dp[best_c]) best_c = c;

  std::vector<int> picks(n, 0);
  int c = best_c;
  for (int r = n - 1; r >= 0; --r) {
    int l = choice[r][c];
    if (l < 0) throw InputError("allocation backtrack failed");
    picks[r] = l;
    c -= static_cast<int>(
        std::ceil(rects[r].bytes[l] / gran));
  }
  return picks;
}

double picks_value(const std::vector<RectOptions>& rects,
                   const std::vector<int>& picks) {
  double v = 0.0;
  for (std::size_t r = 0; r < rects.size(); ++r) v += rects[r].value[picks[r]];
  return v;
}

double picks_bytes(const std::vector<RectOptions>& rects,
                   const std::vector<int>& picks) {
  double b = 0.0;
  for (std::size_t r = 0; r < rects.size(); ++r) b += rects[r].bytes[picks[r]];
  return b;
}

}  // namespace

std::vector<int> allocate_levels(const std::vector<RectOptions>& rects,
                                 double budget_bytes) {
  if (budget_bytes < 0) throw InputError("budget must be >= 0");
  if (rects.empty()) return {};
  for (const RectOptions& r : rects) {
    if (r.bytes.empty() || r.bytes.size() != r.value.size())
      throw InputError("rect level tables malformed");
    if (r.bytes[0] != 0.0)
      throw InputError("blank level must have zero size");
  }

  std::vector<int> best = knapsack(rects, budget_bytes);
  // Quantization never drops the all-one-level picks that fit by true bytes;
  // keep whichever scores higher.
  int levels = static_cast<int>(rects[0].bytes.size());
  for (int l = 0; l < levels; ++l) {
    std::vector<int> uniform(rects.size(), l);
    bool valid = true;
    for (const RectOptions& r : rects)
      if (l >= static_cast<int>(r.bytes.size())) valid = false;
    if (!valid) continue;
    if (picks_bytes(rects, uniform) <= budget_bytes &&
        picks_value(rects, uniform) > picks_value(rects, best))
      best = uniform;
  }
  return best;
}

std::vector<int> allocate_tiles(const std::vector<Area>& labels,
                                const std::array<double, 3>& area_budgets,
                                const std::vector<RectOptions>& rects) {
  if (labels.size() != rects.size())
    throw InputError("labels/rects size mismatch");
  std::vector<int> out(rects.size(), 0);
  for (int a = 0; a < 3; ++a) {
    std::vector<std::size_t> members;
    std::vector<RectOptions> sub;
    for (std::size_t i = 0; i < rects.size(); ++i) {
      if (static_cast<int>(labels[i]) != a) continue;
      members.push_back(i);
      sub.push_back(rects[i]);
    }
    if (sub.empty()) continue;
    std::vector<int> picks = allocate_levels(sub, area_budgets[a]);
    for (std::size_t j = 0; j < members.size(); ++j) out[members[j]] = picks[j];
  }
  return out;
}

std::vector<RectOptions> build_rect_options(const TileScoreGrid& grid,
                                            const TileLayout& layout) {
  return build_rect_options(grid, grid.scores, layout);
}

std::vector<RectOptions> build_rect_options(const TileScoreGrid& sizes_from,
                                            const std::vector<double>& scores,
                                            const TileLayout& layout) {
  if (layout.rows != sizes_from.rows || layout.cols != sizes_from.cols)
    throw InputError("layout/grid dimensions mismatch");
  if (scores.size() != sizes_from.sizes.size())
    throw InputError("score table size mismatch");
  std::vector<RectOptions> out;
  out.reserve(layout.rects.size());
  for (const TileRect& rect : layout.rects) {
    RectOptions ro;
    ro.bytes.assign(sizes_from.n_levels, 0.0);
    ro.value.assign(sizes_from.n_levels, 0.0);
    for (int row = rect.x1; row <= rect.x2; ++row) {
      for (int col = rect.y1; col <= rect.y2; ++col) {
        for (int l = 0; l < sizes_from.n_levels; ++l) {
          std::size_t i = sizes_from.idx(row - 1, col - 1, l);
          ro.bytes[l] += sizes_from.sizes[i];
          ro.value[l] += scores[i];
        }
      }
    }
    out.push_back(std::move(ro));
  }
  return out;
}

PolicyParams PolicyParams::initialized(const nn::NetConfig& actor_cfg,
                                       std::uint64_t seed) {
  nn::NetConfig critic_cfg = actor_cfg;
  critic_cfg.outputs = 1;
  Rng rng(seed);
  PolicyParams p;
  p.actor = nn::Net::initialized(actor_cfg, rng);
  p.critic = nn::Net::initialized(critic_cfg, rng);
  return p;
}

nn::NetInput encode_state(const AbrState& s, const StateScale& sc) {
  nn::NetInput in;
  in.history.resize(5);
  for (auto& h : in.history) h.resize(AbrState::kHistory);
  for (int i = 0; i < AbrState::kHistory; ++i) {
    in.history[0][i] = s.psnr_hist[i] / sc.psnr_db;
    in.history[1][i] = s.tau_hist[i] / sc.tau_s;
    in.history[2][i] = s.core_bps_hist[i] / sc.bps;
    in.history[3][i] = s.surround_bps_hist[i] / sc.bps;
    in.history[4][i] = s.outside_bps_hist[i] / sc.bps;
  }
  in.scalars = {s.buffer_s / sc.buffer_s, s.rate_bps / sc.rate_bps,
                s.outside_miss_ratio, s.outside_share_mean};
  return in;
}

std::vector<double> policy_forward(const AbrState& state,
                                   const PolicyParams& params) {
  nn::Cache cache;
  nn::forward(params.actor, encode_state(state), cache);
  return nn::softmax(cache.logits);
}

double critic_forward(const AbrState& state, const PolicyParams& params) {
  nn::Cache cache;
  nn::forward(params.critic, encode_state(state), cache);
  return cache.logits[0];
}

double advantage(std::span<const double> rewards, double bootstrap,
                 double current, double gamma) {
  if (rewards.empty()) throw InputError("advantage needs >= 1 reward");
  double g = bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) g = rewards[i] + gamma * g;
  return g - current;
}

UpdateStats policy_gradient_step(PolicyParams& params,
                                 const std::vector<TrajectoryStep>& trajectory,
                                 double bootstrap_value, double gamma,
                                 double actor_lr, double critic_lr,
                                 double entropy_weight) {
  if (trajectory.empty()) throw InputError("empty trajectory");
  int n = static_cast<int>(trajectory.size());

  nn::Net actor_grad = nn::Net::zeros(params.actor.cfg);
  nn::Net critic_grad = nn::Net::zeros(params.critic.cfg);

  // n-step returns, computed backwards from the bootstrap value
  std::vector<double> returns(n);
  double g = bootstrap_value;
  for (int t = n - 1; t >= 0; --t) {
    g = trajectory[t].reward + gamma * g;
    returns[t] = g;
  }

  UpdateStats stats;
  nn::Cache actor_cache, critic_cache;
  for (int t = 0; t < n; ++t) {
    const TrajectoryStep& step = trajectory[t];

    nn::forward(params.critic, step.input, critic_cache);
    double value = critic_cache.logits[0];
    double adv = returns[t] - value;

    nn::forward(params.actor, step.input, actor_cache);
    std::vector<double> probs = nn::softmax(actor_cache.logits);
    double h = nn::entropy(probs);
    double log_pa =
        std::log(std::max(probs[step.action], nn::kProbFloor));

    // ascent on A*log pi + w*H
    std::vector<double> dlogits(probs.size());
    for (std::size_t j = 0; j < probs.size(); ++j) {
      double d_logp = (static_cast<int>(j) == step.action ? 1.0 : 0.0) - probs[j];
      double d_ent = -probs[j] * (std::log(std::max(probs[j], nn::kProbFloor)) + h);
      dlogits[j] = adv * d_logp + entropy_weight * d_ent;
    }
    nn::backward(params.actor, actor_cache, dlogits, actor_grad);

    // critic descent on 0.5*(V - G)^2: dV = value - G, flip sign for ascent
    std::vector<double> dvalue{-(value - returns[t])};
    nn::backward(params.critic, critic_cache, dvalue, critic_grad);

    stats.actor_loss += -adv * log_pa;
    stats.critic_loss += (value - returns[t]) * (value - returns[t]);
    stats.entropy += h;
  }
  stats.actor_loss /= n;
  stats.critic_loss /= n;
  stats.entropy /= n;

  if (!actor_grad.all_finite() || !critic_grad.all_finite())
    throw TrainingError("non-finite gradient (actor_loss=" +
                        std::to_string(stats.actor_loss) +
                        ", critic_loss=" + std::to_string(stats.critic_loss) +
                        ")");
  params.actor.add_scaled(actor_grad, actor_lr);
  params.critic.add_scaled(critic_grad, critic_lr);
  if (!params.all_finite())
    throw TrainingError("non-finite parameters after update");
  return stats;
}

}  // namespace ofbvr
