#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ofbvr/core.hpp"
#include "ofbvr/nn.hpp"
#include "ofbvr/qoe.hpp"
#include "ofbvr/tiling.hpp"
#include "ofbvr/viewport.hpp"

namespace ofbvr {

// The controller observation: five history vectors (index 0 oldest) plus
// scalar features.
struct AbrState {
  static constexpr int kHistory = 8;
  std::array<double, kHistory> psnr_hist{};
  std::array<double, kHistory> tau_hist{};
  std::array<double, kHistory> core_bps_hist{};
  std::array<double, kHistory> surround_bps_hist{};
  std::array<double, kHistory> outside_bps_hist{};
  double buffer_s = 0.0;
  double rate_bps = 0.0;
  double outside_miss_ratio = 0.0;   // predicted-outside tiles seen anyway
  double outside_share_mean = 0.0;   // running mean of outside byte share
};

// One quality level per area, each an index into the 6-entry ladder.
struct Action {
  static constexpr int kLevels = 6;
  static constexpr int kCount = kLevels * kLevels * kLevels;

  int core = 0;
  int surround = 0;
  int outside = 0;

  int index() const { return (core * kLevels + surround) * kLevels + outside; }
  static Action from_index(int idx) {
    if (idx < 0 || idx >= kCount) throw InputError("action index out of range");
    return Action{idx / (kLevels * kLevels), (idx / kLevels) % kLevels,
                  idx % kLevels};
  }
};

// Per-chunk result feeding the reward and the state histories.
struct ChunkOutcome {
  double psnr_of = 0.0;
  double rebuffer_s = 0.0;
  double outside_miss_ratio = 0.0;
  double core_bps = 0.0;
  double surround_bps = 0.0;
  double outside_bps = 0.0;
  double download_s = 0.0;
};

struct RewardWeights {
  double alpha = 33.0;  // rebuffer penalty
  double beta = 1.0;    // outside-miss penalty
};

// Reward of one chunk; prev_psnr enables the smoothness term (pass nullptr
// for the first chunk).
double chunk_reward(double psnr, double rebuffer_s, double miss_ratio,
                    const double* prev_psnr, const RewardWeights& w = {});

// Session total: sum(P) - alpha*sum(Rt) - beta*sum(ratio) - sum|P_{n+1}-P_n|.
double total_reward(std::span<const ChunkOutcome> outcomes,
                    const RewardWeights& w = {});

// ---- per-tile quality allocation ----

// Per-rect byte/score table, one entry per quality level (index 0 blank).
struct RectOptions {
  std::vector<double> bytes;
  std::vector<double> value;
};

// Picks one level per rect maximizing total value subject to total bytes
// <= budget. Exact for small budgets, quantized (always feasible) for large
// ones. Blank is the all-fits fallback.
std::vector<int> allocate_levels(const std::vector<RectOptions>& rects,
                                 double budget_bytes);

// Independent per-area allocation: rects of each area share that area's
// budget only.
std::vector<int> allocate_tiles(const std::vector<Area>& labels,
                                const std::array<double, 3>& area_budgets,
                                const std::vector<RectOptions>& rects);

// Derives per-rect tables from the basic-tile grid: rect bytes/value are the
// sums over member cells.
std::vector<RectOptions> build_rect_options(const TileScoreGrid& grid,
                                            const TileLayout& layout);
std::vector<RectOptions> build_rect_options(const TileScoreGrid& sizes_from,
                                            const std::vector<double>& scores,
                                            const TileLayout& layout);

// ---- policy ----

struct PolicyParams {
  nn::Net actor;
  nn::Net critic;

  static PolicyParams initialized(const nn::NetConfig& actor_cfg,
                                  std::uint64_t seed);
  bool all_finite() const { return actor.all_finite() && critic.all_finite(); }
};

// Fixed scales mapping raw state units into network-friendly ranges.
struct StateScale {
  double psnr_db = 100.0;
  double tau_s = 10.0;
  double bps = 1e7;
  double buffer_s = 10.0;
  double rate_bps = 1e7;
};

nn::NetInput encode_state(const AbrState& state, const StateScale& scale = {});

// Action distribution (sums to one) for the state.
std::vector<double> policy_forward(const AbrState& state,
                                   const PolicyParams& params);

// Scalar value estimate.
double critic_forward(const AbrState& state, const PolicyParams& params);

// n-step advantage: sum gamma^k r_k + gamma^n * bootstrap - current.
double advantage(std::span<const double> rewards, double bootstrap,
                 double current, double gamma);

struct TrajectoryStep {
  nn::NetInput input;
  int action = 0;
  double reward = 0.0;
};

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
};

// One accumulated actor-critic update over the trajectory window:
// theta += lr * sum_t [A_t grad log pi(a_t|s_t) + w_ent grad H], critic
// moves toward the n-step returns. bootstrap_value is V of the state after
// the window (zero at episode end).
UpdateStats policy_gradient_step(PolicyParams& params,
                                 const std::vector<TrajectoryStep>& trajectory,
                                 double bootstrap_value, double gamma,
                                 double actor_lr, double critic_lr,
                                 double entropy_weight);

// ---- training ----

class Env {
 public:
  virtual ~Env() = default;
  virtual int action_count() const = 0;
  virtual AbrState reset(std::uint64_t episode_seed) = 0;
  struct StepResult {
    AbrState state;
    double reward = 0.0;
    bool done = false;
  };
  virtual StepResult step(int action_index) = 0;
};

struct TrainConfig {
  int episodes = 500;
  int n_step = 8;
  double gamma = 0.99;
  double actor_lr = 1e-4;
  double critic_lr = 1e-4;
  double entropy_start = 0.01;
  double entropy_end = 0.001;
  double reward_scale = 0.01;  // gradient-side scaling; logs stay raw
  std::uint64_t seed = 1;
  int workers = 1;
  int validation_episodes = 0;  // greedy episodes per validation pass
  int validate_every = 0;       // 0: only before/after training
};

struct EpisodeStats {
  int episode = 0;
  double mean_reward = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpisodeStats> log;
  double initial_validation = 0.0;
  double best_validation = 0.0;
};

using EnvFactory = std::function<std::unique_ptr<Env>()>;

// Advantage actor-critic training. With a validation factory the returned
// params are the best validation checkpoint, so they never score below the
// initial ones. Single-worker runs are bit-reproducible for a fixed seed.
TrainResult train(const EnvFactory& make_env, const EnvFactory& make_validation,
                  const nn::NetConfig& actor_cfg, const TrainConfig& cfg);

// Mean greedy episode reward over `episodes` enumerated validation episodes.
double evaluate_policy(Env& env, const PolicyParams& params, int episodes);

}  // namespace ofbvr
