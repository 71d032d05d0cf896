#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ofbvr/abr.hpp"
#include "ofbvr/manifest.hpp"

namespace ofbvr {

struct BandwidthTrace {
  struct Sample {
    double t = 0.0;    // seconds
    double bps = 0.0;  // bits per second
  };
  std::vector<Sample> samples;

  void validate() const;
  double start() const { return samples.front().t; }
  double end() const { return samples.back().t; }
  // Mean throughput over the recorded span, weighted by segment duration.
  double time_weighted_mean() const;
};

struct ViewpointTrace {
  std::vector<ViewpointSample> samples;

  void validate() const;
  double end() const { return samples.back().t; }
  // Wrap-aware linear interpolation, clamped to the trace span.
  ViewpointSample at(double t) const;
};

// Smallest delta such that the trace delivers `bytes` starting at t_start,
// with piecewise-constant throughput held beyond the last sample. Throws
// when the remaining trace is all zero and bytes are still owed.
double download_time(double bytes, const BandwidthTrace& trace, double t_start);

// Least-squares linear extrapolation over the last `history` samples at or
// before t_now; yaw is unwrapped before fitting and wrapped after, pitch is
// clamped. Falls back to the nearest sample when under two are available.
ViewpointSample predict_viewpoint(const ViewpointTrace& trace, double t_now,
                                  double horizon, int history = 8);

struct SessionConfig {
  double chunk_duration = 1.0;
  double buffer_cap_s = 8.0;
  double startup_threshold_s = 2.0;
  double fov_deg = 100.0;
  double margin_deg = 30.0;
  double initial_rate_bps = 2e6;  // pre-measurement throughput estimate
  RewardWeights reward;
};

struct ChunkRecord {
  int chunk = 0;
  Action action;
  std::array<double, 3> area_budgets{};  // core, surround, outside; bytes
  double bytes = 0.0;
  double t_start = 0.0;  // wall clock at download start
  ChunkOutcome outcome;
  double buffer_after = 0.0;
  double reward = 0.0;
};

struct SessionLog {
  std::vector<ChunkRecord> chunks;
  double wall_s = 0.0;
  double playback_s = 0.0;
  double startup_delay_s = 0.0;
  double rebuffer_s = 0.0;
  double rebuffer_ratio = 0.0;
  double mean_psnr_of = 0.0;
  double total_reward = 0.0;
};

// Per-level whole-frame byte cost of the next chunk, what the rate
// heuristic fits against its throughput estimate.
struct ChunkCosts {
  std::array<double, Action::kLevels> uniform_total_bytes{};
};

// Sequential chunk-by-chunk playback over one video and one trace pair.
// A layout override (with plain-score allocation) realizes the fixed-grid
// baseline; evaluation always uses the perceptual scores.
class Session {
 public:
  struct Init {
    const VideoManifest* manifest = nullptr;
    const BandwidthTrace* bandwidth = nullptr;
    const ViewpointTrace* viewpoint = nullptr;
    SessionConfig config;
    const TileLayout* layout_override = nullptr;
    bool allocate_with_plain_scores = false;
  };

  explicit Session(const Init& init);

  bool done() const { return next_chunk_ >= manifest_->chunk_count; }
  const AbrState& state() const { return state_; }
  // Per-chunk records so far; aggregates are only filled by finish().
  const SessionLog& log() const { return log_; }
  ChunkCosts next_chunk_costs() const;
  ChunkOutcome step(const Action& action);
  // Plays out the remaining buffer and computes aggregates.
  SessionLog finish();

 private:
  const VideoManifest* manifest_;
  const BandwidthTrace* bandwidth_;
  const ViewpointTrace* viewpoint_;
  SessionConfig cfg_;
  TileLayout layout_;
  bool plain_alloc_ = false;
  std::vector<int> cell_rect_;  // cell index -> rect index

  AbrState state_{};
  SessionLog log_;
  int next_chunk_ = 0;
  double t_wall_ = 0.0;
  double buffer_ = 0.0;
  bool started_ = false;
  bool finished_ = false;
  double outside_share_sum_ = 0.0;
  std::optional<double> last_psnr_;

  std::vector<RectOptions> chunk_rect_options(int chunk) const;
};

using Controller = std::function<Action(const AbrState&, const ChunkCosts&)>;

SessionLog run_session(const Controller& controller, const Session::Init& init);

// Highest uniform level whose whole-frame cost fits the last measured rate
// times the chunk duration; blank when nothing fits.
Controller make_rate_controller(double chunk_duration);
Controller make_fixed_level_controller(int level);
Controller make_random_controller(std::uint64_t seed);
// Greedy (argmax) policy playback.
Controller make_policy_controller(std::shared_ptr<const PolicyParams> params);

// Training/evaluation environment over a set of (video, bandwidth,
// viewpoint) combinations. Enumerating mode maps episode seeds to scenarios
// round-robin (for validation); otherwise the seed drives a random pick.
class SessionEnv : public Env {
 public:
  struct Scenario {
    const VideoManifest* manifest = nullptr;
    const BandwidthTrace* bandwidth = nullptr;
    const ViewpointTrace* viewpoint = nullptr;
  };

  SessionEnv(std::vector<Scenario> scenarios, SessionConfig config,
             bool enumerate = false);

  int action_count() const override { return Action::kCount; }
  AbrState reset(std::uint64_t episode_seed) override;
  StepResult step(int action_index) override;

 private:
  std::vector<Scenario> scenarios_;
  SessionConfig cfg_;
  bool enumerate_;
  std::optional<Session> session_;
};

}  // namespace ofbvr
