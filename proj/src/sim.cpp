#include "ofbvr/sim.hpp"

#include <algorithm>
#include <cmath>

#include "ofbvr/rng.hpp"

namespace ofbvr {

void BandwidthTrace::validate() const {
  if (samples.size() < 2) throw InputError("bandwidth trace needs >= 2 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].bps < 0) throw InputError("negative throughput");
    if (i > 0 && !(samples[i].t > samples[i - 1].t))
      throw InputError("bandwidth timestamps must strictly increase");
  }
}

double BandwidthTrace::time_weighted_mean() const {
  validate();
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    area += samples[i].bps * (samples[i + 1].t - samples[i].t);
  return area / (end() - start());
}

void ViewpointTrace::validate() const {
  if (samples.empty()) throw InputError("viewpoint trace is empty");
  double dt0 = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    validate_angles(samples[i].yaw, samples[i].pitch);
    if (i > 0) {
      double dt = samples[i].t - samples[i - 1].t;
      if (!(dt > 0)) throw InputError("viewpoint timestamps must increase");
      if (i == 1)
        dt0 = dt;
      else if (std::abs(dt - dt0) > 1e-6 * std::max(1.0, dt0))
        throw InputError("viewpoint trace must be uniformly sampled");
    }
  }
}

ViewpointSample ViewpointTrace::at(double t) const {
  if (samples.empty()) throw InputError("viewpoint trace is empty");
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  std::size_t hi = 1;
  while (samples[hi].t < t) ++hi;
  const ViewpointSample& a = samples[hi - 1];
  const ViewpointSample& b = samples[hi];
  double f = (t - a.t) / (b.t - a.t);
  ViewpointSample out = a;
  out.t = t;
  double dyaw = wrap_yaw(b.yaw - a.yaw);
  out.yaw = wrap_yaw(a.yaw + f * dyaw);
  out.pitch = a.pitch + f * (b.pitch - a.pitch);
  out.vx = a.vx + f * (b.vx - a.vx);
  out.vy = a.vy + f * (b.vy - a.vy);
  return out;
}

double download_time(double bytes, const BandwidthTrace& trace,
                     double t_start) {
  if (bytes < 0) throw InputError("bytes must be >= 0");
  trace.validate();
  if (bytes == 0) return 0.0;

  double bits_left = 8.0 * bytes;
  double t = t_start;
  std::size_t i = 0;
  // segment i spans [samples[i].t, samples[i+1].t); the last throughput
  // holds forever
  while (i + 1 < trace.samples.size() && trace.samples[i + 1].t <= t) ++i;
  while (true) {
    double rate = trace.samples[i].bps;
    bool last = i + 1 == trace.samples.size();
    double seg_end = last ? 0.0 : trace.samples[i + 1].t;
    if (last) {
      if (rate <= 0.0)
        throw InputError("bandwidth trace stalls: zero throughput to horizon");
      return t + bits_left / rate - t_start;
    }
    double dt = seg_end - t;
    double deliverable = rate * dt;
    if (deliverable >= bits_left) {
      if (rate <= 0.0) {
        // zero-rate segment cannot finish the chunk; skip to its end
        t = seg_end;
        ++i;
        continue;
      }
      return t + bits_left / rate - t_start;
    }
    bits_left -= deliverable;
    t = seg_end;
    ++i;
  }
}

ViewpointSample predict_viewpoint(const ViewpointTrace& trace, double t_now,
                                  double horizon, int history) {
  if (trace.samples.empty()) throw InputError("viewpoint trace is empty");
  if (history < 2) throw InputError("history must be >= 2");

  // samples at or before t_now
  std::size_t n_avail = 0;
  while (n_avail < trace.samples.size() && trace.samples[n_avail].t <= t_now)
    ++n_avail;
  if (n_avail < 2) {
    // degraded mode: hold the nearest known sample
    return trace.samples[n_avail == 0 ? 0 : n_avail - 1];
  }

  std::size_t count = std::min<std::size_t>(history, n_avail);
  std::size_t first = n_avail - count;

  // unwrap yaw across the window
  std::vector<double> yaw_u(count), pitch(count), ts(count);
  yaw_u[0] = trace.samples[first].yaw;
  ts[0] = trace.samples[first].t;
  pitch[0] = trace.samples[first].pitch;
  for (std::size_t k = 1; k < count; ++k) {
    const ViewpointSample& s = trace.samples[first + k];
    yaw_u[k] = yaw_u[k - 1] + wrap_yaw(s.yaw - trace.samples[first + k - 1].yaw);
    pitch[k] = s.pitch;
    ts[k] = s.t;
  }

  double mean_t = 0, mean_y = 0, mean_p = 0;
  for (std::size_t k = 0; k < count; ++k) {
    mean_t += ts[k];
    mean_y += yaw_u[k];
    mean_p += pitch[k];
  }
  mean_t /= count;
  mean_y /= count;
  mean_p /= count;
  double var_t = 0, cov_y = 0, cov_p = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double dt = ts[k] - mean_t;
    var_t += dt * dt;
    cov_y += dt * (yaw_u[k] - mean_y);
    cov_p += dt * (pitch[k] - mean_p);
  }
  double slope_y = var_t > 0 ? cov_y / var_t : 0.0;
  double slope_p = var_t > 0 ? cov_p / var_t : 0.0;

  double t_target = t_now + horizon;
  ViewpointSample out = trace.samples[n_avail - 1];
  out.t = t_target;
  out.yaw = wrap_yaw(mean_y + slope_y * (t_target - mean_t));
  out.pitch = std::clamp(mean_p + slope_p * (t_target - mean_t), -90.0, 90.0);
  return out;
}

Session::Session(const Init& init)
    : manifest_(init.manifest),
      bandwidth_(init.bandwidth),
      viewpoint_(init.viewpoint),
      cfg_(init.config),
      plain_alloc_(init.allocate_with_plain_scores) {
  if (!manifest_ || !bandwidth_ || !viewpoint_)
    throw InputError("session needs manifest, bandwidth and viewpoint");
  manifest_->validate();
  bandwidth_->validate();
  viewpoint_->validate();
  if (!(cfg_.chunk_duration > 0) || !(cfg_.buffer_cap_s > 0) ||
      !(cfg_.startup_threshold_s > 0))
    throw InputError("session durations must be > 0");
  if (cfg_.startup_threshold_s > cfg_.buffer_cap_s)
    throw InputError("startup threshold exceeds buffer cap");

  double video_s = manifest_->chunk_count * cfg_.chunk_duration;
  if (bandwidth_->end() < video_s || viewpoint_->end() < video_s - 1e-9)
    throw InputError("trace shorter than the video");

  layout_ = init.layout_override ? *init.layout_override : manifest_->layout;
  layout_.validate();
  if (layout_.rows != manifest_->layout.rows ||
      layout_.cols != manifest_->layout.cols)
    throw InputError("layout override grid mismatch");

  cell_rect_.assign(static_cast<std::size_t>(layout_.rows) * layout_.cols, -1);
  for (int r = 0; r < layout_.rows; ++r)
    for (int c = 0; c < layout_.cols; ++c)
      cell_rect_[static_cast<std::size_t>(r) * layout_.cols + c] =
          layout_.rect_of_cell(r, c);

  state_.rate_bps = cfg_.initial_rate_bps;
}

std::vector<RectOptions> Session::chunk_rect_options(int chunk) const {
  const ChunkScores& cs = manifest_->chunks[chunk];
  return plain_alloc_
             ? build_rect_options(cs.perceptual, cs.plain_scores, layout_)
             : build_rect_options(cs.perceptual, layout_);
}

ChunkCosts Session::next_chunk_costs() const {
  if (done()) throw InputError("session exhausted");
  const TileScoreGrid& g = manifest_->chunks[next_chunk_].perceptual;
  ChunkCosts costs;
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c)
      for (int l = 0; l < std::min(g.n_levels, Action::kLevels); ++l)
        costs.uniform_total_bytes[l] += g.size(r, c, l);
  return costs;
}

ChunkOutcome Session::step(const Action& action) {
  if (done()) throw InputError("session exhausted");
  for (int l : {action.core, action.surround, action.outside})
    if (l < 0 || l >= manifest_->ladder.levels())
      throw InputError("action level out of range");

  int n = next_chunk_;
  double D = cfg_.chunk_duration;
  const ChunkScores& cs = manifest_->chunks[n];

  // viewpoint prediction from what has played so far
  double playback_pos = started_ ? n * D - buffer_ : 0.0;
  playback_pos = std::max(playback_pos, 0.0);
  double target = (n + 0.5) * D;
  ViewpointSample predicted =
      predict_viewpoint(*viewpoint_, playback_pos, target - playback_pos);
  std::vector<Area> labels =
      classify_areas(layout_, predicted, cfg_.fov_deg, cfg_.margin_deg);

  // the action sets each area's byte budget at its chosen level
  std::vector<RectOptions> options = chunk_rect_options(n);
  std::array<int, 3> area_level{action.core, action.surround, action.outside};
  std::array<double, 3> budgets{};
  for (std::size_t r = 0; r < options.size(); ++r) {
    int a = static_cast<int>(labels[r]);
    budgets[a] += options[r].bytes[area_level[a]];
  }
  std::vector<int> levels = allocate_tiles(labels, budgets, options);

  double bytes = 0.0;
  std::array<double, 3> area_bytes{};
  for (std::size_t r = 0; r < options.size(); ++r) {
    double b = options[r].bytes[levels[r]];
    bytes += b;
    area_bytes[static_cast<int>(labels[r])] += b;
  }

  // fluid download, buffer bookkeeping
  double t_start = t_wall_;
  double d = download_time(bytes, *bandwidth_, t_start);
  double rebuffer = 0.0;
  if (!started_) {
    log_.startup_delay_s += d;
  } else {
    double played = std::min(d, buffer_);
    rebuffer = d - played;
    log_.playback_s += played;
    log_.rebuffer_s += rebuffer;
    buffer_ -= played;
  }
  t_wall_ += d;
  buffer_ += D;
  if (!started_ && buffer_ >= cfg_.startup_threshold_s) started_ = true;
  if (buffer_ > cfg_.buffer_cap_s) {
    double drain = buffer_ - cfg_.buffer_cap_s;
    t_wall_ += drain;
    if (started_) log_.playback_s += drain;
    buffer_ = cfg_.buffer_cap_s;
  }

  // judge against the viewport actually seen at the chunk midpoint
  ViewpointSample actual = viewpoint_->at(target);
  std::vector<int> vcells =
      viewport_cells(layout_.rows, layout_.cols, actual, cfg_.fov_deg);
  double score_sum = 0.0;
  int missed = 0;
  for (int cell : vcells) {
    int rect = cell_rect_[cell];
    int row = cell / layout_.cols, col = cell % layout_.cols;
    score_sum += cs.perceptual.score(row, col, levels[rect]);
    if (labels[rect] == Area::kOutside) ++missed;
  }
  ChunkOutcome oc;
  oc.psnr_of = score_sum / static_cast<double>(vcells.size());
  oc.rebuffer_s = rebuffer;
  oc.outside_miss_ratio = static_cast<double>(missed) / vcells.size();
  oc.download_s = d;
  oc.core_bps = area_bytes[0] * 8.0 / D;
  oc.surround_bps = area_bytes[1] * 8.0 / D;
  oc.outside_bps = area_bytes[2] * 8.0 / D;

  // roll the state forward
  auto push = [](std::array<double, AbrState::kHistory>& h, double v) {
    for (int i = 0; i + 1 < AbrState::kHistory; ++i) h[i] = h[i + 1];
    h[AbrState::kHistory - 1] = v;
  };
  push(state_.psnr_hist, oc.psnr_of);
  push(state_.tau_hist, d);
  push(state_.core_bps_hist, oc.core_bps);
  push(state_.surround_bps_hist, oc.surround_bps);
  push(state_.outside_bps_hist, oc.outside_bps);
  state_.buffer_s = buffer_;
  if (bytes > 0 && d > 0) state_.rate_bps = bytes * 8.0 / d;
  state_.outside_miss_ratio = oc.outside_miss_ratio;
  outside_share_sum_ += bytes > 0 ? area_bytes[2] / bytes : 0.0;
  state_.outside_share_mean = outside_share_sum_ / (n + 1);

  double reward =
      chunk_reward(oc.psnr_of, oc.rebuffer_s, oc.outside_miss_ratio,
                   last_psnr_ ? &*last_psnr_ : nullptr, cfg_.reward);
  last_psnr_ = oc.psnr_of;

  ChunkRecord rec;
  rec.chunk = n;
  rec.action = action;
  rec.area_budgets = budgets;
  rec.bytes = bytes;
  rec.t_start = t_start;
  rec.outcome = oc;
  rec.buffer_after = buffer_;
  rec.reward = reward;
  log_.chunks.push_back(rec);

  ++next_chunk_;
  return oc;
}

SessionLog Session::finish() {
  if (!finished_) {
    finished_ = true;
    // remaining buffer plays out
    t_wall_ += buffer_;
    log_.playback_s += buffer_;
    buffer_ = 0.0;
    log_.wall_s = t_wall_;
    double psnr_sum = 0.0, reward_sum = 0.0;
    for (const ChunkRecord& r : log_.chunks) {
      psnr_sum += r.outcome.psnr_of;
      reward_sum += r.reward;
    }
    if (!log_.chunks.empty())
      log_.mean_psnr_of = psnr_sum / static_cast<double>(log_.chunks.size());
    log_.total_reward = reward_sum;
    log_.rebuffer_ratio = log_.wall_s > 0 ? log_.rebuffer_s / log_.wall_s : 0.0;
  }
  return log_;
}

SessionLog run_session(const Controller& controller, const Session::Init& init) {
  Session session(init);
  while (!session.done())
    session.step(controller(session.state(), session.next_chunk_costs()));
  return session.finish();
}

Controller make_rate_controller(double chunk_duration) {
  return [chunk_duration](const AbrState& state, const ChunkCosts& costs) {
    double budget = state.rate_bps * chunk_duration / 8.0;
    int pick = 0;
    for (int l = Action::kLevels - 1; l >= 0; --l) {
      if (costs.uniform_total_bytes[l] <= budget) {
        pick = l;
        break;
      }
    }
    return Action{pick, pick, pick};
  };
}

Controller make_fixed_level_controller(int level) {
  if (level < 0 || level >= Action::kLevels)
    throw InputError("level out of range");
  return [level](const AbrState&, const ChunkCosts&) {
    return Action{level, level, level};
  };
}

Controller make_random_controller(std::uint64_t seed) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng](const AbrState&, const ChunkCosts&) {
    return Action::from_index(rng->uniform_int(0, Action::kCount - 1));
  };
}

Controller make_policy_controller(std::shared_ptr<const PolicyParams> params) {
  if (!params) throw InputError("null policy params");
  return [params](const AbrState& state, const ChunkCosts&) {
    std::vector<double> probs = policy_forward(state, *params);
    int best = 0;
    for (std::size_t i = 1; i < probs.size(); ++i)
      if (probs[i] > probs[best]) best = static_cast<int>(i);
    return Action::from_index(best);
  };
}

SessionEnv::SessionEnv(std::vector<Scenario> scenarios, SessionConfig config,
                       bool enumerate)
    : scenarios_(std::move(scenarios)), cfg_(config), enumerate_(enumerate) {
  if (scenarios_.empty()) throw InputError("no scenarios");
}

AbrState SessionEnv::reset(std::uint64_t episode_seed) {
  std::size_t idx;
  if (enumerate_) {
    idx = static_cast<std::size_t>(episode_seed % scenarios_.size());
  } else {
    Rng rng(mix_seed(episode_seed, 0x5e55107ULL));
    idx = static_cast<std::size_t>(rng.next_u64() % scenarios_.size());
  }
  const Scenario& sc = scenarios_[idx];
  Session::Init init;
  init.manifest = sc.manifest;
  init.bandwidth = sc.bandwidth;
  init.viewpoint = sc.viewpoint;
  init.config = cfg_;
  session_.emplace(init);
  return session_->state();
}

Env::StepResult SessionEnv::step(int action_index) {
  if (!session_) throw InputError("env not reset");
  if (session_->done()) throw InputError("episode already finished");
  Session& s = *session_;
  s.step(Action::from_index(action_index));
  StepResult out;
  out.state = s.state();
  out.reward = s.log().chunks.back().reward;
  out.done = s.done();
  return out;
}

}  // namespace ofbvr
