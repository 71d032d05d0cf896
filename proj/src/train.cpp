#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "ofbvr/abr.hpp"

namespace ofbvr {

namespace {

int sample_index(const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

int argmax_index(const std::vector<double>& probs) {
  return static_cast<int>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

struct EpisodeOutcome {
  double reward_sum = 0.0;
  int steps = 0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  int updates = 0;
};

// One stochastic episode with n-step updates applied directly to params.
EpisodeOutcome run_training_episode(Env& env, PolicyParams& params,
                                    const TrainConfig& cfg,
                                    double entropy_weight,
                                    std::uint64_t episode_seed) {
  Rng rng(mix_seed(episode_seed, 0xac7e5ULL));
  EpisodeOutcome out;
  AbrState state = env.reset(episode_seed);
  std::vector<TrajectoryStep> window;
  window.reserve(cfg.n_step);
  bool done = false;
  while (!done) {
    nn::NetInput input = encode_state(state);
    nn::Cache cache;
    nn::forward(params.actor, input, cache);
    int action = sample_index(nn::softmax(cache.logits), rng);

    Env::StepResult sr = env.step(action);
    out.reward_sum += sr.reward;
    ++out.steps;
    window.push_back(
        TrajectoryStep{std::move(input), action, sr.reward * cfg.reward_scale});
    done = sr.done;

    if (static_cast<int>(window.size()) == cfg.n_step || done) {
      double bootstrap = done ? 0.0 : critic_forward(sr.state, params);
      UpdateStats us =
          policy_gradient_step(params, window, bootstrap, cfg.gamma,
                               cfg.actor_lr, cfg.critic_lr, entropy_weight);
      out.actor_loss += us.actor_loss;
      out.critic_loss += us.critic_loss;
      out.entropy += us.entropy;
      ++out.updates;
      window.clear();
    }
    state = sr.state;
  }
  return out;
}

double entropy_weight_at(const TrainConfig& cfg, int episode) {
  if (cfg.episodes <= 1) return cfg.entropy_start;
  double f = static_cast<double>(episode) / (cfg.episodes - 1);
  return cfg.entropy_start + f * (cfg.entropy_end - cfg.entropy_start);
}

EpisodeStats to_stats(int episode, const EpisodeOutcome& oc) {
  EpisodeStats st;
  st.episode = episode;
  st.mean_reward = oc.steps > 0 ? oc.reward_sum / oc.steps : 0.0;
  st.actor_loss = oc.updates > 0 ? oc.actor_loss / oc.updates : 0.0;
  st.critic_loss = oc.updates > 0 ? oc.critic_loss / oc.updates : 0.0;
  st.entropy = oc.updates > 0 ? oc.entropy / oc.updates : 0.0;
  return st;
}

}  // namespace

double evaluate_policy(Env& env, const PolicyParams& params, int episodes) {
  if (episodes <= 0) return 0.0;
  double total = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    AbrState state = env.reset(static_cast<std::uint64_t>(ep));
    double episode_reward = 0.0;
    bool done = false;
    while (!done) {
      int action = argmax_index(policy_forward(state, params));
      Env::StepResult sr = env.step(action);
      episode_reward += sr.reward;
      done = sr.done;
      state = sr.state;
    }
    total += episode_reward;
  }
  return total / episodes;
}

TrainResult train(const EnvFactory& make_env, const EnvFactory& make_validation,
                  const nn::NetConfig& actor_cfg, const TrainConfig& cfg) {
  if (cfg.episodes < 0) throw InputError("episode count must be >= 0");
  if (cfg.workers < 1) throw InputError("worker count must be >= 1");

  TrainResult result;
  result.params = PolicyParams::initialized(actor_cfg, cfg.seed);
  result.log.reserve(cfg.episodes);

  std::unique_ptr<Env> validation;
  if (make_validation && cfg.validation_episodes > 0) {
    validation = make_validation();
    result.initial_validation = evaluate_policy(*validation, result.params,
                                                cfg.validation_episodes);
    result.best_validation = result.initial_validation;
  }
  PolicyParams best = result.params;

  auto maybe_validate = [&](PolicyParams& current) {
    if (!validation) return;
    double score =
        evaluate_policy(*validation, current, cfg.validation_episodes);
    if (score > result.best_validation) {
      result.best_validation = score;
      best = current;
    }
  };

  if (cfg.workers == 1) {
    std::unique_ptr<Env> env = make_env();
    for (int ep = 0; ep < cfg.episodes; ++ep) {
      EpisodeOutcome oc =
          run_training_episode(*env, result.params, cfg,
                               entropy_weight_at(cfg, ep),
                               mix_seed(cfg.seed, static_cast<std::uint64_t>(ep)));
      result.log.push_back(to_stats(ep, oc));
      if (cfg.validate_every > 0 && (ep + 1) % cfg.validate_every == 0)
        maybe_validate(result.params);
    }
  } else {
    // Workers train against snapshots; gradients land as whole-parameter
    // deltas applied under the lock, in arrival order.
    std::mutex mu;
    int next_episode = 0;
    std::exception_ptr failure;
    auto worker = [&]() {
      std::unique_ptr<Env> env = make_env();
      try {
        while (true) {
          int ep;
          PolicyParams snapshot;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (failure || next_episode >= cfg.episodes) return;
            ep = next_episode++;
            snapshot = result.params;
          }
          PolicyParams local = snapshot;
          EpisodeOutcome oc = run_training_episode(
              *env, local, cfg, entropy_weight_at(cfg, ep),
              mix_seed(cfg.seed, static_cast<std::uint64_t>(ep)));
          {
            std::lock_guard<std::mutex> lock(mu);
            if (failure) return;
            // delta = local - snapshot, applied to the shared params
            local.actor.add_scaled(snapshot.actor, -1.0);
            local.critic.add_scaled(snapshot.critic, -1.0);
            result.params.actor.add_scaled(local.actor, 1.0);
            result.params.critic.add_scaled(local.critic, 1.0);
            if (!result.params.all_finite()) {
              failure = std::make_exception_ptr(
                  TrainingError("non-finite parameters after worker update"));
              return;
            }
            result.log.push_back(to_stats(ep, oc));
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(cfg.workers);
    for (int i = 0; i < cfg.workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    std::sort(result.log.begin(), result.log.end(),
              [](const EpisodeStats& a, const EpisodeStats& b) {
                return a.episode < b.episode;
              });
  }

  maybe_validate(result.params);
  if (validation) result.params = best;
  return result;
}

}  // namespace ofbvr
