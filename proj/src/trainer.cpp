#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace hiercos {

namespace {

std::vector<Vec> random_frame(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> q(n, Vec(n));
  for (auto& col : q)
    for (double& v : col) v = gauss(rng);
  for (int i = 0; i < n; ++i) {
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) {
        double dot = 0;
        for (int k = 0; k < n; ++k) dot += q[i][k] * q[j][k];
        for (int k = 0; k < n; ++k) q[i][k] -= dot * q[j][k];
      }
    double norm = 0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : q[i]) v /= norm;
  }
  return q;
}

void check_frame_orthonormal(const std::vector<Vec>& frame) {
  const int n = static_cast<int>(frame.size());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double dot = 0;
      for (int k = 0; k < n; ++k) dot += frame[i][k] * frame[j][k];
      const double want = i == j ? 1.0 : 0.0;
      if (std::abs(dot - want) > kFrameOrthoTol)
        throw Error(Err::BadCheckpoint, "output frame is not orthonormal");
    }
}

}  // namespace

TransformationModule::TransformationModule(const ModuleConfig& cfg) : cfg_(cfg) {
  if (cfg_.d_in < 1 || cfg_.n < 1 || cfg_.depth < 1)
    throw Error(Err::InvalidArgument, "module dimensions must be positive");
  if (cfg_.width == 0) cfg_.width = cfg_.n;
  build_layout();

  std::mt19937_64 rng(cfg_.seed);
  for (const Layer& layer : layers_) {
    const double bound = std::sqrt(1.0 / layer.in);
    std::uniform_real_distribution<double> uni(-bound, bound);
    for (int i = 0; i < layer.out * layer.in; ++i) params_[layer.w + i] = uni(rng);
    for (int i = 0; i < layer.out; ++i) params_[layer.b + i] = 0.0;
    if (cfg_.batch_norm)
      for (int i = 0; i < layer.out; ++i) {
        params_[layer.gamma + i] = 1.0;
        params_[layer.beta + i] = 0.0;
      }
    for (int i = 0; i < layer.out; ++i) params_[layer.slope + i] = kPreluInit;
  }
  if (cfg_.frame_seed) {
    frame_ = random_frame(cfg_.n, *cfg_.frame_seed);
    check_frame_orthonormal(frame_);
  }
}

void TransformationModule::build_layout() {
  dims_.clear();
  dims_.push_back(cfg_.d_in);
  for (int i = 0; i < cfg_.depth - 1; ++i) dims_.push_back(cfg_.width);
  dims_.push_back(cfg_.n);

  std::size_t offset = 0;
  layers_.resize(cfg_.depth);
  run_mean_.assign(cfg_.depth, {});
  run_var_.assign(cfg_.depth, {});
  for (int i = 0; i < cfg_.depth; ++i) {
    Layer& layer = layers_[i];
    layer.in = dims_[i];
    layer.out = dims_[i + 1];
    layer.w = offset;
    offset += static_cast<std::size_t>(layer.out) * layer.in;
    layer.b = offset;
    offset += layer.out;
    if (cfg_.batch_norm) {
      layer.gamma = offset;
      offset += layer.out;
      layer.beta = offset;
      offset += layer.out;
    }
    layer.slope = offset;
    offset += layer.out;
    run_mean_[i].assign(layer.out, 0.0);
    run_var_[i].assign(layer.out, 1.0);
  }
  params_.assign(offset, 0.0);
}

std::vector<Vec> TransformationModule::forward_batch(const std::vector<const Vec*>& z,
                                                     bool train, BatchCache* cache) const {
  const int B = static_cast<int>(z.size());
  if (B == 0) throw Error(Err::InvalidArgument, "empty batch");
  for (const Vec* s : z)
    if (static_cast<int>(s->size()) != cfg_.d_in)
      throw Error(Err::DimensionMismatch,
                  "expected input dimension " + std::to_string(cfg_.d_in) + ", got " +
                      std::to_string(s->size()));
  if (cache) {
    cache->inputs = z;
    cache->train = train;
    cache->u.assign(layers_.size(), {});
    cache->v.assign(layers_.size(), {});
    cache->h.assign(layers_.size(), {});
    cache->mean.assign(layers_.size(), {});
    cache->var.assign(layers_.size(), {});
  }

  std::vector<Vec> act(B);
  for (int s = 0; s < B; ++s) act[s] = *z[s];

  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Layer& layer = layers_[li];
    std::vector<Vec> u(B, Vec(layer.out));
    for (int s = 0; s < B; ++s)
      for (int o = 0; o < layer.out; ++o) {
        double acc = params_[layer.b + o];
        const double* w = &params_[layer.w + static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) acc += w[i] * act[s][i];
        u[s][o] = acc;
      }

    std::vector<Vec> v = u;
    Vec mean, var;
    if (cfg_.batch_norm) {
      if (train) {
        mean.assign(layer.out, 0.0);
        var.assign(layer.out, 0.0);
        for (int o = 0; o < layer.out; ++o) {
          double m = 0;
          for (int s = 0; s < B; ++s) m += u[s][o];
          m /= B;
          double q = 0;
          for (int s = 0; s < B; ++s) q += (u[s][o] - m) * (u[s][o] - m);
          mean[o] = m;
          var[o] = q / B;  // biased, matching the normalization
        }
      } else {
        mean = run_mean_[li];
        var = run_var_[li];
      }
      for (int o = 0; o < layer.out; ++o) {
        const double inv = 1.0 / std::sqrt(var[o] + kBnEps);
        for (int s = 0; s < B; ++s)
          v[s][o] = params_[layer.gamma + o] * (u[s][o] - mean[o]) * inv +
                    params_[layer.beta + o];
      }
    }

    std::vector<Vec> h = v;
    for (int s = 0; s < B; ++s)
      for (int o = 0; o < layer.out; ++o)
        if (v[s][o] < 0) h[s][o] = params_[layer.slope + o] * v[s][o];

    if (cache) {
      cache->u[li] = std::move(u);
      cache->v[li] = std::move(v);
      cache->h[li] = h;
      cache->mean[li] = std::move(mean);
      cache->var[li] = std::move(var);
    }
    act = std::move(h);
  }

  if (!frame_.empty()) {
    for (int s = 0; s < B; ++s) {
      Vec x(cfg_.n);
      for (int i = 0; i < cfg_.n; ++i) {
        double dot = 0;
        for (int k = 0; k < cfg_.n; ++k) dot += frame_[i][k] * act[s][k];
        x[i] = dot;
      }
      act[s] = std::move(x);
    }
  }
  return act;
}

Vec TransformationModule::forward(const Vec& z) const {
  return forward_batch({&z}, false, nullptr).front();
}

void TransformationModule::backward(const BatchCache& cache, const std::vector<Vec>& dx,
                                    std::vector<double>* grads) const {
  const int B = static_cast<int>(cache.inputs.size());
  if (static_cast<int>(dx.size()) != B)
    throw Error(Err::DimensionMismatch, "gradient batch size mismatch");
  grads->assign(params_.size(), 0.0);

  std::vector<Vec> d(B);
  if (frame_.empty()) {
    d = dx;
  } else {
    for (int s = 0; s < B; ++s) {
      d[s].assign(cfg_.n, 0.0);
      for (int k = 0; k < cfg_.n; ++k) {
        double acc = 0;
        for (int i = 0; i < cfg_.n; ++i) acc += frame_[i][k] * dx[s][i];
        d[s][k] = acc;
      }
    }
  }

  for (int li = static_cast<int>(layers_.size()) - 1; li >= 0; --li) {
    const Layer& layer = layers_[li];
    const auto& u = cache.u[li];
    const auto& v = cache.v[li];

    // rectifier backward
    std::vector<Vec> dv(B, Vec(layer.out));
    for (int s = 0; s < B; ++s)
      for (int o = 0; o < layer.out; ++o) {
        if (v[s][o] < 0) {
          dv[s][o] = d[s][o] * params_[layer.slope + o];
          (*grads)[layer.slope + o] += d[s][o] * v[s][o];
        } else {
          dv[s][o] = d[s][o];
        }
      }

    // normalization backward
    std::vector<Vec> du(B, Vec(layer.out));
    if (cfg_.batch_norm) {
      const Vec& mean = cache.train ? cache.mean[li] : run_mean_[li];
      const Vec& var = cache.train ? cache.var[li] : run_var_[li];
      for (int o = 0; o < layer.out; ++o) {
        const double inv = 1.0 / std::sqrt(var[o] + kBnEps);
        double sum_dv = 0, sum_dv_xhat = 0;
        for (int s = 0; s < B; ++s) {
          const double xhat = (u[s][o] - mean[o]) * inv;
          (*grads)[layer.gamma + o] += dv[s][o] * xhat;
          (*grads)[layer.beta + o] += dv[s][o];
          sum_dv += dv[s][o];
          sum_dv_xhat += dv[s][o] * xhat;
        }
        const double g = params_[layer.gamma + o];
        for (int s = 0; s < B; ++s) {
          const double xhat = (u[s][o] - mean[o]) * inv;
          if (cache.train)
            du[s][o] = g * inv * (dv[s][o] - sum_dv / B - xhat * sum_dv_xhat / B);
          else
            du[s][o] = g * inv * dv[s][o];
        }
      }
    } else {
      du = dv;
    }

    // affine backward
    std::vector<Vec> dprev(B, Vec(layer.in, 0.0));
    for (int s = 0; s < B; ++s) {
      const Vec& input = li == 0 ? *cache.inputs[s] : cache.h[li - 1][s];
      for (int o = 0; o < layer.out; ++o) {
        const double g = du[s][o];
        (*grads)[layer.b + o] += g;
        double* wg = &(*grads)[layer.w + static_cast<std::size_t>(o) * layer.in];
        const double* w = &params_[layer.w + static_cast<std::size_t>(o) * layer.in];
        for (int i = 0; i < layer.in; ++i) {
          wg[i] += g * input[i];
          dprev[s][i] += w[i] * g;
        }
      }
    }
    d = std::move(dprev);
  }

  for (double& g : *grads) g /= B;
}

void TransformationModule::update_running_stats(const BatchCache& cache) {
  if (!cfg_.batch_norm || !cache.train) return;
  for (std::size_t li = 0; li < layers_.size(); ++li)
    for (int o = 0; o < layers_[li].out; ++o) {
      run_mean_[li][o] = (1.0 - kBnMomentum) * run_mean_[li][o] + kBnMomentum * cache.mean[li][o];
      run_var_[li][o] = (1.0 - kBnMomentum) * run_var_[li][o] + kBnMomentum * cache.var[li][o];
    }
}

void TransformationModule::set_running_stats(std::vector<Vec> means, std::vector<Vec> vars) {
  if (means.size() != run_mean_.size() || vars.size() != run_var_.size())
    throw Error(Err::BadCheckpoint, "running-statistics layer count mismatch");
  for (std::size_t li = 0; li < means.size(); ++li)
    if (means[li].size() != run_mean_[li].size() || vars[li].size() != run_var_[li].size())
      throw Error(Err::BadCheckpoint, "running-statistics width mismatch");
  run_mean_ = std::move(means);
  run_var_ = std::move(vars);
}

void TransformationModule::sgd_step(const std::vector<double>& grads, double lr) {
  if (grads.size() != params_.size())
    throw Error(Err::DimensionMismatch, "gradient vector size mismatch");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= lr * grads[i];
}

Dataset generate_synthetic_split(const HierarchyTree& tree, const SyntheticSpec& spec,
                                 std::uint64_t noise_seed) {
  if (spec.d_in < 1 || spec.samples_per_leaf < 1 || spec.sigma_node <= 0 || spec.sigma_obs < 0)
    throw Error(Err::InvalidArgument, "invalid synthetic-data spec");

  // Offsets for every non-root node, drawn in axis order so the cluster
  // layout is shared by splits with the same seed.
  std::mt19937_64 offset_rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int total = tree.total_nodes();
  std::vector<Vec> offset(total);
  for (int l = 1; l <= tree.height(); ++l)
    for (int v : tree.level_nodes(l)) {
      offset[v].resize(spec.d_in);
      for (double& c : offset[v]) c = spec.sigma_node * gauss(offset_rng);
    }

  std::mt19937_64 noise_rng(noise_seed);
  Dataset data;
  for (int leaf : tree.leaves()) {
    Vec mean(spec.d_in, 0.0);
    for (int v = leaf; v != tree.root(); v = tree.parent(v))
      for (int c = 0; c < spec.d_in; ++c) mean[c] += offset[v][c];
    for (int s = 0; s < spec.samples_per_leaf; ++s) {
      Vec sample = mean;
      for (double& c : sample) c += spec.sigma_obs * gauss(noise_rng);
      data.inputs.push_back(std::move(sample));
      data.leaf.push_back(leaf);
    }
  }
  return data;
}

Dataset generate_synthetic(const HierarchyTree& tree, const SyntheticSpec& spec) {
  return generate_synthetic_split(tree, spec, spec.seed + 0x9e3779b97f4a7c15ull);
}

TrainResult train(TransformationModule& module, const Dataset& data, const TrainConfig& cfg,
                  const HierarchyTree& tree, const BasisAssignment& bases,
                  const SubspaceIndex& idx) {
  if (data.inputs.empty()) throw Error(Err::InvalidArgument, "empty training dataset");
  if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.learning_rate < 0 || cfg.alpha < 0)
    throw Error(Err::InvalidArgument, "invalid training configuration");

  const int N = static_cast<int>(data.inputs.size());
  std::mt19937_64 rng(cfg.seed);
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);

  auto eval_epoch = [&](TrainResult& result) {
    double kl = 0, reg = 0, total = 0;
    for (int s = 0; s < N; ++s) {
      const Vec x = module.forward(data.inputs[s]);
      const LossBreakdown lb =
          total_loss(x, data.leaf[s], cfg.alpha, tree, bases, idx, cfg.weight_order);
      kl += lb.kl;
      reg += lb.reg;
      total += lb.total;
    }
    result.kl_curve.push_back(kl / N);
    result.reg_curve.push_back(reg / N);
    result.loss_curve.push_back(total / N);
    if (!std::isfinite(result.loss_curve.back()))
      throw Error(Err::DivergenceDetected, "non-finite training loss");
  };

  TrainResult result;
  std::vector<double> grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.learning_rate > 0) {
      std::shuffle(order.begin(), order.end(), rng);
      for (int start = 0; start < N; start += cfg.batch_size) {
        const int stop = std::min(N, start + cfg.batch_size);
        std::vector<const Vec*> batch;
        batch.reserve(stop - start);
        for (int s = start; s < stop; ++s) batch.push_back(&data.inputs[order[s]]);

        TransformationModule::BatchCache cache;
        const std::vector<Vec> xs = module.forward_batch(batch, true, &cache);
        std::vector<Vec> dx(xs.size());
        for (int s = start; s < stop; ++s) {
          const Vec& x = xs[s - start];
          if (!std::all_of(x.begin(), x.end(), [](double c) { return std::isfinite(c); }))
            throw Error(Err::DivergenceDetected, "non-finite activation during training");
          dx[s - start] = loss_gradient(x, data.leaf[order[s]], cfg.alpha, tree, bases, idx,
                                        cfg.weight_order);
        }
        module.backward(cache, dx, &grads);
        module.update_running_stats(cache);
        module.sgd_step(grads, cfg.learning_rate);
      }
    }
    eval_epoch(result);
  }
  return result;
}

double module_gradient_check(const TransformationModule& module, const Vec& z, int leaf,
                             double alpha, double step, const HierarchyTree& tree,
                             const BasisAssignment& bases, const SubspaceIndex& idx,
                             int min_params, std::uint64_t seed) {
  if (!(step > 0)) throw Error(Err::InvalidArgument, "finite-difference step must be positive");

  TransformationModule probe = module;  // FD mutates parameters
  TransformationModule::BatchCache cache;
  const std::vector<Vec> xs = probe.forward_batch({&z}, false, &cache);
  const Vec dx = loss_gradient(xs[0], leaf, alpha, tree, bases, idx);
  std::vector<double> analytic;
  probe.backward(cache, {dx}, &analytic);

  auto loss_at = [&]() {
    const Vec x = probe.forward(z);
    return total_loss(x, leaf, alpha, tree, bases, idx).total;
  };

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks(probe.param_count());
  std::iota(picks.begin(), picks.end(), std::size_t{0});
  std::shuffle(picks.begin(), picks.end(), rng);
  if (static_cast<int>(picks.size()) > min_params) picks.resize(min_params);

  std::vector<double> fd(picks.size());
  double scale = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const std::size_t p = picks[i];
    const double saved = probe.get_param(p);
    probe.set_param(p, saved + step);
    const double plus = loss_at();
    probe.set_param(p, saved - step);
    const double minus = loss_at();
    probe.set_param(p, saved);
    fd[i] = (plus - minus) / (2 * step);
    scale = std::max({scale, std::abs(fd[i]), std::abs(analytic[p])});
  }

  // Entries far below the gradient scale are measured against a floor so FD
  // round-off on negligible coordinates does not dominate the report.
  const double floor = std::max(1e-8, 1e-2 * scale);
  double worst = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const double a = analytic[picks[i]];
    const double rel = std::abs(a - fd[i]) / std::max({std::abs(a), std::abs(fd[i]), floor});
    worst = std::max(worst, rel);
  }
  return worst;
}

std::string checkpoint_json(const TransformationModule& module,
                            const std::vector<std::string>& axis_names) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "hiercos_checkpoint";
  const ModuleConfig& cfg = module.config();
  j["config"] = {{"d_in", cfg.d_in},
                 {"n", cfg.n},
                 {"depth", cfg.depth},
                 {"width", cfg.width},
                 {"batch_norm", cfg.batch_norm},
                 {"seed", cfg.seed}};
  if (cfg.frame_seed) j["config"]["frame_seed"] = *cfg.frame_seed;
  j["norm_eps"] = kBnEps;
  j["norm_momentum"] = kBnMomentum;
  j["rectifier_init"] = kPreluInit;
  j["axis_order"] = axis_names;
  std::vector<double> params(module.param_count());
  for (std::size_t i = 0; i < params.size(); ++i) params[i] = module.get_param(i);
  j["params"] = params;
  j["run_mean"] = module.running_means();
  j["run_var"] = module.running_vars();
  if (module.output_frame().empty())
    j["frame"] = "identity";
  else
    j["frame"] = module.output_frame();
  return j.dump(2) + "\n";
}

TransformationModule load_checkpoint(const std::string& text,
                                     std::vector<std::string>* axis_names) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Err::BadCheckpoint, std::string("cannot parse checkpoint: ") + e.what());
  }
  try {
    if (j.at("kind") != "hiercos_checkpoint" || j.at("schema_version") != 1)
      throw Error(Err::BadCheckpoint, "unrecognized checkpoint header");
    ModuleConfig cfg;
    const auto& c = j.at("config");
    cfg.d_in = c.at("d_in");
    cfg.n = c.at("n");
    cfg.depth = c.at("depth");
    cfg.width = c.at("width");
    cfg.batch_norm = c.at("batch_norm");
    cfg.seed = c.at("seed");
    if (c.contains("frame_seed")) cfg.frame_seed = c.at("frame_seed").get<std::uint64_t>();
    TransformationModule module(cfg);
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != module.param_count())
      throw Error(Err::BadCheckpoint, "parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) module.set_param(i, params[i]);
    module.set_running_stats(j.at("run_mean").get<std::vector<Vec>>(),
                             j.at("run_var").get<std::vector<Vec>>());
    if (j.at("frame") != "identity")
      check_frame_orthonormal(j.at("frame").get<std::vector<Vec>>());
    if (axis_names) *axis_names = j.at("axis_order").get<std::vector<std::string>>();
    return module;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Err::BadCheckpoint, std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace hiercos
