#pragma once

#include <cstdint>
#include <random>

#include "objective.hpp"

namespace hiercos {

struct ModuleConfig {
  int d_in = 0;
  int n = 0;           // output dimension = node count
  int depth = 5;       // affine+norm+rectifier blocks before the fixed frame
  int width = 0;       // hidden width, 0 => n
  bool batch_norm = true;
  std::uint64_t seed = 7;
  std::optional<std::uint64_t> frame_seed;  // random orthonormal output frame; default identity
};

// Batch-norm defaults; recorded in the checkpoint header.
inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;
inline constexpr double kPreluInit = 0.25;
inline constexpr double kFrameOrthoTol = 1e-10;

// f_theta: affine -> normalization -> parametric rectifier blocks feeding a
// fixed orthonormal output layer that is never updated.
class TransformationModule {
public:
  explicit TransformationModule(const ModuleConfig& cfg);

  const ModuleConfig& config() const { return cfg_; }
  int input_dim() const { return cfg_.d_in; }
  int output_dim() const { return cfg_.n; }

  // Eval mode: frozen running statistics; deterministic.
  Vec forward(const Vec& z) const;

  // Training-mode batch forward; caches intermediates for backward().
  struct BatchCache;
  std::vector<Vec> forward_batch(const std::vector<const Vec*>& z, bool train,
                                 BatchCache* cache) const;

  // Accumulates parameter gradients for the cached batch given dLoss/dx per
  // sample; gradients are means over the batch.
  void backward(const BatchCache& cache, const std::vector<Vec>& dx,
                std::vector<double>* grads) const;

  void update_running_stats(const BatchCache& cache);
  void sgd_step(const std::vector<double>& grads, double lr);

  // Flat parameter access (affine weights/biases, norm gains/shifts,
  // rectifier slopes; running statistics and the frame are state, not
  // parameters).
  std::size_t param_count() const { return params_.size(); }
  double get_param(std::size_t i) const { return params_.at(i); }
  void set_param(std::size_t i, double v) { params_.at(i) = v; }

  const std::vector<Vec>& output_frame() const { return frame_; }  // empty => identity

  const std::vector<Vec>& running_means() const { return run_mean_; }
  const std::vector<Vec>& running_vars() const { return run_var_; }
  void set_running_stats(std::vector<Vec> means, std::vector<Vec> vars);

private:
  TransformationModule() = default;
  void build_layout();

  ModuleConfig cfg_;
  std::vector<int> dims_;          // layer io sizes: d_in, w, ..., n
  std::vector<double> params_;     // flat storage
  struct Layer {
    std::size_t w = 0, b = 0, gamma = 0, beta = 0, slope = 0;  // offsets into params_
    int in = 0, out = 0;
  };
  std::vector<Layer> layers_;
  std::vector<Vec> run_mean_, run_var_;  // per layer
  std::vector<Vec> frame_;               // frame[i] = i-th output basis vector

public:
  struct BatchCache {
    std::vector<const Vec*> inputs;
    // per layer: pre-norm activations u, normalized v, post-rectifier h
    std::vector<std::vector<Vec>> u, v, h;
    std::vector<Vec> mean, var;  // batch statistics per layer
    bool train = false;
  };
};

struct SyntheticSpec {
  int d_in = 64;
  int samples_per_leaf = 50;
  double sigma_node = 1.0;  // per-level mean-offset scale
  double sigma_obs = 0.25;  // observation noise
  std::uint64_t seed = 7;
};

struct Dataset {
  std::vector<Vec> inputs;
  std::vector<int> leaf;  // node indices
};

// Per-node Gaussian offsets; a leaf's mean is the sum of offsets along its
// root path; samples add isotropic noise. Deterministic per seed.
Dataset generate_synthetic(const HierarchyTree& tree, const SyntheticSpec& spec);

// Same node offsets as generate_synthetic for the given seed, but noise drawn
// from noise_seed, so train/test splits share cluster means.
Dataset generate_synthetic_split(const HierarchyTree& tree, const SyntheticSpec& spec,
                                 std::uint64_t noise_seed);

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  int batch_size = 32;
  double alpha = 0.05;
  std::uint64_t seed = 7;
  WeightOrder weight_order = WeightOrder::increasing;
};

struct TrainResult {
  std::vector<double> loss_curve;  // eval-mode mean total loss per epoch
  std::vector<double> kl_curve;
  std::vector<double> reg_curve;
};

// Plain SGD over total_loss composed with the module; seed-deterministic.
// learning_rate 0 leaves the module untouched (pure evaluation epochs).
TrainResult train(TransformationModule& module, const Dataset& data, const TrainConfig& cfg,
                  const HierarchyTree& tree, const BasisAssignment& bases,
                  const SubspaceIndex& idx);

// Central-finite-difference check of the eval-mode parameter gradients on a
// random subset of at least min_params parameters. Returns the max relative
// error, |analytic - fd| / max(|analytic|, |fd|, floor) with floor tied to
// the gradient scale.
double module_gradient_check(const TransformationModule& module, const Vec& z, int leaf,
                             double alpha, double step, const HierarchyTree& tree,
                             const BasisAssignment& bases, const SubspaceIndex& idx,
                             int min_params = 50, std::uint64_t seed = 7);

// Versioned JSON checkpoint: config, all parameters, running statistics, the
// output frame, and the axis assignment (node names in axis order). Loading
// validates frame orthonormality.
std::string checkpoint_json(const TransformationModule& module,
                            const std::vector<std::string>& axis_names);
TransformationModule load_checkpoint(const std::string& text,
                                     std::vector<std::string>* axis_names = nullptr);

}  // namespace hiercos
