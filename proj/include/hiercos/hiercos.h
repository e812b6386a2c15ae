/* hiercos — hierarchy-aware subspace classification toolkit.
 *
 * C API over the core library: opaque handles, status codes, and the
 * command-level runners the `hiercos` CLI is built on. All functions are
 * thread-compatible; error messages are thread-local.
 */
#ifndef HIERCOS_H
#define HIERCOS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HCOS_API __declspec(dllexport)
#else
#define HCOS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hcos_status {
  HCOS_OK = 0,
  HCOS_ERR_IO = 1,
  HCOS_ERR_PARSE = 2,     /* malformed input file */
  HCOS_ERR_STRUCTURE = 3, /* hierarchy validation failure */
  HCOS_ERR_EVAL = 4,      /* evaluation or usage error */
  HCOS_ERR_INTERNAL = 5
} hcos_status;

/* CLI exit-code convention: 0 ok, 1 io/parse, 2 structure, 3 evaluation. */
HCOS_API int hcos_exit_code(hcos_status status);

/* Message for the most recent failure on this thread; never NULL. */
HCOS_API const char* hcos_last_error(void);

HCOS_API const char* hcos_version(void);

/* Frees strings returned through `char**` out-parameters. */
HCOS_API void hcos_string_free(char* s);

/* ---------- hierarchy handles ---------- */

typedef struct hcos_tree hcos_tree;

HCOS_API hcos_status hcos_tree_parse_file(const char* path, hcos_tree** out);
HCOS_API hcos_status hcos_tree_parse_text(const char* text, hcos_tree** out);
HCOS_API void hcos_tree_free(hcos_tree* tree);

HCOS_API hcos_status hcos_tree_counts(const hcos_tree* tree, uint32_t* nodes,
                                      uint32_t* height, uint32_t* leaves);
HCOS_API hcos_status hcos_tree_level_size(const hcos_tree* tree, uint32_t level, uint32_t* out);
/* Leaf id by position in hierarchy order; pointer valid for the tree's lifetime. */
HCOS_API hcos_status hcos_tree_leaf_name(const hcos_tree* tree, uint32_t index,
                                         const char** out);
HCOS_API hcos_status hcos_tree_lca_distance(const hcos_tree* tree, const char* leaf_a,
                                            const char* leaf_b, uint32_t* out);
HCOS_API hcos_status hcos_tree_serialize(const hcos_tree* tree, char** out);

/* HOPS for one ranked prediction (leaf ids, most preferred first; must be a
 * permutation of the leaves). k = 0 scores the full ranking. */
HCOS_API hcos_status hcos_hops(const hcos_tree* tree, const char* true_leaf,
                               const char* const* ranked, size_t count, uint32_t k,
                               double* out);

/* ---------- command runners ---------- */

typedef enum hcos_format { HCOS_FORMAT_JSON = 0, HCOS_FORMAT_CSV = 1 } hcos_format;
typedef enum hcos_level_mode {
  HCOS_LEVELS_PER_LEVEL = 0,
  HCOS_LEVELS_LEAF_PATH = 1
} hcos_level_mode;
typedef enum hcos_weight_order {
  HCOS_WEIGHTS_INCREASING = 0,
  HCOS_WEIGHTS_REVERSED = 1
} hcos_weight_order;

/* Writes "n=.. H=.. K=.. K_l=.." into *summary on success. */
HCOS_API hcos_status hcos_run_validate_tree(const char* hierarchy_path, char** summary);

typedef struct hcos_eval_options {
  const char* hierarchy_path;
  const char* predictions_path;
  const char* levels_path; /* NULL when absent */
  const char* out_path;    /* NULL to skip writing */
  const uint32_t* ks;      /* NULL => default {1,5,20} clamped to K */
  size_t ks_count;
  int level_mode; /* hcos_level_mode */
  int format;     /* hcos_format */
} hcos_eval_options;

HCOS_API void hcos_eval_options_init(hcos_eval_options* opts);
HCOS_API hcos_status hcos_run_eval(const hcos_eval_options* opts, char** summary);

/* order-analysis: writes order_fractions.csv and lca_matrix.csv to out_dir. */
HCOS_API hcos_status hcos_run_order_analysis(const hcos_eval_options* opts,
                                             const char* out_dir);

/* hops-trace: out_path gets per-sample z / z_hat / eta / s / s_max dumps. */
HCOS_API hcos_status hcos_run_hops_trace(const hcos_eval_options* opts);

typedef struct hcos_demo_options {
  const char* hierarchy_path;
  const char* out_dir; /* NULL to skip writing artifacts */
  uint32_t d_in;
  uint32_t train_samples_per_leaf;
  uint32_t test_samples_per_leaf;
  double sigma_node;
  double sigma_obs;
  double alpha;
  double learning_rate;
  uint32_t epochs;
  uint32_t batch_size;
  uint32_t depth;
  uint32_t width; /* 0 => node count */
  uint64_t seed;
  int weight_order; /* hcos_weight_order */
  int level_mode;
  int format;
  const uint32_t* ks;
  size_t ks_count;
} hcos_demo_options;

HCOS_API void hcos_demo_options_init(hcos_demo_options* opts);

typedef struct hcos_demo_result {
  double test_accuracy;
  double test_hops;
  double test_fpa;  /* -1 when not computable */
  double test_tice; /* -1 when not computable */
  double test_correct_order_full; /* correct-order fraction at k = K */
  double test_cosine_alignment;
  double final_loss;
} hcos_demo_result;

HCOS_API hcos_status hcos_run_demo_train(const hcos_demo_options* opts,
                                         hcos_demo_result* result, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* HIERCOS_H */
