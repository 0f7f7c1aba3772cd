/* C interface to the collision-based uniformity tester library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every call returns a cbt_status; on failure cbt_last_error() describes
 * the problem (thread-local, valid until the next call on that thread).
 * Strings returned through char** are heap-allocated and must be released
 * with cbt_string_free.
 */
#ifndef CBT_CBT_H
#define CBT_CBT_H

#include <stddef.h>
#include <stdint.h>

#if defined(CBT_BUILDING_LIBRARY)
#define CBT_API __attribute__((visibility("default")))
#else
#define CBT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbt_status {
  CBT_OK = 0,
  CBT_INVALID_ARGUMENT = 1,
  CBT_INVALID_DOMAIN = 2,
  CBT_CAPACITY = 3,
  CBT_MODEL_VIOLATION = 4,
  CBT_INVALID_NETWORK = 5,
  CBT_PROTOCOL_REFUSED = 6,
  CBT_PARSE = 7,
  CBT_INTERNAL = 8
} cbt_status;

typedef struct cbt_distribution cbt_distribution;
typedef struct cbt_graph cbt_graph;

CBT_API const char* cbt_status_name(cbt_status status);
CBT_API const char* cbt_last_error(void);
CBT_API void cbt_string_free(char* s);

/* Distributions over [1, n]. */
CBT_API cbt_status cbt_distribution_create(const double* probs, size_t n, cbt_distribution** out);
/* Spec string such as "uniform:100", "bump:100:0.5" or a JSON object. */
CBT_API cbt_status cbt_distribution_from_spec(const char* spec, cbt_distribution** out);
CBT_API void cbt_distribution_free(cbt_distribution* p);
CBT_API cbt_status cbt_distribution_size(const cbt_distribution* p, uint32_t* n);
CBT_API cbt_status cbt_distribution_collision_probability(const cbt_distribution* p, double* mu);
CBT_API cbt_status cbt_distribution_distance_to_uniform(const cbt_distribution* p, double* d);

/* Comparison graphs. `edges` holds edge_count (u, v) pairs. */
CBT_API cbt_status cbt_graph_create(uint32_t vertex_count, const uint32_t* edges, size_t edge_count,
                                    cbt_graph** out);
/* Spec string such as "clique:5", "disjoint_cliques:4:3" or a JSON object. */
CBT_API cbt_status cbt_graph_from_spec(const char* spec, cbt_graph** out);
CBT_API void cbt_graph_free(cbt_graph* g);
CBT_API cbt_status cbt_graph_stats(const cbt_graph* g, uint64_t* vertices, uint64_t* edges,
                                   uint64_t* two_paths);

/* One run of the collision tester on stream (seed, trial, 0). `yes` is 1
 * for YES and 0 for NO. */
CBT_API cbt_status cbt_run_tester(const cbt_graph* g, const cbt_distribution* p, double tau,
                                  double eps, uint64_t seed, uint64_t trial, uint64_t* z,
                                  double* threshold, int* yes);

/* JSON condition report for (g, tau, n, eps). */
CBT_API cbt_status cbt_check_theorem(const cbt_graph* g, double tau, uint32_t n, double eps,
                                     char** json_out);

/* Plan request {"model", "n", "eps", "k"?, "rates"?, "m_bits"?} -> JSON plan. */
CBT_API cbt_status cbt_plan(const char* request_json, char** json_out);

/* One scenario (JSON object). Writes the CSV summary (header included) and
 * the per-trial JSON lines. `threads` 0 means one per hardware thread. */
CBT_API cbt_status cbt_run_scenario(const char* scenario_json, uint64_t seed, unsigned threads,
                                    int timing, char** csv_out, char** jsonl_out);

/* Suite file with one JSON scenario per line -> CSV. */
CBT_API cbt_status cbt_run_suite_file(const char* path, uint64_t seed, unsigned threads, int timing,
                                      char** csv_out);

CBT_API cbt_status cbt_moment_audit(const char* graph_spec, const char* dist_spec, uint64_t trials,
                                    uint64_t seed, char** json_out);

CBT_API cbt_status cbt_counterexample(uint32_t n, double eps, double b, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* CBT_CBT_H */
