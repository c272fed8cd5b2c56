/* wildgrid: preemptive power-line de-energization planning under stochastic
 * wildfire disruptions.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * wg_status and leaves a human-readable message in wg_last_error() (thread
 * local). JSON in/out follows the file schemas documented in the README.
 */
#ifndef WILDGRID_H
#define WILDGRID_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int wg_status;

#define WG_OK 0
#define WG_ERROR 1       /* unexpected internal failure */
#define WG_EPARSE 2      /* malformed input file */
#define WG_EVALIDATE 3   /* structural invariant violated */
#define WG_ECONFIG 4     /* bad configuration or arguments */
#define WG_EINFEASIBLE 5 /* plan infeasible for the network */
#define WG_EBACKEND 6    /* solver backend failure */
#define WG_ESIZE 7       /* extensive-form size guard tripped */
#define WG_EIO 8         /* file write failure */

typedef struct wg_network wg_network;
typedef struct wg_tree wg_tree;
typedef struct wg_plan wg_plan;
typedef struct wg_report wg_report;

const char* wg_version(void);
/* message of the most recent failure on this thread; never NULL */
const char* wg_last_error(void);

/* --- power network ------------------------------------------------------ */

wg_status wg_network_load(const char* path, wg_network** out);
wg_status wg_network_from_json(const char* json_text, wg_network** out);
/* fills unset damage costs and priorities with the standard defaults */
wg_status wg_network_default_costs(wg_network* net);
wg_status wg_network_counts(const wg_network* net, int* buses, int* generators, int* lines,
                            int* loads);
int wg_network_horizon(const wg_network* net);
void wg_network_free(wg_network* net);

/* --- scenario trees ------------------------------------------------------ */

/* simulates n wildfire sample paths with the cellular automaton described by
 * ca_json and folds them into a scenario tree */
wg_status wg_tree_generate(const wg_network* net, const char* ca_json, int n, uint64_t seed,
                           int depth_limit, int max_disruptions, wg_tree** out);
wg_status wg_tree_load(const char* path, const wg_network* net, wg_tree** out);
wg_status wg_tree_save(const wg_tree* tree, const wg_network* net, const char* path);
int wg_tree_node_count(const wg_tree* tree);
void wg_tree_free(wg_tree* tree);

/* --- solving ------------------------------------------------------------- */

/* settings_json: {"options": {...}, "engine": {...}, "solver": {...}}, any
 * subset; NULL or "" keeps the defaults (LC cuts, binary domain, eps 1%) */
wg_status wg_solve(const wg_network* net, const wg_tree* tree, const char* settings_json,
                   wg_report** out);
wg_status wg_report_bounds(const wg_report* report, double* lb, double* ub, double* gap);
int wg_report_iterations(const wg_report* report);
int wg_report_total_cuts(const wg_report* report);
/* "Converged", "GapStall", "IterationLimit" or "TimeLimit" */
const char* wg_report_reason(const wg_report* report);
wg_status wg_report_write_trace_csv(const wg_report* report, const char* path);
wg_status wg_report_get_plan(const wg_report* report, const wg_network* net, const wg_tree* tree,
                             const char* settings_json, wg_plan** out);
void wg_report_free(wg_report* report);

/* --- nominal plans and evaluation ---------------------------------------- */

wg_status wg_plan_load(const char* path, const wg_network* net, wg_plan** out);
wg_status wg_plan_save(const wg_plan* plan, const wg_network* net, const char* path);
wg_status wg_plan_fairness(const wg_plan* plan, const wg_network* net, double* max_pairwise_gap,
                           double* total_shed_fraction);
void wg_plan_free(wg_plan* plan);

/* out-of-sample expected cost of a fixed plan on a testing tree */
wg_status wg_evaluate(const wg_plan* plan, const wg_network* net, const wg_tree* testing,
                      const char* settings_json, double* nominal_shed, double* disruptive_shed,
                      double* damage, double* total, int* scenarios);

/* restoration-vs-none comparison across betas; writes the comparison CSV */
wg_status wg_compare(const wg_network* net, const wg_tree* training, const wg_tree* testing,
                     const double* betas, int n_betas, const char* settings_json,
                     const char* csv_path);

/* --- orchestration -------------------------------------------------------- */

/* runs one CLI command end to end from a config file: command is "generate",
 * "solve", "evaluate" or "compare". overrides_json may carry {"beta": ..,
 * "cut_family": .., "epsilon": .., "seed": .., "threads": .., "output": ..,
 * "plan": <path>, "test_tree": <path>, "betas": [..]}; NULL for none. */
wg_status wg_run_command(const char* command, const char* config_path,
                         const char* overrides_json);

#ifdef __cplusplus
}
#endif

#endif /* WILDGRID_H */
