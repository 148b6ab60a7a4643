#ifndef TACHECK_H
#define TACHECK_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum tc_mode {
  TC_MODE_DFSS = 0,
  TC_MODE_IDFSS = 1,
} tc_mode;

// Result code of every fallible call.
typedef enum tc_status {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_UTF8 = 2,
  TC_STATUS_PARSE = 3,
  TC_STATUS_MODEL = 4,
  TC_STATUS_UNKNOWN_FAMILY = 5,
  TC_STATUS_PATH = 6,
  TC_STATUS_GUARD_RAIL = 7,
  TC_STATUS_IO = 8,
  TC_STATUS_INVALID_ARGUMENT = 9,
  TC_STATUS_PANIC = 10,
} tc_status;

// A flattened timed Büchi automaton.
typedef struct tc_automaton tc_automaton;

// A network of timed automata.
typedef struct tc_model tc_model;

// Counters of one emptiness search.
typedef struct tc_stats {
  uint64_t visited_nodes;
  uint64_t subsumption_skips;
  uint64_t iterability_checks;
  // Nonzero when an accepting cycle was found.
  uint8_t cycle_found;
} tc_stats;

// Verdict of the iterability test on a transition path.
typedef struct tc_iterability_result {
  uint8_t iterable;
  // Compositions of the decision procedure.
  uint64_t compositions;
  uint64_t squarings;
} tc_iterability_result;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into the library.
const char *tc_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void tc_string_free(char *s);

// Parses a model in the textual format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum tc_status tc_model_parse(const char *text, struct tc_model **out);

// Generates a benchmark network with constants multiplied by `scale`.
// The CSMA/CD switches are ignored by other families.
//
// # Safety
// `family_name` must be a NUL-terminated string and `out` a valid pointer.
enum tc_status tc_model_generate(const char *family_name,
                                 size_t n,
                                 bool fixed,
                                 bool nonzeno,
                                 int64_t scale,
                                 struct tc_model **out);

// Generates the property automaton of a benchmark family.
//
// # Safety
// `family_name` must be a NUL-terminated string and `out` a valid pointer.
enum tc_status tc_property_generate(const char *family_name,
                                    size_t n,
                                    int64_t scale,
                                    struct tc_model **out);

// Prints a model in the textual format. Free the result with
// [`tc_string_free`].
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum tc_status tc_model_to_text(const struct tc_model *model, char **out);

// # Safety
// `model` must be null or a handle not freed before.
void tc_model_free(struct tc_model *model);

// Flattens a network into a single automaton.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum tc_status tc_automaton_flatten(const struct tc_model *model, struct tc_automaton **out);

// Synchronous product of a network with a property network.
//
// # Safety
// `model` and `property` must be live handles and `out` a valid pointer.
enum tc_status tc_automaton_product(const struct tc_model *model,
                                    const struct tc_model *property,
                                    struct tc_automaton **out);

// # Safety
// `a` must be null or a handle not freed before.
void tc_automaton_free(struct tc_automaton *a);

// Number of states, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
size_t tc_automaton_num_states(const struct tc_automaton *a);

// Number of clocks, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
size_t tc_automaton_num_clocks(const struct tc_automaton *a);

// Number of transitions, or 0 for a null handle.
//
// # Safety
// `a` must be null or a live handle.
size_t tc_automaton_num_transitions(const struct tc_automaton *a);

// Runs the emptiness search.
//
// # Safety
// `a` must be a live handle and `stats` a valid pointer.
enum tc_status tc_check(const struct tc_automaton *a,
                        enum tc_mode mode,
                        uint64_t seed,
                        struct tc_stats *stats);

// Decides whether the cycle of transitions `path[0..len]` of `a` can be
// repeated forever from some valuation.
//
// # Safety
// `a` must be a live handle, `path` must point to `len` indices and `out`
// must be a valid pointer.
enum tc_status tc_iterability(const struct tc_automaton *a,
                              const size_t *path,
                              size_t len,
                              struct tc_iterability_result *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TACHECK_H */
