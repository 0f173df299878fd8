#ifndef PRESUPPOSE_H
#define PRESUPPOSE_H

/* Generated by cbindgen from presuppose-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum PspStatus {
  PSP_STATUS_OK = 0,
  // A required pointer argument was null.
  PSP_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  PSP_STATUS_INVALID_UTF8 = 2,
  // An input that must be non-empty was empty.
  PSP_STATUS_EMPTY_INPUT = 3,
  // The text could not be parsed (yes/no verdict or enumeration).
  PSP_STATUS_PARSE_ERROR = 4,
  // A label code other than 0 or 1 was supplied.
  PSP_STATUS_INVALID_LABEL = 5,
} PspStatus;

// Which route produced a McNemar p-value.
typedef enum PspMcnemarMethod {
  PSP_MCNEMAR_METHOD_EXACT = 0,
  PSP_MCNEMAR_METHOD_CHI2 = 1,
} PspMcnemarMethod;

// Opaque parsed assumption list; index it with psp_assumption_list_* and
// release it with psp_assumption_list_free.
typedef struct PspAssumptionList PspAssumptionList;

// Opaque classification report; read it through the psp_eval_report_*
// getters and release it with psp_eval_report_free.
typedef struct PspEvalReport PspEvalReport;

// McNemar test result over discordant counts b and c.
typedef struct PspMcnemar {
  uint64_t b;
  uint64_t c;
  double p_value;
  enum PspMcnemarMethod method;
} PspMcnemar;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static string; do not free.
const char *psp_version(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned by a psp_* function and not
// yet freed.
void psp_string_free(char *s);

// Combine per-assumption labels (codes 0/1) into a question-level label:
// 1 only if every element is 1. An empty list is a contract violation.
//
// # Safety
// `labels` must point to `len` readable i32 values; `out_label` must be
// writable.
enum PspStatus psp_adjudicate(const int32_t *labels, uintptr_t len, int32_t *out_label);

// Parse a yes/no completion: "Yes" means label 0 (has false assumptions),
// "No" means label 1. Anything else is a parse error.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out_label` writable.
enum PspStatus psp_parse_yes_no(const char *text, int32_t *out_label);

// Parse an enumerated assumption list ("(1) ...", "2. ...", "3) ...").
// On success writes an owned handle to `out_list`.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out_list` writable.
enum PspStatus psp_parse_enumeration(const char *text, struct PspAssumptionList **out_list);

// Number of assumptions in a parsed list.
//
// # Safety
// `list` must be a live handle from psp_parse_enumeration.
uintptr_t psp_assumption_list_len(const struct PspAssumptionList *list);

// Copy of the index-th assumption text (0-based); free with
// psp_string_free. Null when the index is out of range.
//
// # Safety
// `list` must be a live handle from psp_parse_enumeration.
char *psp_assumption_list_text(const struct PspAssumptionList *list, uintptr_t index);

// Release a handle from psp_parse_enumeration.
//
// # Safety
// `list` must be a live handle, not yet freed.
void psp_assumption_list_free(struct PspAssumptionList *list);

// Stable hex fingerprint of a completion request, the key used by the
// response cache and mock scripts; free with psp_string_free. Null when
// an argument is null or not UTF-8.
//
// # Safety
// String arguments must be valid NUL-terminated strings.
char *psp_fingerprint(const char *model_id,
                      double temperature,
                      double top_p,
                      double frequency_penalty,
                      uint32_t max_tokens,
                      const char *system_text,
                      const char *user_text);

// McNemar's test from discordant counts: exact two-sided binomial for
// b + c <= 25, chi-square with continuity correction above.
//
// # Safety
// `out` must be writable.
enum PspStatus psp_mcnemar(uint64_t b, uint64_t c, struct PspMcnemar *out);

// Score predictions against gold labels (parallel arrays of codes 0/1,
// positive class = 0). On success writes an owned report handle.
//
// # Safety
// `pred_labels` and `gold_labels` must point to `len` readable i32
// values; `out_report` must be writable.
enum PspStatus psp_evaluate(const int32_t *pred_labels,
                            const int32_t *gold_labels,
                            uintptr_t len,
                            struct PspEvalReport **out_report);

// Overall accuracy; NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_accuracy(const struct PspEvalReport *report);

// Precision of the positive class (label 0); NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_positive_precision(const struct PspEvalReport *report);

// Recall of the positive class (label 0); NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_positive_recall(const struct PspEvalReport *report);

// F1 of the positive class (label 0); NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_positive_f1(const struct PspEvalReport *report);

// F1 of the negative class (label 1); NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_negative_f1(const struct PspEvalReport *report);

// Share of false positives among errors; NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_fp_share(const struct PspEvalReport *report);

// Share of false negatives among errors; NaN for a null handle.
//
// # Safety
// `report` must be a live handle from psp_evaluate or null.
double psp_eval_report_fn_share(const struct PspEvalReport *report);

// Confusion counts in the order tp, fp, fn, tn.
//
// # Safety
// `report` must be a live handle; the four out-pointers must be writable.
enum PspStatus psp_eval_report_confusion(const struct PspEvalReport *report,
                                         uint64_t *out_tp,
                                         uint64_t *out_fp,
                                         uint64_t *out_fn,
                                         uint64_t *out_tn);

// Release a handle from psp_evaluate.
//
// # Safety
// `report` must be a live handle, not yet freed.
void psp_eval_report_free(struct PspEvalReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRESUPPOSE_H */
