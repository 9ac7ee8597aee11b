#ifndef TOKFIX_H
#define TOKFIX_H

/* Generated by cbindgen from the tokfix-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum TokfixStatus {
  TOKFIX_STATUS_OK = 0,
  TOKFIX_STATUS_NULL_ARGUMENT = 1,
  TOKFIX_STATUS_INVALID_ARGUMENT = 2,
  TOKFIX_STATUS_SYNTAX_ERROR = 3,
  TOKFIX_STATUS_ENCODING_ERROR = 4,
  TOKFIX_STATUS_SCHEMA_ERROR = 5,
  TOKFIX_STATUS_LAYOUT_ERROR = 6,
  TOKFIX_STATUS_EMPTY_CORPUS = 7,
  TOKFIX_STATUS_EMPTY_INPUT = 8,
  TOKFIX_STATUS_ENVIRONMENT_ERROR = 9,
  TOKFIX_STATUS_PANIC = 10,
} TokfixStatus;

// Outcome of a repair request.
typedef enum TokfixRepairStatus {
  TOKFIX_REPAIR_STATUS_REPAIRED = 0,
  TOKFIX_REPAIR_STATUS_NO_CANDIDATE = 2,
  TOKFIX_REPAIR_STATUS_PARSE_ERROR = 3,
} TokfixRepairStatus;

// Source language selector.
typedef enum TokfixLanguage {
  TOKFIX_LANGUAGE_C = 0,
  TOKFIX_LANGUAGE_CPP = 1,
} TokfixLanguage;

typedef struct TokfixAst TokfixAst;

typedef struct TokfixCorpus TokfixCorpus;

typedef struct TokfixReport TokfixReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or NULL. Valid until the next
// failing call on the same thread.
const char *tokfix_last_error_message(void);

// Parses C-subset source text. `language` is a `TokfixLanguage` value.
//
// # Safety
// `text` must be NUL-terminated; `out` must be writable.
enum TokfixStatus tokfix_parse_source(const char *text, int language, struct TokfixAst **out);

// Imports an XML tree.
//
// # Safety
// `xml` must be NUL-terminated; `out` must be writable.
enum TokfixStatus tokfix_import_xml(const char *xml, struct TokfixAst **out);

// Serialises a tree to XML; free the result with `tokfix_string_free`.
//
// # Safety
// `ast` must be a live handle; `out` must be writable.
enum TokfixStatus tokfix_export_xml(const struct TokfixAst *ast, char **out);

// Number of tokens (leaves) in a tree; 0 for NULL.
//
// # Safety
// `ast` must be NULL or a live handle.
size_t tokfix_ast_token_count(const struct TokfixAst *ast);

// # Safety
// `ast` must be NULL or a handle not yet freed.
void tokfix_ast_free(struct TokfixAst *ast);

// Token similarity of two trees, in [0, 1] for non-empty input.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum TokfixStatus tokfix_similarity(const struct TokfixAst *a,
                                    const struct TokfixAst *b,
                                    double *out);

// Opens (and if needed preprocesses) a problem directory.
//
// # Safety
// `problem_dir` must be NUL-terminated; `out` must be writable.
enum TokfixStatus tokfix_corpus_open(const char *problem_dir, struct TokfixCorpus **out);

// Number of cached correct solutions; 0 for NULL.
//
// # Safety
// `corpus` must be NULL or a live handle.
size_t tokfix_corpus_size(const struct TokfixCorpus *corpus);

// # Safety
// `corpus` must be NULL or a handle not yet freed.
void tokfix_corpus_free(struct TokfixCorpus *corpus);

// Repairs `source` against `corpus`. `limit` 0 means the default candidate
// cap; `jobs` 0 means 8; `minimize` 0 disables minimisation.
//
// # Safety
// `corpus` must be a live handle, `source` NUL-terminated, `out` writable.
enum TokfixStatus tokfix_repair(const struct TokfixCorpus *corpus,
                                const char *source,
                                int language,
                                size_t limit,
                                size_t jobs,
                                int minimize,
                                struct TokfixReport **out);

// # Safety
// `report` must be a live handle.
enum TokfixRepairStatus tokfix_report_status(const struct TokfixReport *report);

// Number of edits in the final repair (0 unless repaired).
//
// # Safety
// `report` must be NULL or a live handle.
size_t tokfix_report_edit_count(const struct TokfixReport *report);

// Edit list as tab-separated records, one per line.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum TokfixStatus tokfix_report_edits_tsv(const struct TokfixReport *report, char **out);

// Repaired program text; `*out` is set to NULL when there is none.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum TokfixStatus tokfix_report_repaired_source(const struct TokfixReport *report, char **out);

// Id of the reference solution used; `*out` is NULL when there is none.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum TokfixStatus tokfix_report_candidate(const struct TokfixReport *report, char **out);

// # Safety
// `report` must be NULL or a handle not yet freed.
void tokfix_report_free(struct TokfixReport *report);

// # Safety
// `s` must be NULL or a string returned by this library and not yet freed.
void tokfix_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOKFIX_H */
