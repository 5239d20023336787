/* Copyright 2026 The Bushy Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BUSHY_BUSHY_H_
#define BUSHY_BUSHY_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BUSHY_API __declspec(dllexport)
#else
#define BUSHY_API __attribute__((visibility("default")))
#endif

/* Status codes double as process exit codes. */
typedef enum bushy_status {
  BUSHY_OK = 0,
  BUSHY_INVALID = 1,      /* malformed input or unknown kind */
  BUSHY_REFUSAL = 2,      /* honest negative answer with a certificate */
  BUSHY_INCONCLUSIVE = 3, /* search budget exhausted */
  BUSHY_PRECONDITION = 4, /* instance violates a stated hypothesis or cap */
  BUSHY_INTERNAL = 5
} bushy_status;

/* A JSON document owned by the library. */
typedef struct bushy_doc bushy_doc;

/* Message of the last failed call on this thread; never NULL. */
BUSHY_API const char* bushy_last_error(void);
BUSHY_API const char* bushy_version(void);

BUSHY_API const char* bushy_doc_text(const bushy_doc* d);
BUSHY_API void bushy_doc_free(bushy_doc* d);

/* Scenario layer. Inputs are JSON texts; caps_json and params_json may be
 * NULL. Each call stores a new document in *out on success. */
BUSHY_API bushy_status bushy_gen(const char* kind, const char* params_json, uint64_t seed,
                                 const char* caps_json, bushy_doc** out);

/* Stores the result document even when the run ends in a non-OK status; the
 * return value equals the result's exit code. */
BUSHY_API bushy_status bushy_run(const char* scenario_json, bushy_doc** out);

/* *out holds {"ok","detail"}; returns BUSHY_OK when ok is true and
 * BUSHY_INVALID when the certificate is rejected. */
BUSHY_API bushy_status bushy_verify(const char* result_json, const char* scenario_json, bushy_doc** out);

/* results_json: array of results; verdicts_json and timings_json (array of
 * milliseconds) may be NULL. */
BUSHY_API bushy_status bushy_report(const char* results_json, const char* verdicts_json,
                                    const char* timings_json, bushy_doc** out);
/* Renders a report document as Markdown text into *out. */
BUSHY_API bushy_status bushy_report_markdown(const char* report_json, bushy_doc** out);

/* *out holds the array of scenario kind names. */
BUSHY_API bushy_status bushy_kinds(bushy_doc** out);

/* *out holds an array of count scenarios. */
BUSHY_API bushy_status bushy_suite_plan(size_t count, uint64_t seed, const char* caps_json, bushy_doc** out);

/* A finitely branching tree given as {"nodes","bound","maxDepth"}. */
typedef struct bushy_tree bushy_tree;

BUSHY_API bushy_status bushy_tree_parse(const char* json, bushy_tree** out);
BUSHY_API size_t bushy_tree_size(const bushy_tree* t);
/* BUSHY_OK when the tree is prefix-closed and within its bound. */
BUSHY_API bushy_status bushy_tree_validate(const bushy_tree* t);
BUSHY_API void bushy_tree_free(bushy_tree* t);

/* A finite set of binary strings standing for their cylinders. */
typedef struct bushy_cylinders bushy_cylinders;

BUSHY_API bushy_status bushy_cylinders_parse(const char* json, bushy_cylinders** out);
/* Measure as a reduced fraction. */
BUSHY_API bushy_status bushy_cylinders_measure(const bushy_cylinders* v, char* buf, size_t len);
/* *covered is 1 when some member is a prefix of bits. */
BUSHY_API bushy_status bushy_cylinders_covers(const bushy_cylinders* v, const char* bits, int* covered);
BUSHY_API void bushy_cylinders_free(bushy_cylinders* v);

#ifdef __cplusplus
}
#endif

#endif /* BUSHY_BUSHY_H_ */
