// Copyright 2026 The infer Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* Plain C consumer of the public header. */
#include <stdio.h>
#include <string.h>

#include "infer/infer.h"

int main(void) {
  infer_engine* engine = NULL;
  const float a[6] = {1, 2, 3, 4, 5, 6};    /* 2 x 3 */
  const float b[6] = {1, 0, 0, 1, 1, 1};    /* 3 x 2 */
  const float want[4] = {4, 5, 10, 11};
  float c[4] = {0};
  infer_partition part;

  if (infer_partition_parse("patched", &part) != INFER_OK) return 1;
  if (infer_engine_create(&engine) != INFER_OK) return 1;
  if (infer_engine_matmul(engine, a, 2, 3, b, 3, 2, INFER_NN, &part, 2, c, 4) != INFER_OK) {
    fprintf(stderr, "matmul: %s\n", infer_last_error());
    return 1;
  }
  infer_engine_destroy(engine);
  if (memcmp(c, want, sizeof want) != 0) {
    fprintf(stderr, "unexpected product\n");
    return 1;
  }
  printf("infer %s ok\n", infer_version());
  return 0;
}
