/* The public header must compile as C and link against the shared library. */
#include <stdio.h>
#include <string.h>

#include "opkernel/opkernel.h"

int main(void) {
  static const char* kernel =
      "{\"type\":\"separable\",\"h\":1,\"terms\":[{\"family\":\"gaussian\",\"sigma\":1.0,"
      "\"coefficient\":[[1.0,0.0]]}]}";
  const double points[] = {0.0, 1.0, 2.5};
  opk_kernel* k = NULL;
  opk_gram* g = NULL;
  int is_psd = 0;
  double min_ev = 0.0;

  if (opk_kernel_from_json(kernel, &k) != OPK_OK) {
    fprintf(stderr, "kernel: %s\n", opk_last_error());
    return 1;
  }
  if (opk_gram_assemble(k, points, 3, 1, &g) != OPK_OK || opk_gram_check_pd(g, 1e-10, &is_psd, &min_ev) != OPK_OK) {
    fprintf(stderr, "gram: %s\n", opk_last_error());
    return 1;
  }
  opk_gram_free(g);
  opk_kernel_free(k);
  if (!is_psd || min_ev <= 0.0) return 1;
  if (strlen(opk_version()) == 0) return 1;
  printf("capi smoke ok (min eigenvalue %.6f)\n", min_ev);
  return 0;
}
