#include <math.h>
#include <stdio.h>
#include "sphint.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        SphintStatus s_ = (call);                                          \
        if (s_ != SPHINT_STATUS_OK) {                                      \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)s_,        \
                    sphint_last_error());                                  \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    SphintRule *rule = NULL;
    SphintSolution *sol = NULL;
    CHECK(sphint_rule_equal_area(200, &rule));
    if (sphint_rule_len(rule) != 200) return 2;

    /* h = log, K = 1, f = 1 - mu_0: exact solution 1 */
    SphintKernel h = {SPHINT_KERNEL_FAMILY_LOG, 0.0, 0.0};
    SphintContinuous k = {SPHINT_CONTINUOUS_KIND_CONSTANT, 1.0};
    double mu[4];
    CHECK(sphint_moments(h, 3, mu));
    CHECK(sphint_solve(rule, h, k, 1.0 - mu[0], 4, &sol));
    double v = 0.0;
    CHECK(sphint_solution_evaluate(sol, 0.3, -0.2, 0.9, &v));
    printf("value %.17g\n", v);

    SphintKernel bad = {SPHINT_KERNEL_FAMILY_ALGEBRAIC, -3.0, 0.0};
    if (sphint_moments(bad, 3, mu) != SPHINT_STATUS_INVALID_ARGUMENT) return 3;
    printf("error %s\n", sphint_last_error());

    sphint_solution_free(sol);
    sphint_rule_free(rule);
    return fabs(v - 1.0) < 1e-2 ? 0 : 4;
}
