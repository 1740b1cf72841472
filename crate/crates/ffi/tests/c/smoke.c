#include <math.h>
#include <stdio.h>
#include "macrolab.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        MacrolabStatus st_ = (call);                                       \
        if (st_ != MACROLAB_STATUS_OK) {                                   \
            const char *msg_ = macrolab_last_error_message();              \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)st_,             \
                    msg_ ? msg_ : "");                                     \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    const double zero[4] = {0, 0, 0, 0};
    const double rho_re[4] = {0.9, 0, 0, 0.1};
    const double sigma_re[4] = {0.5, 0, 0, 0.5};
    MacrolabOperator *rho = NULL, *sigma = NULL;
    CHECK(macrolab_operator_from_parts(2, rho_re, zero, &rho));
    CHECK(macrolab_operator_from_parts(2, sigma_re, zero, &sigma));

    double d = 0;
    int inf = 0;
    CHECK(macrolab_relative_entropy(rho, sigma, &d, &inf));
    double expect = 0.9 * log(0.9 / 0.5) + 0.1 * log(0.1 / 0.5);
    if (inf || fabs(d - expect) > 1e-12) {
        fprintf(stderr, "relative entropy %g, want %g\n", d, expect);
        return 1;
    }

    double prob = 0;
    CHECK(macrolab_prob_eps_tensor(rho, sigma, 0.5, 2, &prob));
    if (!(prob > 0 && prob < 0.5)) {
        fprintf(stderr, "prob %g out of range\n", prob);
        return 1;
    }

    MacrolabOperator *bad = NULL;
    const double skew[4] = {0, 1, 0, 0};
    if (macrolab_operator_from_parts(2, skew, zero, &bad) != MACROLAB_STATUS_NOT_HERMITIAN) {
        return 1;
    }

    char *json = NULL;
    CHECK(macrolab_operator_to_json(rho, &json));
    macrolab_string_free(json);
    macrolab_operator_free(rho);
    macrolab_operator_free(sigma);
    printf("ok\n");
    return 0;
}
