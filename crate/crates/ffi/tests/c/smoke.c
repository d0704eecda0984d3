#include <math.h>
#include <stdio.h>
#include <string.h>

#include "resolvent_lab.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    RlModel *student = NULL;
    CHECK(rl_model_student(1.0, 0.0, 0.0, &student) == RL_STATUS_OK);
    double p = 0.0;
    CHECK(rl_model_pdf_complex(student, 0.0, 0.0, &p) == RL_STATUS_OK);
    CHECK(fabs(p - 1.0 / M_PI) < 1e-14);

    RlBatch *batch = NULL;
    CHECK(rl_model_sample(student, 20000, 3, &batch) == RL_STATUS_OK);
    size_t len = 0;
    CHECK(rl_batch_len(batch, &len) == RL_STATUS_OK && len == 20000);
    double ks = 1.0;
    CHECK(rl_batch_ks_model(batch, student, &ks) == RL_STATUS_OK);
    CHECK(ks < 0.02);
    double slope = 0.0, amp = 0.0;
    CHECK(rl_batch_tail_fit(batch, 0.0, 0.0, 0.95, 0.999, &slope, &amp) == RL_STATUS_OK);
    CHECK(fabs(slope + 2.0) < 0.2 && fabs(amp - 1.0) < 0.15);
    rl_batch_free(batch);
    rl_model_free(student);

    RlModel *bad = NULL;
    CHECK(rl_model_student(-1.0, 0.0, 0.0, &bad) == RL_STATUS_INVALID_ARGUMENT);
    CHECK(bad == NULL);
    CHECK(rl_last_error_message() != NULL && strstr(rl_last_error_message(), "beta") != NULL);

    RlBatch *g = NULL;
    CHECK(rl_sample_matrix(RL_ENSEMBLE_GINIBRE, 20, 0.0, RL_STATISTIC_G11, 0.5, 0.0, 10, 1, 1, &g) == RL_STATUS_OK);
    double re[10], im[10];
    size_t written = 0;
    CHECK(rl_batch_values(g, re, im, 10, &written) == RL_STATUS_OK && written == 10);
    rl_batch_free(g);

    double a = 0.0;
    CHECK(rl_tail_amplitude(RL_TAIL_REGIME_BULK, 0.5, &a) == RL_STATUS_OK && fabs(a - 0.75) < 1e-15);
    printf("ok %s\n", rl_version());
    return 0;
}
