#include <math.h>
#include <stdio.h>
#include <string.h>

#include "hkcce.h"

int main(void) {
    double q = 0.0, oracle = 0.0;
    HkcceScattering *h = NULL;
    if (hkcce_scattering_solve(4, 0.25, 2.0, 0.0, 0.0, &h) != HKCCE_STATUS_OK) {
        fprintf(stderr, "solve: %s\n", hkcce_last_error_message());
        return 1;
    }
    hkcce_scattering_q(h, &q);
    hkcce_sphere_q_oracle(4, 0.25, 2.0, &oracle);
    hkcce_scattering_free(h);
    if (fabs(q - oracle) > 1e-6 * oracle) {
        fprintf(stderr, "q %.15g oracle %.15g\n", q, oracle);
        return 2;
    }

    HkcceReport r;
    if (hkcce_verify_lee(4, 1.0, 0.0, &r) != HKCCE_STATUS_OK || r.verdict != HKCCE_VERDICT_EQUALITY) {
        return 3;
    }
    if (hkcce_verify_adapted(4, 0.99, 1.0, 0.0, &r) != HKCCE_STATUS_DOMAIN) {
        return 4;
    }
    if (strstr(hkcce_last_error_message(), "gamma") == NULL) {
        return 5;
    }

    char *json = NULL;
    if (hkcce_prop21_json(5, &json) != HKCCE_STATUS_OK || strstr(json, "1/135") == NULL) {
        return 6;
    }
    hkcce_string_free(json);
    printf("ok %s\n", hkcce_version());
    return 0;
}
