#include <stdio.h>
#include <string.h>
#include "nsframes.h"

static const char *TILING =
    "[system]\n"
    "kind = \"translate-family\"\n"
    "rule = \"periodic-tiling\"\n"
    "period = \"1/2\"\n"
    "steps = [2]\n"
    "support-length = \"1/2\"\n"
    "bases = [{ segments = [{ lo = 0, hi = \"1/2\", intercept = 2 }] }]\n";

int main(void) {
    NsfSegment seg = {0.0, 1.0, 1.0, 0.0, 1.0, 0.0};
    NsfSpectrum *s = NULL;
    if (nsf_spectrum_new(&seg, 1, 0.0, &s) != NSF_STATUS_OK) return 1;
    double re = 0, im = 0;
    nsf_spectrum_eval(s, 0.5, &re, &im);
    nsf_spectrum_free(s);
    if (re != 1.5 || im != 0.0) return 2;

    NsfSystem *sys = NULL;
    if (nsf_system_from_config_toml(TILING, &sys) != NSF_STATUS_OK) return 3;
    NsfBounds b;
    if (nsf_system_frame_bounds(sys, &b) != NSF_STATUS_OK) return 4;
    nsf_system_free(sys);
    if (b.lower != 2.0 || !b.is_tight || b.is_parseval) return 5;

    char *json = NULL;
    if (nsf_run_config(TILING, "analyze", &json) != NSF_STATUS_OK) return 6;
    int ok = strstr(json, "\"alpha\": 2.0") != NULL;
    nsf_string_free(json);
    if (!ok) return 7;

    if (nsf_run_config(TILING, "gabor", &json) != NSF_STATUS_CONFIG) return 8;
    if (nsf_last_error_message() == NULL) return 9;
    printf("ok %s\n", nsf_version());
    return 0;
}
