#include <stdio.h>
#include <string.h>

#include "flagforge.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,    \
                    ff_last_error());                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

static const char *KOSZUL =
    "{\"ring\": {\"characteristic\": 0, \"vars\": [\"x\", \"y\"]},"
    " \"twists\": [[0], [-1, -1], [-2]],"
    " \"maps\": [[[\"x\", \"y\"]], [[\"-y\"], [\"x\"]]]}";

int main(void) {
    FfComplex *c = NULL;
    FfDiffModule *d = NULL, *m = NULL;
    size_t len = 0, rank = 0, total = 0, h = 0;
    int64_t lo = 0, hi = 0;
    const int64_t degrees[] = {2, 2, 5, 7, 9};

    CHECK(ff_complex_from_json(KOSZUL, &c) == FF_STATUS_OK);
    CHECK(ff_complex_length(c, &len) == FF_STATUS_OK && len == 2);
    CHECK(ff_fold(c, 2, &d) == FF_STATUS_OK);
    CHECK(ff_dm_rank(d, &rank) == FF_STATUS_OK && rank == 4);
    CHECK(ff_dm_homology_dim(d, 0, &h) == FF_STATUS_OK && h == 1);
    CHECK(ff_dm_minimize(d, &m, &total) == FF_STATUS_OK && total == 4);
    CHECK(ff_dim_bounds(c, 2, &lo, &hi) == FF_STATUS_OK && lo == 1 && hi == 1);
    CHECK(ff_rigidity_window(degrees, 5, 5, &lo, &hi) == FF_STATUS_OK);
    CHECK(lo == -16 && hi == 16);
    CHECK(ff_complex_from_json("{", &c) == FF_STATUS_PARSE);
    CHECK(strlen(ff_last_error()) > 0);

    ff_dm_free(m);
    ff_dm_free(d);
    ff_complex_free(c);
    printf("ok %s\n", ff_version());
    return 0;
}
