#include <math.h>
#include <stdio.h>
#include <string.h>

#include "typealign.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,   \
                    #cond, ta_last_error());                          \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: smoke profiles_a profiles_b\n");
        return 2;
    }
    TaProfileSet *a = NULL, *b = NULL;
    TaAlignmentTable *t = NULL;
    TaRanking *r = NULL;
    double score = -1.0;
    size_t n = 0;

    CHECK(strlen(ta_version()) > 0);
    CHECK(ta_profiles_load(argv[1], &a) == TA_STATUS_OK);
    CHECK(ta_profiles_load(argv[2], &b) == TA_STATUS_OK);
    CHECK(ta_profiles_len(a) == 2 && ta_profiles_len(b) == 2);

    CHECK(ta_align(a, b, TA_MEASURES_ALL, &t) == TA_STATUS_OK);
    CHECK(ta_table_len(t) == 4);
    CHECK(ta_table_score(t, "A1", "B1", TA_MEASURE_JACCARD, &score) == TA_STATUS_OK);
    CHECK(fabs(score - 0.5) < 1e-12);
    CHECK(ta_table_threshold_count(t, TA_MEASURE_LOG_TF, 0.5, &n) == TA_STATUS_OK);
    CHECK(n == 2);

    CHECK(ta_table_top_k(t, "A1", TA_MEASURE_JACCARD, 5, &r) == TA_STATUS_OK);
    CHECK(ta_ranking_len(r) == 2);
    CHECK(strcmp(ta_ranking_target(r, 0), "B1") == 0);
    CHECK(ta_ranking_target(r, 2) == NULL);
    CHECK(isnan(ta_ranking_score(r, 2)));

    CHECK(ta_table_score(t, "A1", "nope", TA_MEASURE_JACCARD, &score) == TA_STATUS_NOT_FOUND);
    CHECK(strstr(ta_last_error(), "nope") != NULL);
    CHECK(ta_profiles_load("/no/such/file", &a) == TA_STATUS_IO);

    ta_ranking_free(r);
    ta_table_free(t);
    ta_profiles_free(a);
    ta_profiles_free(b);
    printf("ok\n");
    return 0;
}
