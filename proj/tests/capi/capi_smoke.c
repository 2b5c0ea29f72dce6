/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "rpoly/rpoly.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                               \
        }                                                             \
    } while (0)

int main(void) {
    EXPECT(strncmp(rpoly_version(), "rpoly", 5) == 0);
    EXPECT(rpoly_experiment_count() == 7);
    EXPECT(strcmp(rpoly_experiment_name(0), "clt") == 0);
    EXPECT(rpoly_experiment_name(99) == NULL);

    rpoly_config* cfg = NULL;
    const char* text =
        "{\"experiment\": \"variance_scaling\", \"body\": {\"kind\": \"cube\", \"dim\": 2},"
        " \"n_grid\": [10, 20], \"trials\": 20, \"master_seed\": 5, \"workers\": 2}";
    EXPECT(rpoly_config_parse(text, &cfg) == RPOLY_OK);
    EXPECT(rpoly_config_workers(cfg) == 2);
    EXPECT(strcmp(rpoly_config_output(cfg), "") == 0);
    rpoly_report* report = NULL;
    EXPECT(rpoly_run(cfg, 1, &report) == RPOLY_OK);
    EXPECT(rpoly_report_failed_trials(report) == 0);
    const char* json = NULL;
    size_t length = 0;
    EXPECT(rpoly_report_json(report, &json, &length) == RPOLY_OK);
    EXPECT(length > 0 && json[0] == '{' && strstr(json, "\"per_n\"") != NULL);
    rpoly_report_free(report);
    rpoly_config_free(cfg);

    rpoly_config* bad = NULL;
    EXPECT(rpoly_config_parse("{\"experiment\": \"clt\", \"bogus\": 1}", &bad) == RPOLY_ERR_CONFIG);
    EXPECT(bad == NULL);
    EXPECT(strlen(rpoly_last_error()) > 0);
    EXPECT(rpoly_config_load("/nonexistent/config.json", &bad) != RPOLY_OK);

    const double square[] = {0, 0, 1, 0, 1, 1, 0, 1, 0.5, 0.5};
    rpoly_hull* hull = NULL;
    EXPECT(rpoly_hull_build(2, square, 5, &hull) == RPOLY_OK);
    EXPECT(strlen(rpoly_last_error()) == 0);
    EXPECT(fabs(rpoly_hull_volume(hull) - 1.0) < 1e-15);
    int64_t vertices = 0;
    EXPECT(rpoly_hull_face_count(hull, 0, &vertices) == RPOLY_OK && vertices == 4);
    const double outside[] = {2, 0.5};
    int inserted = 0, inside = 0;
    EXPECT(rpoly_hull_insert(hull, outside, &inserted) == RPOLY_OK && inserted == 1);
    EXPECT(fabs(rpoly_hull_volume(hull) - 1.5) < 1e-15);
    EXPECT(rpoly_hull_contains(hull, outside, &inside) == RPOLY_OK && inside == 1);
    rpoly_hull_free(hull);

    const double line[] = {0, 0, 1, 1, 2, 2};
    hull = NULL;
    EXPECT(rpoly_hull_build(2, line, 3, &hull) == RPOLY_ERR_DEGENERATE);

    rpoly_body* body = NULL;
    EXPECT(rpoly_body_create("torus", 2, NULL, 0, &body) == RPOLY_ERR_INVALID_ARGUMENT);
    EXPECT(rpoly_body_create("ball", 3, NULL, 0, &body) == RPOLY_OK);
    EXPECT(rpoly_body_dim(body) == 3);
    double pts[30];
    EXPECT(rpoly_body_sample(body, 1, 0, 10, pts) == RPOLY_OK);
    for (int i = 0; i < 10; ++i) {
        EXPECT(rpoly_body_contains(body, pts + 3 * i, &inside) == RPOLY_OK && inside == 1);
    }
    const double origin[] = {0, 0, 0};
    double cap = 0;
    EXPECT(rpoly_body_minimal_cap_volume(body, origin, &cap) == RPOLY_OK && fabs(cap - 0.5) < 1e-9);
    rpoly_body_free(body);

    EXPECT(rpoly_run(NULL, 1, &report) == RPOLY_ERR_INVALID_ARGUMENT);

    if (failures == 0) printf("C API checks passed\n");
    return failures == 0 ? 0 : 1;
}
