#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "symsem.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    fread(buf, 1, n, f);
    buf[n] = '\0';
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc < 2) return 2;
    char *doc = slurp(argv[1]);
    if (!doc) return 2;

    SymsemModel *model = NULL;
    if (symsem_analyze_json(doc, NULL, &model) != SYMSEM_STATUS_OK) {
        fprintf(stderr, "analyze: %s\n", symsem_last_error());
        return 1;
    }
    SymsemStats stats;
    if (symsem_stats(model, SYMSEM_SCOPE_PATCHES, &stats) != SYMSEM_STATUS_OK) return 1;
    printf("NP=%llu NSP=%llu rel=%.3f\n", (unsigned long long)stats.num_elements,
           (unsigned long long)stats.num_symmetric, stats.relative_symmetry);

    char *answer = NULL;
    if (symsem_query(model, "non_symmetrical_objects(X).", &answer) != SYMSEM_STATUS_OK) return 1;
    fputs(answer, stdout);
    symsem_string_free(answer);

    if (symsem_query(model, "symmetrical_element(", &answer) != SYMSEM_STATUS_QUERY) return 1;
    printf("error: %s\n", strchr(symsem_last_error(), ':') != NULL ? "reported" : "missing");

    symsem_model_free(model);
    free(doc);
    return 0;
}
