// Dedicated acceptance-suite runner: one PASS/FAIL line per criterion, exit 0
// iff all pass.  `trielab selftest` runs the same suite.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "trielab/acceptance.hpp"

int main(int argc, char** argv) {
    trielab::acceptance::options opts;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            opts.seed = std::strtoull(argv[++i], nullptr, 10);
        } else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
            opts.threads = static_cast<uint32_t>(std::strtoul(argv[++i], nullptr, 10));
        } else if (std::strcmp(argv[i], "--help") == 0) {
            std::printf("usage: trielab-acceptance [--seed N] [--threads N]\n");
            return 0;
        } else {
            std::fprintf(stderr, "unknown argument: %s\n", argv[i]);
            return 2;
        }
    }
    const auto results = trielab::acceptance::run_all(opts);
    return trielab::acceptance::report(results, stdout);
}
