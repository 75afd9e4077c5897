// Acceptance gate: one line per criterion, nonzero exit when anything fails.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "ri/acceptance.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 42;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
            seed = std::strtoull(argv[++i], nullptr, 10);
        } else {
            std::fprintf(stderr, "usage: %s [--seed N]\n", argv[0]);
            return 2;
        }
    }
    bool all_pass = true;
    for (const ri::CriterionResult& r : ri::acceptance::run_all(seed)) {
        std::printf("criterion %d [%s]: %s (%.1fs) -- %s\n", r.id, r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 3;
}
