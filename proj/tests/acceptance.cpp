#include <cstdio>
#include <cstring>
#include <string>

#include "torrank/acceptance.hpp"

using namespace torrank;

// Usage: acceptance [--quick] [--no-cache] [id ...]
int main(int argc, char** argv) {
    AcceptanceOptions opt;
    opt.cache_dir = default_cache_dir();
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--quick")) {
            opt.quick = true;
        } else if (!std::strcmp(argv[i], "--no-cache")) {
            opt.cache_dir.clear();
        } else {
            try {
                opt.only.push_back(std::stoi(argv[i]));
            } catch (const std::exception&) {
                std::fprintf(stderr, "usage: acceptance [--quick] [--no-cache] [id ...]\n");
                return 2;
            }
        }
    }
    int failed = 0;
    opt.on_result = [&](const CriterionResult& r) {
        std::printf("%s  [%.1fs]\n", criterion_line(r).c_str(), r.seconds);
        for (const auto& d : r.detail) std::printf("    %s\n", d.c_str());
        std::fflush(stdout);
        failed += !r.pass;
    };
    try {
        run_acceptance(opt);
    } catch (const CacheError& e) {
        std::fprintf(stderr, "cache integrity error: %s\n", e.what());
        return 2;
    }
    std::printf("%d of %zu criteria failed\n", failed, opt.only.empty() ? std::size_t{15} : opt.only.size());
    return failed ? 1 : 0;
}
