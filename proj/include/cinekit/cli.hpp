#pragma once

#include <cstdio>

namespace ck {

inline int run_cli(int, char**) {
    std::puts("cinekit: not wired up yet");
    return 1;
}

}  // namespace ck
