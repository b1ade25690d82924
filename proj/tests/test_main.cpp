// Copyright 2026 the corrigid authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <string>
#include <vector>

// Plain (non --dt-) arguments, for tests that drive an external binary.
// cli_tests gets the path of the command line tool this way.
std::vector<std::string> g_test_args;

int main(int argc, char** argv) {
    doctest::Context ctx;
    std::vector<char*> dt_argv = {argv[0]};
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a.rfind("--dt-", 0) == 0 || a.rfind("-", 0) == 0)
            dt_argv.push_back(argv[i]);
        else
            g_test_args.push_back(a);
    }
    ctx.applyCommandLine(static_cast<int>(dt_argv.size()), dt_argv.data());
    return ctx.run();
}
