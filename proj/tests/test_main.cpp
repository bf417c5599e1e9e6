#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>

#include "support.hpp"

int main(int argc, char** argv) {
    std::printf("ALGFORGE_SEED=%llu\n", static_cast<unsigned long long>(testing_support::seed()));
    doctest::Context ctx(argc, argv);
    return ctx.run();
}
