#include <cstdio>

int main() {
    std::fprintf(stderr, "blockcc: command line not wired up yet\n");
    return 4;
}
