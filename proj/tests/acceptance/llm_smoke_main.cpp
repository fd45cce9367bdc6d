#include <cstdio>
#include <cstdlib>

int main() {
    if (!std::getenv("BLOCKCC_LLM_URL")) {
        std::fprintf(stderr, "skipped: BLOCKCC_LLM_URL not set\n");
        return 77;
    }
    std::fprintf(stderr, "llm smoke not implemented yet\n");
    return 1;
}
