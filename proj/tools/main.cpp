#include <cstdio>

int main() {
    std::puts("biphoton: placeholder");
    return 0;
}
