#include <cstdio>
int main(int argc, char** argv) { (void)argc; (void)argv; std::printf("acceptance: not implemented\n"); return 1; }
