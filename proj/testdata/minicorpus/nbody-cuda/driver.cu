#include <cstdio>
int main() {
  std::printf("PASS\n");
  return 0;
}
