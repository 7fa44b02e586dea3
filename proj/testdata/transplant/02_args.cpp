#include <cstdlib>
static int twice(int v) { return 2 * v; }
/*<<*/int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 8;
  return twice(n) == 2 * n ? 0 : 1;
}/*>>*/
