#include <cstdio>
#include <omp.h>
#define BLOCK(x) { x; }
void fill(double* d, int n) {
#pragma omp parallel for
  for (int i = 0; i < n; ++i) d[i] = i;
}
/*<<*/int main()
{
  double d[64];
  fill(d, 64);
#pragma omp parallel
  {
    BLOCK(int t = omp_get_thread_num(); (void)t)
  }
  if (d[63] != 63.0) { std::puts("FAIL"); return 1; }
  std::puts("PASS");
  return 0;
}/*>>*/
