#include <cstdio>
void scale(float* x, int n) { for (int i = 0; i < n; ++i) x[i] *= 2.0f; }
/*<<*/int main() {
  float x[4] = {1, 2, 3, 4};
  scale(x, 4);
  std::printf("%f\n", x[0]);
  return 0;
}/*>>*/
