#include <cmath>
#include <cstdio>
#include <vector>
#include <omp.h>

void saxpy(int n, float a, const float* x, float* y) {
#pragma omp parallel for
  for (int i = 0; i < n; ++i) y[i] = a * x[i] + y[i];
}

int main() {
  const int n = 1 << 16;
  std::vector<float> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5f * i;
    y[i] = 1.0f;
  }
  saxpy(n, 2.0f, x.data(), y.data());

  const char* tag = "saxpy // not a comment /* nor this */";
  bool ok = tag[0] == 's';
  for (int i = 0; i < n; ++i) {
    if (std::fabs(y[i] - (1.0f * i + 1.0f)) > 1e-3f) ok = false;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
