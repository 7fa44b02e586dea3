#include <cmath>
#include <cstdio>
#include <vector>

// 3-point averaging stencil, interior points only
void stencil(const std::vector<double>& in, std::vector<double>& out) {
  const int n = static_cast<int>(in.size());
  #pragma omp parallel for schedule(static)
  for (int i = 1; i < n - 1; ++i) {
    out[i] = (in[i - 1] + in[i] + in[i + 1]) / 3.0;
  }
}

int main() {
  const int n = 4096, steps = 20;
  std::vector<double> a(n), b(n, 0.0), ref(n), tmp(n, 0.0);
  for (int i = 0; i < n; ++i) a[i] = ref[i] = std::sin(0.01 * i);
  b[0] = tmp[0] = a[0];
  b[n - 1] = tmp[n - 1] = a[n - 1];
  for (int s = 0; s < steps; ++s) {
    stencil(a, b);
    a.swap(b);
    for (int i = 1; i < n - 1; ++i) tmp[i] = (ref[i - 1] + ref[i] + ref[i + 1]) / 3.0;
    ref.swap(tmp);
  }
  double diff = 0.0;
  for (int i = 0; i < n; ++i) diff = std::fmax(diff, std::fabs(a[i] - ref[i]));
  std::printf("max diff %g\n", diff);
  std::printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
