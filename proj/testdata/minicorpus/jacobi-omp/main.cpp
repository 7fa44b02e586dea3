#include <cmath>
#include <cstdio>
#include <vector>

// Jacobi sweeps for the 2-D Laplace equation with a hot top edge.
static void sweep(const std::vector<double>& u, std::vector<double>& v, int n) {
#pragma omp parallel for collapse(2) \
        schedule(static)
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j)
      v[i * n + j] = 0.25 * (u[(i - 1) * n + j] + u[(i + 1) * n + j] + u[i * n + j - 1] + u[i * n + j + 1]);
}

int main() {
  const int n = 64, iters = 200;
  std::vector<double> u(n * n, 0.0), v(n * n, 0.0);
  for (int j = 0; j < n; ++j) u[j] = v[j] = 1.0;
  std::vector<double> ru = u, rv = v;
  for (int it = 0; it < iters; ++it) {
    sweep(u, v, n);
    u.swap(v);
  }
  for (int it = 0; it < iters; ++it) {
    for (int i = 1; i < n - 1; ++i)
      for (int j = 1; j < n - 1; ++j)
        rv[i * n + j] = 0.25 * (ru[(i - 1) * n + j] + ru[(i + 1) * n + j] + ru[i * n + j - 1] + ru[i * n + j + 1]);
    ru.swap(rv);
  }
  double diff = 0.0;
  for (int k = 0; k < n * n; ++k) diff = std::fmax(diff, std::fabs(u[k] - ru[k]));
  std::printf("Verification: %s\n", diff == 0.0 ? "PASS" : "FAIL");
  return diff == 0.0 ? 0 : 1;
}
