#include <cmath>
#include <cstdio>
#include <vector>

__global__ void stencil(const double* in, double* out, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i > 0 && i < n - 1) out[i] = (in[i - 1] + in[i] + in[i + 1]) / 3.0;
}

int main() {
  const int n = 4096, steps = 20;
  std::vector<double> a(n), ref(n), tmp(n, 0.0);
  for (int i = 0; i < n; ++i) a[i] = ref[i] = std::sin(0.01 * i);
  tmp[0] = a[0];
  tmp[n - 1] = a[n - 1];
  double *da, *db;
  cudaMalloc(&da, n * sizeof(double));
  cudaMalloc(&db, n * sizeof(double));
  cudaMemcpy(da, a.data(), n * sizeof(double), cudaMemcpyHostToDevice);
  cudaMemcpy(db, a.data(), n * sizeof(double), cudaMemcpyHostToDevice);
  for (int s = 0; s < steps; ++s) {
    stencil<<<(n + 127) / 128, 128>>>(da, db, n);
    double* t = da;
    da = db;
    db = t;
    for (int i = 1; i < n - 1; ++i) tmp[i] = (ref[i - 1] + ref[i] + ref[i + 1]) / 3.0;
    ref.swap(tmp);
  }
  cudaMemcpy(a.data(), da, n * sizeof(double), cudaMemcpyDeviceToHost);
  cudaFree(da);
  cudaFree(db);
  double diff = 0.0;
  for (int i = 0; i < n; ++i) diff = std::fmax(diff, std::fabs(a[i] - ref[i]));
  std::printf("max diff %g\n", diff);
  std::printf("%s\n", diff < 1e-12 ? "PASS" : "FAIL");
  return diff < 1e-12 ? 0 : 1;
}
