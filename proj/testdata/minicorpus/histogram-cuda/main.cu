#include <cstdio>
#include <vector>

__global__ void histogram(const unsigned* data, int n, unsigned* bins) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) atomicAdd(&bins[data[i] % 64], 1u);
}

int main() {
  const int n = 1 << 18;
  std::vector<unsigned> data(n), bins(64, 0), ref(64, 0);
  unsigned x = 12345u;
  for (int i = 0; i < n; ++i) {
    x = x * 1103515245u + 12345u;
    data[i] = x >> 8;
  }
  unsigned *dd, *db;
  cudaMalloc(&dd, n * sizeof(unsigned));
  cudaMalloc(&db, 64 * sizeof(unsigned));
  cudaMemcpy(dd, data.data(), n * sizeof(unsigned), cudaMemcpyHostToDevice);
  cudaMemset(db, 0, 64 * sizeof(unsigned));
  histogram<<<(n + 255) / 256, 256>>>(dd, n, db);
  cudaMemcpy(bins.data(), db, 64 * sizeof(unsigned), cudaMemcpyDeviceToHost);
  cudaFree(dd);
  cudaFree(db);
  for (int i = 0; i < n; ++i) ref[data[i] % 64]++;
  bool ok = true;
  for (int b = 0; b < 64; ++b) ok = ok && bins[b] == ref[b];
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
