#include <cstdio>
#include <vector>

__global__ void reduce(const int* a, int n, unsigned long long* sum) {
  __shared__ unsigned long long part[256];
  int t = threadIdx.x;
  int i = blockIdx.x * blockDim.x + t;
  part[t] = i < n ? a[i] : 0;
  __syncthreads();
  for (int s = blockDim.x / 2; s > 0; s >>= 1) {
    if (t < s) part[t] += part[t + s];
    __syncthreads();
  }
  if (t == 0) atomicAdd(sum, part[0]);
}

int main() {
  const int n = 100000;
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = i % 7;
  long long expected = 0;
  for (int i = 0; i < n; ++i) expected += a[i];
  int* da;
  unsigned long long* dsum;
  unsigned long long got = 0;
  cudaMalloc(&da, n * sizeof(int));
  cudaMalloc(&dsum, sizeof(unsigned long long));
  cudaMemcpy(da, a.data(), n * sizeof(int), cudaMemcpyHostToDevice);
  cudaMemcpy(dsum, &got, sizeof(unsigned long long), cudaMemcpyHostToDevice);
  reduce<<<(n + 255) / 256, 256>>>(da, n, dsum);
  cudaMemcpy(&got, dsum, sizeof(unsigned long long), cudaMemcpyDeviceToHost);
  cudaFree(da);
  cudaFree(dsum);
  std::printf("sum %llu expected %lld\n", got, expected);
  std::printf("%s\n", (long long)got == expected ? "PASS" : "FAIL");
  return (long long)got == expected ? 0 : 1;
}
