#include <cstdio>
__global__ void add(float* a, const float* b, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) { a[i] += b[i]; }
}
/*<<*/int main(void) {
  const int n = 256;
  float *a, *b;
  cudaMalloc(&a, n * sizeof(float));
  cudaMalloc(&b, n * sizeof(float));
  add<<<(n + 127) / 128, 128>>>(a, b, n);
  cudaDeviceSynchronize();
  { { cudaFree(a); } cudaFree(b); }
  std::puts("PASS");
  return 0;
}/*>>*/
