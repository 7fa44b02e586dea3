#include <cstdio>
#include <vector>

__global__ void block_scan(const int* in, long long* out, long long* totals, int n, int block) {
  int b = blockIdx.x * blockDim.x + threadIdx.x;
  int nblocks = (n + block - 1) / block;
  if (b >= nblocks) return;
  long long acc = 0;
  for (int i = b * block; i < n && i < (b + 1) * block; ++i) out[i] = acc += in[i];
  totals[b] = acc;
}

__global__ void add_offsets(long long* out, const long long* offsets, int n, int block) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i < n) out[i] += offsets[i / block];
}

int main() {
  const int n = 50000, block = 1024;
  const int nblocks = (n + block - 1) / block;
  std::vector<int> in(n);
  std::vector<long long> out(n), totals(nblocks);
  for (int i = 0; i < n; ++i) in[i] = (i * 31) % 17 - 8;
  int* din;
  long long *dout, *dtot;
  cudaMalloc(&din, n * sizeof(int));
  cudaMalloc(&dout, n * sizeof(long long));
  cudaMalloc(&dtot, nblocks * sizeof(long long));
  cudaMemcpy(din, in.data(), n * sizeof(int), cudaMemcpyHostToDevice);
  block_scan<<<1, 64>>>(din, dout, dtot, n, block);
  cudaMemcpy(totals.data(), dtot, nblocks * sizeof(long long), cudaMemcpyDeviceToHost);
  long long offset = 0;
  for (int b = 0; b < nblocks; ++b) {
    const long long t = totals[b];
    totals[b] = offset;
    offset += t;
  }
  cudaMemcpy(dtot, totals.data(), nblocks * sizeof(long long), cudaMemcpyHostToDevice);
  add_offsets<<<(n + 255) / 256, 256>>>(dout, dtot, n, block);
  cudaMemcpy(out.data(), dout, n * sizeof(long long), cudaMemcpyDeviceToHost);
  cudaFree(din);
  cudaFree(dout);
  cudaFree(dtot);
  long long acc = 0;
  int bad = 0;
  for (int i = 0; i < n; ++i) {
    acc += in[i];
    if (out[i] != acc) ++bad;
  }
  std::printf("%s\n", bad == 0 ? "PASS" : "FAIL");
  return bad == 0 ? 0 : 1;
}
