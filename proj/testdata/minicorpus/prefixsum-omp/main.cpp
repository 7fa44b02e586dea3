#include <cstdio>
#include <vector>

// Blocked inclusive scan: local scans, serial block offsets, then fix-up.
void scan(const int* in, long long* out, int n, int block) {
  const int nblocks = (n + block - 1) / block;
  std::vector<long long> totals(nblocks, 0);
#pragma omp parallel for
  for (int b = 0; b < nblocks; ++b) {
    long long acc = 0;
    for (int i = b * block; i < n && i < (b + 1) * block; ++i) out[i] = acc += in[i];
    totals[b] = acc;
  }
  long long offset = 0;
  for (int b = 0; b < nblocks; ++b) {
    const long long t = totals[b];
    totals[b] = offset;
    offset += t;
  }
#pragma omp parallel for
  for (int i = 0; i < n; ++i) out[i] += totals[i / block];
}

int main() {
  const int n = 50000;
  std::vector<int> in(n);
  std::vector<long long> out(n);
  for (int i = 0; i < n; ++i) in[i] = (i * 31) % 17 - 8;
  scan(in.data(), out.data(), n, 1024);
  long long acc = 0;
  int bad = 0;
  for (int i = 0; i < n; ++i) {
    acc += in[i];
    if (out[i] != acc) ++bad;
  }
  std::printf("%s\n", bad == 0 ? "PASS" : "FAIL");
  return bad == 0 ? 0 : 1;
}
