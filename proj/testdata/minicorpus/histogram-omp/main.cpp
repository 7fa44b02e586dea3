#include <cstdio>
#include <vector>

/* 64-bin histogram with atomic increments */
void histogram(const unsigned* data, int n, unsigned* bins) {
#pragma omp parallel for
  for (int i = 0; i < n; ++i) {
#pragma omp atomic
    bins[data[i] % 64]++;
  }
}

int main() {
  const int n = 1 << 18;
  std::vector<unsigned> data(n), bins(64, 0), ref(64, 0);
  unsigned x = 12345u;
  for (int i = 0; i < n; ++i) {
    x = x * 1103515245u + 12345u;  // LCG
    data[i] = x >> 8;
  }
  histogram(data.data(), n, bins.data());
  for (int i = 0; i < n; ++i) ref[data[i] % 64]++;
  bool ok = true;
  for (int b = 0; b < 64; ++b) ok = ok && bins[b] == ref[b];
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}
