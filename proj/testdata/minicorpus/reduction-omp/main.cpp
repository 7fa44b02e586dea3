#include <cstdio>
#include <vector>

/* Sum reduction offloaded with a target region. */
long long reduce(const int* a, int n) {
  long long sum = 0;
#pragma omp target teams distribute parallel for \
    map(to: a[0:n]) map(tofrom: sum) reduction(+ : sum)
  for (int i = 0; i < n; ++i) sum += a[i];
  return sum;
}

int main() {
  const int n = 100000;
  std::vector<int> a(n);
  for (int i = 0; i < n; ++i) a[i] = i % 7;
  long long expected = 0;
  for (int i = 0; i < n; ++i) expected += a[i];
  const long long got = reduce(a.data(), n);
  std::printf("sum %lld expected %lld\n", got, expected);
  std::printf("%s\n", got == expected ? "PASS" : "FAIL");
  return got == expected ? 0 : 1;
}
