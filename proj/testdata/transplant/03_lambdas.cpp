#include <algorithm>
#include <vector>
int sum(const std::vector<int>& v) { int s = 0; for (int x : v) s += x; return s; }
/*<<*/int main() {
  std::vector<int> v{3, 1, 2};
  auto cmp = [](int a, int b) {
    auto key = [&](int x) { return x % 2 == 0 ? x : -x; };
    return key(a) < key(b);
  };
  std::sort(v.begin(), v.end(), cmp);
  auto run = [&] { return [&] { return sum(v); }(); };
  return run() == 6 ? 0 : 1;
}/*>>*/
void after(int* p) { *p = 0; }
