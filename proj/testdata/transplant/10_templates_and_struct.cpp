#include <array>
template <typename T, int N>
struct Buf {
  std::array<T, N> data{};
  T& operator[](int i) { return data[i]; }
};
template <typename T>
T reduce(const T* p, int n) { T s{}; for (int i = 0; i < n; ++i) { s += p[i]; } return s; }
/*<<*/int main() {
  Buf<int, 4> b;
  for (int i = 0; i < 4; ++i) { b[i] = i; }
  struct Local { int v; int get() const { return v; } } loc{reduce(b.data.data(), 4)};
  return loc.get() == 6 ? 0 : 1;
}/*>>*/
extern "C" int tail_fn(void) { return 0; }
