#include <cstdio>
// int main() { return 1; }
/* int main() { return 2; } */
void k(int* a) { a[0] = 1; }
/*<<*/int main() {
  int a[1];
  k(a);  // closing } here is a comment
  /* { unbalanced in comment */
  return a[0] == 1 ? 0 : 1;
}/*>>*/
