namespace util {
int main() { return 7; }
}
struct Runner {
  int main() { return 8; }
};
int helper(int x) { return x + 1; }
/*<<*/int main() {
  Runner r;
  return util::main() + r.main() + helper(0) == 16 ? 0 : 1;
}/*>>*/
