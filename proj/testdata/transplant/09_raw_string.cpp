#include <cstdio>
#include <string>
std::string doc() { return R"x(int main() { } "quoted" )x"; }
/*<<*/int main() {
  std::string s = R"(}})";
  auto f = [s]() { if (s.size() == 2) { return 0; } return 1; };
  std::printf("%s\n", doc().c_str());
  return f();
}/*>>*/
