#include <cstdio>
const char* banner() { return "}{ not a brace {"; }
/*<<*/int main() {
  char open = '{';
  char close = '}';
  std::puts("}}}");
  std::printf("%c%c %s\n", open, close, banner());
  return 0;
}/*>>*/
