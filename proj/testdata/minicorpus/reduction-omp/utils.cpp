// Timing helpers shared by the OpenMP variants; not part of the kernel.
#include <chrono>

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}
