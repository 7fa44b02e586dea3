#include <cmath>
#include <cstdio>
#include <vector>

struct Body {
  double x, y, z, vx, vy, vz;
};

// One explicit Euler step, O(n^2) forces.
void step(std::vector<Body>& bodies, double dt) {
  const int n = static_cast<int>(bodies.size());
  std::vector<double> ax(n), ay(n), az(n);
#pragma omp parallel
  {
#pragma omp for
    for (int i = 0; i < n; ++i) {
      double fx = 0, fy = 0, fz = 0;
      for (int j = 0; j < n; ++j) {
        const double dx = bodies[j].x - bodies[i].x, dy = bodies[j].y - bodies[i].y, dz = bodies[j].z - bodies[i].z;
        const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz + 1e-9);
        fx += dx * inv * inv * inv;
        fy += dy * inv * inv * inv;
        fz += dz * inv * inv * inv;
      }
      ax[i] = fx;
      ay[i] = fy;
      az[i] = fz;
    }
#pragma omp for
    for (int i = 0; i < n; ++i) {
      bodies[i].vx += dt * ax[i];
      bodies[i].vy += dt * ay[i];
      bodies[i].vz += dt * az[i];
      bodies[i].x += dt * bodies[i].vx;
      bodies[i].y += dt * bodies[i].vy;
      bodies[i].z += dt * bodies[i].vz;
    }
  }
}

int main() {
  const int n = 256;
  std::vector<Body> bodies(n);
  for (int i = 0; i < n; ++i) bodies[i] = {std::cos(i * 0.1), std::sin(i * 0.1), 0.01 * i, 0, 0, 0};
  std::vector<Body> ref = bodies;
  for (int s = 0; s < 4; ++s) step(bodies, 1e-3);
  for (int s = 0; s < 4; ++s) {
    std::vector<double> ax(n), ay(n), az(n);
    for (int i = 0; i < n; ++i) {
      double fx = 0, fy = 0, fz = 0;
      for (int j = 0; j < n; ++j) {
        const double dx = ref[j].x - ref[i].x, dy = ref[j].y - ref[i].y, dz = ref[j].z - ref[i].z;
        const double inv = 1.0 / std::sqrt(dx * dx + dy * dy + dz * dz + 1e-9);
        fx += dx * inv * inv * inv;
        fy += dy * inv * inv * inv;
        fz += dz * inv * inv * inv;
      }
      ax[i] = fx;
      ay[i] = fy;
      az[i] = fz;
    }
    for (int i = 0; i < n; ++i) {
      ref[i].vx += 1e-3 * ax[i];
      ref[i].vy += 1e-3 * ay[i];
      ref[i].vz += 1e-3 * az[i];
      ref[i].x += 1e-3 * ref[i].vx;
      ref[i].y += 1e-3 * ref[i].vy;
      ref[i].z += 1e-3 * ref[i].vz;
    }
  }
  double diff = 0;
  for (int i = 0; i < n; ++i) diff = std::fmax(diff, std::fabs(bodies[i].x - ref[i].x));
  std::printf("%s\n", diff < 1e-9 ? "PASS" : "FAIL");
  return diff < 1e-9 ? 0 : 1;
}
