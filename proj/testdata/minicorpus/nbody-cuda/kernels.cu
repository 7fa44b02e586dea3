__global__ void forces(const double4* p, double3* a, int n) {
  int i = blockIdx.x * blockDim.x + threadIdx.x;
  if (i >= n) return;
  double3 f = {0, 0, 0};
  for (int j = 0; j < n; ++j) {
    double dx = p[j].x - p[i].x, dy = p[j].y - p[i].y, dz = p[j].z - p[i].z;
    double inv = rsqrt(dx * dx + dy * dy + dz * dz + 1e-9);
    f.x += dx * inv * inv * inv;
    f.y += dy * inv * inv * inv;
    f.z += dz * inv * inv * inv;
  }
  a[i] = f;
}
