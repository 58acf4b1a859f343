#include "doorstep/distance_transform.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace doorstep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// d(p) = min_q f(q) + s2 (p - q)^2 over one line.
void envelope_1d(const std::vector<double>& f, double s2, std::vector<double>& d, std::vector<int>& v,
                 std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int r = v[k];
      s = ((f[q] + s2 * q * q) - (f[r] + s2 * r * r)) / (2.0 * s2 * (q - r));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    if (s <= z[k]) {
      // k == 0 and the new parabola dominates everywhere.
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int p = 0; p < n; ++p) {
    while (z[j + 1] < p) ++j;
    const long dp = p - v[j];
    d[p] = f[v[j]] + s2 * static_cast<double>(dp * dp);
  }
}

}  // namespace

DistanceRaster squared_distance_transform(const ByteRaster& sources, double sx2, double sy2) {
  const int h = static_cast<int>(sources.rows());
  const int w = static_cast<int>(sources.cols());
  DistanceRaster out(h, w);
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  // Columns: distance along y to a source in the same column.
  f.resize(h);
  d.resize(h);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) f[r] = sources(r, c) ? 0.0 : kInf;
    envelope_1d(f, sy2, d, v, z);
    for (int r = 0; r < h; ++r) out(r, c) = d[r];
  }
  // Rows: combine with x offsets.
  f.resize(w);
  d.resize(w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[c] = out(r, c);
    envelope_1d(f, sx2, d, v, z);
    for (int c = 0; c < w; ++c) out(r, c) = d[c];
  }
  return out;
}

}  // namespace doorstep
