#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracac {

// Periodic grid on [-L, L)^dim with N points per axis, row-major.
struct GridField {
  int dim = 1;
  int N = 0;
  double L = 0;
  double time = 0;
  std::vector<double> values;

  GridField() = default;
  GridField(int d, int n, double half_width) : dim(d), N(n), L(half_width) {
    if (d != 1 && d != 2) throw std::invalid_argument("GridField: dim must be 1 or 2");
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("GridField: N must be a power of two");
    values.assign(d == 1 ? n : static_cast<std::size_t>(n) * n, 0.0);
  }

  double h() const { return 2 * L / N; }
  double coord(int i) const { return -L + i * h(); }
  std::size_t size() const { return values.size(); }
  double& at(int i) { return values[i]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * N + j]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * N + j]; }

  // Linear interpolation in 1D, periodic.
  double sample1d(double x) const {
    double u = (x + L) / h();
    u -= N * std::floor(u / N);
    const int i = static_cast<int>(u);
    const double w = u - i;
    return (1 - w) * values[i % N] + w * values[(i + 1) % N];
  }
};

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

// Header: dim (int64), N (int64), L (float64), time (float64); payload float64 row-major.
inline void write_snapshot(const GridField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  const std::int64_t d = f.dim, n = f.N;
  os.write(reinterpret_cast<const char*>(&d), 8);
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&f.L), 8);
  os.write(reinterpret_cast<const char*>(&f.time), 8);
  os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(8 * f.values.size()));
}

inline GridField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::int64_t d = 0, n = 0;
  double L = 0, t = 0;
  is.read(reinterpret_cast<char*>(&d), 8);
  is.read(reinterpret_cast<char*>(&n), 8);
  is.read(reinterpret_cast<char*>(&L), 8);
  is.read(reinterpret_cast<char*>(&t), 8);
  GridField f(static_cast<int>(d), static_cast<int>(n), L);
  f.time = t;
  is.read(reinterpret_cast<char*>(f.values.data()), static_cast<std::streamsize>(8 * f.values.size()));
  if (!is) throw std::runtime_error("truncated snapshot " + path);
  return f;
}

}  // namespace fracac
