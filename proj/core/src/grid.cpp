#include "qpspec/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace qps {

namespace {

// Planning is not thread safe in FFTW; execution with new arrays is.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plans;

struct Buffer {
  fftw_complex* p = nullptr;
  std::size_t n = 0;
  explicit Buffer(std::size_t size) : p(fftw_alloc_complex(size)), n(size) {
    for (std::size_t i = 0; i < n; ++i) p[i][0] = p[i][1] = 0.0;
  }
  ~Buffer() { fftw_free(p); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  cd get(std::size_t i) const { return {p[i][0], p[i][1]}; }
  void put(std::size_t i, cd z) {
    p[i][0] = z.real();
    p[i][1] = z.imag();
  }
};

void transform(Buffer& buf, int dim, int points, int sign) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(dim, points, sign);
    auto it = plans.find(key);
    if (it == plans.end()) {
      std::vector<int> dims(dim, points);
      Buffer tmp(buf.n);
      plan = fftw_plan_dft(dim, dims.data(), tmp.p, tmp.p, sign, FFTW_ESTIMATE);
      plans.emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, buf.p, buf.p);
}

std::size_t wrap_index(const Index& n, int points) {
  std::size_t idx = 0;
  for (int v : n) idx = idx * points + static_cast<std::size_t>(((v % points) + points) % points);
  return idx;
}

void check_grid(const Grid& g, int dim, int radius) {
  if (g.dim != dim) throw std::invalid_argument("grid: dimension mismatch");
  if (g.points <= 2 * radius) throw std::invalid_argument("grid: too coarse for the series radius");
}

cd shift_factor(const Index& n, const std::vector<double>& shift, double period) {
  if (shift.empty()) return cd(1.0);
  double ph = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) ph += n[i] * shift[i];
  return std::polar(1.0, kTwoPi * ph / period);
}

}  // namespace

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(points);
  return s;
}

std::vector<double> Grid::theta(std::size_t idx) const {
  std::vector<double> t(dim);
  for (int i = dim - 1; i >= 0; --i) {
    t[i] = period() * static_cast<double>(idx % points) / points;
    idx /= points;
  }
  return t;
}

std::vector<double> sample(const ScalarSeries& f, const Grid& g,
                           const std::vector<double>& shift) {
  check_grid(g, f.dim(), f.support_radius());
  Buffer buf(g.size());
  for (const auto& [n, c] : f.coeffs())
    buf.put(wrap_index(n, g.points), buf.get(wrap_index(n, g.points)) +
                                         c * shift_factor(n, shift, g.period()));
  transform(buf, g.dim, g.points, FFTW_BACKWARD);
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf.p[i][0];
  return out;
}

std::vector<Mat2> sample(const MatrixSeries& f, const Grid& g,
                         const std::vector<double>& shift) {
  check_grid(g, f.dim(), f.support_radius());
  std::vector<Mat2> out(g.size(), Mat2::zero());
  for (int e = 0; e < 4; ++e) {
    Buffer buf(g.size());
    for (const auto& [n, c] : f.coeffs())
      buf.put(wrap_index(n, g.points), c.v[e] * shift_factor(n, shift, g.period()));
    transform(buf, g.dim, g.points, FFTW_BACKWARD);
    for (std::size_t i = 0; i < out.size(); ++i) {
      double v = buf.p[i][0];
      switch (e) {
        case 0: out[i].a = v; break;
        case 1: out[i].b = v; break;
        case 2: out[i].c = v; break;
        default: out[i].d = v; break;
      }
    }
  }
  return out;
}

ScalarSeries analyze(const std::vector<double>& values, const Grid& g, int radius,
                     double prune) {
  check_grid(g, g.dim, radius);
  if (values.size() != g.size()) throw std::invalid_argument("analyze: size mismatch");
  Buffer buf(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) buf.put(i, cd(values[i]));
  transform(buf, g.dim, g.points, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(g.size());
  ScalarSeries out(g.dim, radius, g.half_period);
  for (const Index& n : index_ball(g.dim, radius)) {
    cd c = 0.5 * scale *
           (buf.get(wrap_index(n, g.points)) +
            std::conj(buf.get(wrap_index(ScalarSeries::negate(n), g.points))));
    if (std::abs(c) > prune) out.set_raw(n, c);
  }
  return out;
}

MatrixSeries analyze(const std::vector<Mat2>& values, const Grid& g, int radius,
                     double prune) {
  check_grid(g, g.dim, radius);
  if (values.size() != g.size()) throw std::invalid_argument("analyze: size mismatch");
  const double scale = 1.0 / static_cast<double>(g.size());
  std::vector<Index> ball = index_ball(g.dim, radius);
  std::vector<CMat2> coeffs(ball.size());
  for (int e = 0; e < 4; ++e) {
    Buffer buf(g.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Mat2& m = values[i];
      buf.put(i, cd(e == 0 ? m.a : e == 1 ? m.b : e == 2 ? m.c : m.d));
    }
    transform(buf, g.dim, g.points, FFTW_FORWARD);
    for (std::size_t k = 0; k < ball.size(); ++k)
      coeffs[k].v[e] =
          0.5 * scale *
          (buf.get(wrap_index(ball[k], g.points)) +
           std::conj(buf.get(wrap_index(MatrixSeries::negate(ball[k]), g.points))));
  }
  MatrixSeries out(g.dim, radius, g.half_period);
  for (std::size_t k = 0; k < ball.size(); ++k)
    if (coeffs[k].norm() > prune) out.set_raw(ball[k], coeffs[k]);
  return out;
}

}  // namespace qps
