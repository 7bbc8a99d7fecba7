#include <stdexcept>

#include "json.hpp"
#include "qpspec/fourier.hpp"

namespace qps {

using nlohmann::json;

namespace {

json header(int dim, bool half, int radius) {
  json j;
  j["dim"] = dim;
  j["half_period"] = half;
  j["radius"] = radius;
  j["coeffs"] = json::array();
  return j;
}

template <class T>
FourierSeries<T> parse(const std::string& text, auto&& read_coeff) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("series JSON: ") + e.what());
  }
  for (const char* key : {"dim", "radius", "coeffs"})
    if (!j.contains(key)) throw std::invalid_argument(std::string("series JSON: missing ") + key);
  int dim = j.at("dim").get<int>();
  int radius = j.at("radius").get<int>();
  bool half = j.value("half_period", false);
  FourierSeries<T> f(dim, radius, half);
  for (const auto& item : j.at("coeffs")) {
    Index n = item.at("n").get<Index>();
    f.set_raw(n, read_coeff(item));
  }
  // Fill missing conjugate partners, reject inconsistent ones.
  auto raw = f.coeffs();
  for (const auto& [n, c] : raw) {
    Index m = FourierSeries<T>::negate(n);
    auto it = raw.find(m);
    T want = SeriesTraits<T>::conj(c);
    if (it == raw.end()) {
      f.set_raw(m, want);
    } else if (SeriesTraits<T>::norm(it->second - want) >
               1e-12 * std::max(1.0, SeriesTraits<T>::norm(c))) {
      throw std::invalid_argument("series JSON: coefficients violate conjugate symmetry");
    }
  }
  return f;
}

}  // namespace

std::string to_json(const ScalarSeries& f, int indent) {
  json j = header(f.dim(), f.half_period(), f.radius());
  for (const auto& [n, c] : f.coeffs())
    j["coeffs"].push_back({{"n", n}, {"re", c.real()}, {"im", c.imag()}});
  return j.dump(indent);
}

std::string to_json(const MatrixSeries& f, int indent) {
  json j = header(f.dim(), f.half_period(), f.radius());
  for (const auto& [n, c] : f.coeffs()) {
    json re = json::array(), im = json::array();
    for (const auto& z : c.v) {
      re.push_back(z.real());
      im.push_back(z.imag());
    }
    j["coeffs"].push_back({{"n", n}, {"re", re}, {"im", im}});
  }
  return j.dump(indent);
}

ScalarSeries scalar_series_from_json(const std::string& text) {
  return parse<cd>(text, [](const json& item) {
    return cd(item.at("re").get<double>(), item.value("im", 0.0));
  });
}

MatrixSeries matrix_series_from_json(const std::string& text) {
  return parse<CMat2>(text, [](const json& item) {
    auto re = item.at("re").get<std::vector<double>>();
    std::vector<double> im = item.contains("im") ? item.at("im").get<std::vector<double>>()
                                                 : std::vector<double>(4, 0.0);
    if (re.size() != 4 || im.size() != 4)
      throw std::invalid_argument("series JSON: matrix coefficient needs 4 entries");
    CMat2 m;
    for (int i = 0; i < 4; ++i) m.v[i] = cd(re[i], im[i]);
    return m;
  });
}

}  // namespace qps
