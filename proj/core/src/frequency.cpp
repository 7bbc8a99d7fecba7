#include "qpspec/frequency.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace qps {

int sup_norm(const Index& n) {
  int m = 0;
  for (int v : n) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Index> index_ball(int dim, int R) {
  std::vector<Index> out;
  if (dim <= 0 || R < 0) return out;
  for (int shell = 0; shell <= R; ++shell) {
    Index n(dim, -shell);
    while (true) {
      if (sup_norm(n) == shell) out.push_back(n);
      int i = dim - 1;
      while (i >= 0 && n[i] == shell) {
        n[i] = -shell;
        --i;
      }
      if (i < 0) break;
      ++n[i];
    }
  }
  return out;
}

double dist_to_Z(double x) { return std::abs(x - std::nearbyint(x)); }

double mod1(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

double Frequency::dot(const Index& n) const {
  double s = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) s += n[i] * alpha[i];
  return s;
}

std::string DiophantineReport::message() const {
  if (accepted) return "frequency accepted";
  std::ostringstream os;
  os.precision(17);
  os << "frequency rejected at n=(";
  for (std::size_t i = 0; i < violating_n.size(); ++i)
    os << (i ? "," : "") << violating_n[i];
  os << "): dist(<n,alpha>,Z)=" << defect << " < " << required;
  return os.str();
}

namespace {

bool canonical(const Index& n) {
  for (int v : n) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;
}

}  // namespace

DiophantineReport diophantine_check(const std::vector<double>& alpha, double gamma,
                                    double tau, int M) {
  int d = static_cast<int>(alpha.size());
  if (d < 1) throw std::invalid_argument("diophantine_check: empty alpha");
  if (!(gamma > 0.0)) throw std::invalid_argument("diophantine_check: gamma must be > 0");
  if (!(tau > d)) throw std::invalid_argument("diophantine_check: tau must exceed dim");
  if (M < 1) throw std::invalid_argument("diophantine_check: cutoff must be >= 1");
  for (double a : alpha)
    if (!(a >= 0.0 && a < 1.0))
      throw std::invalid_argument("diophantine_check: alpha components must lie in [0,1)");

  Frequency f{alpha, gamma, tau, M};
  DiophantineReport rep;
  for (const Index& n : index_ball(d, M)) {
    if (!canonical(n)) continue;
    double dist = dist_to_Z(f.dot(n));
    double need = gamma / std::pow(static_cast<double>(sup_norm(n)), tau);
    if (dist < need || dist == 0.0) {
      rep.violating_n = n;
      rep.defect = dist;
      rep.required = need;
      return rep;
    }
  }
  rep.accepted = true;
  rep.frequency = f;
  return rep;
}

Frequency make_frequency(const std::vector<double>& alpha, double gamma, double tau,
                         int M) {
  auto rep = diophantine_check(alpha, gamma, tau, M);
  if (!rep.accepted) throw FrequencyRejected(rep);
  return *rep.frequency;
}

std::vector<std::vector<double>> phase_samples(int dim, int count) {
  static const double roots[] = {2, 3, 7, 11, 13, 17, 19, 23};
  if (dim > 8) throw std::invalid_argument("phase_samples: dim > 8 unsupported");
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < dim; ++i) {
      double w = std::sqrt(roots[i]);
      out[j][i] = mod1(j * (w - std::floor(w)));
    }
  return out;
}

Frequency golden_frequency(double gamma, double tau, int M) {
  return make_frequency({(std::sqrt(5.0) - 1.0) / 2.0}, gamma, tau, M);
}

}  // namespace qps
