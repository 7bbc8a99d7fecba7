#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpspec/spectrum.hpp"

namespace qps {

struct GapRecord {
  Index m;                 ///< empty until labelled
  double E_minus = 0.0;
  double E_plus = 0.0;
  double length = 0.0;
  double N_plateau = 0.0;
  double label_defect = 0.0;
  bool collapsed = false;  ///< set when refinement closes the gap
};

struct GapDetection {
  std::vector<GapRecord> gaps;  ///< bounded components, ascending in energy
  double E_min = 0.0;           ///< min of the scanned spectrum
  double E_max = 0.0;           ///< max of the scanned spectrum
};

/// Bounded complement intervals of length >= min_length, with the IDS at the
/// midpoint as plateau value.
GapDetection detect_gaps(const std::vector<Interval>& scan, const IdsCurve& curve,
                         double min_length);
/// Same, with the plateau read exactly off the eigenvalue sample.
GapDetection detect_gaps(const std::vector<Interval>& scan, const SpectralSample& s,
                         double min_length);

struct LabelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoLabelError : LabelError {
  using LabelError::LabelError;
};
struct AmbiguousLabelError : LabelError {
  using LabelError::LabelError;
};

/// The unique m with |m| <= M_max and dist(N - <m,alpha>, Z) <= tol.
Index label_gap(double N_plateau, const Frequency& freq, int M_max, double tol);

/// Labels every record in place; throws if two records get the same label.
void label_gaps(std::vector<GapRecord>& gaps, const Frequency& freq, int M_max, double tol);

struct DecayItem {
  Index m;
  double bound = 0.0;   ///< eps^{1/4} |m|^{-k/9}
  double length = 0.0;
  bool pass = false;    ///< strict: length < bound
};

struct DecayReport {
  std::vector<DecayItem> items;
  double slope = std::numeric_limits<double>::quiet_NaN();  ///< log length vs log |m|
  bool all_pass = true;
};

DecayReport decay_profile(const std::vector<GapRecord>& gaps, double eps, int k);

/// Bisection of both edges towards the interior on the predicate "every
/// phase has at most two eigenvalues between E and the gap midpoint".
/// Unbounded sides (infinite edge) are left alone. Refined edges stay inside
/// the input edges.
GapRecord refine_gap_edges(const ScalarSeries& V, const Frequency& freq, const GapRecord& gap,
                           int L, double edge_tol, int phases = 8);

struct HomogeneityProfile {
  std::vector<double> eps;
  std::vector<double> mu;
  std::vector<double> argmin_E;

  double min_mu() const;
};

/// Measure of the union of sorted disjoint intervals inside (a, b).
double measure_in(const std::vector<Interval>& sigma, double a, double b);

HomogeneityProfile homogeneity_profile(const std::vector<Interval>& scan,
                                       const std::vector<double>& eps_grid, int E_samples);

struct HolderReport {
  double C0_hat = 0.0;
  double E_arg = 0.0;
  double eps_arg = 0.0;
  std::vector<double> eps;
  std::vector<double> max_ratio;  ///< per eps
  double ratio_slope = 0.0;       ///< d log(max_ratio) / d log(eps)
  bool violation = false;         ///< ratio grows like a negative power of eps
};

HolderReport holder_modulus(const IdsCurve& curve, const std::vector<double>& eps_grid);

struct SeparationViolation {
  std::string kind;  ///< "pair" or "edge"
  int i = -1;
  int j = -1;        ///< -1 for edge checks
  double distance = 0.0;
  double bound = 0.0;
};

struct SeparationReport {
  int checks = 0;
  std::vector<SeparationViolation> violations;
  bool pass() const { return violations.empty(); }
};

SeparationReport gap_separation_check(const std::vector<GapRecord>& gaps, double E_min,
                                      double E_max, const Frequency& freq, double C0_hat);

}  // namespace qps
