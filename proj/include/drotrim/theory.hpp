// Closed-form theory quantities: the finite-sample concentration bound and
// its inverse radius formula, the empirical event-probability estimate of
// alpha, and the budget rules that embed KNN and Nadaraya-Watson estimators
// into the trimmed ambiguity set.
#pragma once

#include "drotrim/sample.hpp"

namespace drotrim {

struct UnsupportedCase : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constants of the light-tail concentration bound. The paper-level result
// only asserts existence of c, C; the defaults c = C = 1 are artifact
// conventions ("theoretical mode") — benchmark paths tune robustness from
// data instead of using these.
struct ConcentrationConstants {
  double c = 1.0;
  double C = 1.0;
  double a = 2.0;  // light-tail exponent, must exceed p
  double p = 1.0;  // transport order
  int d = 2;       // joint dimension

  void validate() const {
    if (c <= 0.0 || C <= 0.0 || a <= p || p < 1.0 || d < 1)
      throw UnsupportedCase("invalid concentration constants");
  }
};

// Probability bound beta_{p,eps,alpha}(N): the (p vs d/2) case split on the
// moderate-deviation term, indicator-gated at eps = alpha^{-1/p}, plus the
// light-tail term C exp(-c N alpha^{a/p} eps^a) beyond it.
double beta_bound(const ConcentrationConstants& consts, double epsilon,
                  double alpha, int N);

// Radius eps_{N,p,alpha}(beta) inverting the bound: three branches selected
// by the sample-size threshold N >= log(C/beta)/c and the (p, d) relation;
// scales as alpha^{-1/p}. Refuses p = d/2 (no closed form).
double radius(const ConcentrationConstants& consts, double beta, double alpha,
              int N);

// Fraction of sample points inside the event (the empirical estimate of the
// conditioning probability, used when alpha is unknown).
double alpha_hat_empirical(const EmpiricalSample& sample,
                           const ConditioningEvent& event);

// DR-KNN rule: alpha = K/N and rho = (min budget at K/N)^p + delta_rho;
// delta_rho = 0 collapses the ambiguity set to the projected-KNN measure.
TrimmedAmbiguitySpec drknn_budget(const EmpiricalSample& sample,
                                  const ConditioningEvent& event, int K,
                                  double delta_rho, double p = 1.0);

// DR-NW rule with a box kernel of cutoff r: weights w_i uniform over points
// with dist(xi_i, event) <= r * bandwidth; alpha = 1/(N w_max) and
// rho = sum w_i dist_i^p + delta_rho (>= the feasibility minimum).
TrimmedAmbiguitySpec drnw_budget(const EmpiricalSample& sample,
                                 const ConditioningEvent& event,
                                 double bandwidth, double cutoff,
                                 double delta_rho, double p = 1.0);

}  // namespace drotrim
