#pragma once

// Internal closed forms for the truncation bookkeeping: expected number of
// starters of a measure term in [x0, x1] (bounds may be infinite) whose
// position x + N(mu, sd^2) lands in [bl, bu].

#include "gsys/measures.hpp"

namespace gsys::detail {

double hit_mass_exp(const ExpTerm& t, double x0, double x1, double mu, double sd, double bl, double bu);
double hit_mass_gauss(const GaussianMeasure1D& g, double x0, double x1, double mu, double sd, double bl, double bu);
double hit_mass(const MeasureSpec& m, double x0, double x1, double mu, double sd, double bl, double bu);

}  // namespace gsys::detail
