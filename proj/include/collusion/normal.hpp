#pragma once

namespace collusion {

double normal_pdf(double x);
double normal_cdf(double x);
// Upper tail 1 - Phi(x), accurate for large x.
double normal_sf(double x);
// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

}  // namespace collusion
