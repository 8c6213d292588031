#pragma once

namespace tentlab::stats {

/// Two-sided tail probability of a standard normal: P(|Z| >= |z|).
double normal_two_sided_p(double z);

/// Chi-square survival function P(X >= x) with dof degrees of freedom.
double chi_square_sf(double x, unsigned dof);

}  // namespace tentlab::stats
