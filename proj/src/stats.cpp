#include "tentlab/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace tentlab::stats {

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

double chi_square_sf(double x, unsigned dof) {
  if (dof == 0) throw std::invalid_argument("chi_square_sf: dof must be >= 1");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace tentlab::stats
