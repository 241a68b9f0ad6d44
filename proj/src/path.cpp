#include "wigner1d/path.hpp"

namespace wigner1d {

DiscretePath DiscretePath::reflected() const {
  DiscretePath out = *this;
  for (double& x : out.slices) x = -x;
  return out;
}

DiscretePath DiscretePath::shifted(double offset) const {
  DiscretePath out = *this;
  for (double& x : out.slices) x += offset;
  return out;
}

}  // namespace wigner1d
