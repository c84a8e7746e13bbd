#include "sparsetf/params.hpp"

#include <cmath>

#include "sparsetf/error.hpp"

namespace sparsetf {

void DictionaryParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidInput("epsilon must lie in (0, 1)");
    if (!(d > 1.0)) throw InvalidInput("frequency ratio d must exceed 1");
    if (!(m_prime >= 1.0)) throw InvalidInput("m_prime must be at least 1");
    if (!(epsilon0 > 0.0)) throw InvalidInput("epsilon0 must be positive");
}

double max_admissible_delta(double d) {
    if (!(d > 1.0)) throw InvalidInput("frequency ratio d must exceed 1");
    const double s = std::sqrt(d);
    return (s - 1.0) / (s + 1.0);
}

}  // namespace sparsetf
