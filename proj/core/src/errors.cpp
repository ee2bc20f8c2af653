#include "rgg/errors.hpp"

namespace rgg {

NumericalFailure::NumericalFailure(const std::string& what, double achieved_tolerance)
    : std::runtime_error(what), achieved_tolerance_(achieved_tolerance) {}

}  // namespace rgg
