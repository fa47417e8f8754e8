#include "pmr/errors.hpp"

namespace pmr {

InvalidParameter::InvalidParameter(std::string parameter, const std::string& detail)
    : std::invalid_argument(parameter + ": " + detail), parameter_(std::move(parameter)) {}

DissociationError::DissociationError(HalfInteger m, double mbar, const std::string& detail)
    : DomainError("dissociation at M=" + m.to_string() + " (Mbar=" + std::to_string(mbar) +
                  "): " + detail),
      m_(m),
      mbar_(mbar) {}

}  // namespace pmr
