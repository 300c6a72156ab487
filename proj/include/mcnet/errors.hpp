#pragma once

#include <stdexcept>
#include <string>

namespace mcnet {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define MCNET_ERROR_TYPE(NAME)                                                 \
  class NAME : public Error {                                                  \
  public:                                                                      \
    using Error::Error;                                                        \
  }

// qnum
MCNET_ERROR_TYPE(OverlappingIds);
MCNET_ERROR_TYPE(UnknownQubit);
MCNET_ERROR_TYPE(ShapeMismatch);
MCNET_ERROR_TYPE(NotHermitian);

// calculus
MCNET_ERROR_TYPE(UnboundName);
MCNET_ERROR_TYPE(InvalidPattern);
MCNET_ERROR_TYPE(IncompleteSignals);

// netmodel
MCNET_ERROR_TYPE(NameMismatch);
MCNET_ERROR_TYPE(SortMismatch);
MCNET_ERROR_TYPE(AgentSetMismatch);
MCNET_ERROR_TYPE(NameCollision);

// semantics
MCNET_ERROR_TYPE(NotEnabled);
MCNET_ERROR_TYPE(Deadlock);
MCNET_ERROR_TYPE(ValidationFailed);
MCNET_ERROR_TYPE(InputMismatch);

// protocol library
MCNET_ERROR_TYPE(UnknownProtocol);

#undef MCNET_ERROR_TYPE

}  // namespace mcnet
