#pragma once

#include <stdexcept>
#include <string>

namespace stmod {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

#define STMOD_ERROR_TYPE(Name)                          \
  struct Name : Error {                                 \
    explicit Name(const std::string& m) : Error(m) {}   \
  }

STMOD_ERROR_TYPE(RingMismatch);
STMOD_ERROR_TYPE(InvalidPresentation);
STMOD_ERROR_TYPE(CompositionNonzero);
STMOD_ERROR_TYPE(NotInjective);
STMOD_ERROR_TYPE(NotSurjective);
STMOD_ERROR_TYPE(NotChainMap);
STMOD_ERROR_TYPE(BadWindow);
STMOD_ERROR_TYPE(OutsideTrustedWindow);
STMOD_ERROR_TYPE(NotConnective);
STMOD_ERROR_TYPE(NotFree);
STMOD_ERROR_TYPE(TooLarge);
STMOD_ERROR_TYPE(CategoryMismatch);
STMOD_ERROR_TYPE(CdTooLarge);
STMOD_ERROR_TYPE(NotDirectReedy);
STMOD_ERROR_TYPE(NotReedyCofibrant);
STMOD_ERROR_TYPE(NoLift);
STMOD_ERROR_TYPE(RewriteDiverged);
STMOD_ERROR_TYPE(BadInput);

#undef STMOD_ERROR_TYPE

}  // namespace stmod
