#pragma once

#include <stdexcept>
#include <string>

namespace optidesign {

/// Base of every domain error raised by the library. The CLI maps these to
/// exit code 1 and prints what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define OPTIDESIGN_DEFINE_ERROR(Name)          \
  class Name : public Error {                  \
   public:                                     \
    explicit Name(const std::string& what)     \
        : Error(#Name ": " + what) {}          \
  }

OPTIDESIGN_DEFINE_ERROR(NotPositiveDefinite);
OPTIDESIGN_DEFINE_ERROR(NotSymmetric);
OPTIDESIGN_DEFINE_ERROR(DimensionMismatch);
OPTIDESIGN_DEFINE_ERROR(UnknownExperimentId);
OPTIDESIGN_DEFINE_ERROR(MissingObservation);
OPTIDESIGN_DEFINE_ERROR(PoolExhausted);
OPTIDESIGN_DEFINE_ERROR(RankDeficientTarget);
OPTIDESIGN_DEFINE_ERROR(InvalidAlpha);
OPTIDESIGN_DEFINE_ERROR(DegenerateFactor);
OPTIDESIGN_DEFINE_ERROR(TooLarge);
OPTIDESIGN_DEFINE_ERROR(AllDegenerate);
OPTIDESIGN_DEFINE_ERROR(ParseError);
OPTIDESIGN_DEFINE_ERROR(EmptyTraining);
OPTIDESIGN_DEFINE_ERROR(InvalidArgument);
// A mathematically guaranteed property was violated beyond round-off.
OPTIDESIGN_DEFINE_ERROR(InternalConsistency);

#undef OPTIDESIGN_DEFINE_ERROR

}  // namespace optidesign
