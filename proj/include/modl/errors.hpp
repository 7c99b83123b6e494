#pragma once
// Exception taxonomy. Three roots matter for the CLI exit-code mapping:
//   SchemaError -> bad input data / IO (exit 1)
//   MathError   -> a documented mathematical precondition failed (exit 2)
//   InternalCheckError -> a "cannot happen" verification tripped; report as a bug (exit 1)
#include <stdexcept>
#include <string>

namespace modl {

struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct SchemaError : Error {
  explicit SchemaError(const std::string& m) : Error("schema: " + m) {}
};

struct MathError : Error {
  explicit MathError(const std::string& m) : Error(m) {}
};

struct InternalCheckError : Error {
  explicit InternalCheckError(const std::string& m) : Error("internal check failed: " + m) {}
};

#define MODL_MATH_ERROR(NAME)                                    \
  struct NAME : MathError {                                      \
    explicit NAME(const std::string& m) : MathError(#NAME ": " + m) {} \
  }

// number rings / residue maps
MODL_MATH_ERROR(NotMonic);
MODL_MATH_ERROR(RationalRootFound);
MODL_MATH_ERROR(NotSquareFreeModEll);
MODL_MATH_ERROR(DenominatorNotCoprime);
MODL_MATH_ERROR(RingMismatch);
MODL_MATH_ERROR(NotInvertible);

// q-expansions
MODL_MATH_ERROR(PrecisionTooLow);
MODL_MATH_ERROR(WeightMismatch);
MODL_MATH_ERROR(CharacterMismatch);
MODL_MATH_ERROR(ParityMismatch);
MODL_MATH_ERROR(FactorDegreeTooHigh);

// sieve
MODL_MATH_ERROR(SingularSystem);
MODL_MATH_ERROR(ResidualNonzero);
MODL_MATH_ERROR(PrecisionExhausted);
MODL_MATH_ERROR(ConstantModEll);
MODL_MATH_ERROR(ScriptLVanishes);
MODL_MATH_ERROR(NotLIntegral);

// counting
MODL_MATH_ERROR(InsufficientData);
MODL_MATH_ERROR(Inconclusive);

// Siegel
MODL_MATH_ERROR(NotHalfIntegral);
MODL_MATH_ERROR(NotSymmetric);
MODL_MATH_ERROR(ZeroMatrix);
MODL_MATH_ERROR(NotPositiveDefinite);
MODL_MATH_ERROR(AllCoefficientsVanish);
MODL_MATH_ERROR(KeyMissing);
MODL_MATH_ERROR(SupportTooSmall);
MODL_MATH_ERROR(IndexNotInSupport);
MODL_MATH_ERROR(IndexMismatch);
MODL_MATH_ERROR(InvarianceViolation);

#undef MODL_MATH_ERROR

// data validation findings (ingest): schema-level, carry their own prefix
struct MultiplicativityViolation : SchemaError {
  explicit MultiplicativityViolation(const std::string& m)
      : SchemaError("MultiplicativityViolation: " + m) {}
};
struct DuplicateEigensystem : SchemaError {
  explicit DuplicateEigensystem(const std::string& m)
      : SchemaError("DuplicateEigensystem: " + m) {}
};

// counters: support window ends before the requested x
struct SupportInsufficientFor : MathError {
  long long max_usable;
  SupportInsufficientFor(const std::string& m, long long usable)
      : MathError("SupportInsufficientFor: " + m), max_usable(usable) {}
};

// relation verification mismatch: always a bug trap, never an expected outcome
struct VerificationFailed : InternalCheckError {
  explicit VerificationFailed(const std::string& m) : InternalCheckError(m) {}
};

}  // namespace modl
