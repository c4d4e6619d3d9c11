#ifndef ANCHORREFINE_CORE_ERRORS_H_
#define ANCHORREFINE_CORE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace anchorrefine {

// A precondition of an operation was not met by the caller.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Invalid or inconsistent configuration (unknown variant, schema mismatch,
// unsolvable task, hash mismatch).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Training produced a non-finite loss or an invariant broke mid-run.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

namespace internal {
[[noreturn]] inline void Violation(const std::string& what) {
  throw ContractViolation(what);
}
}  // namespace internal

#define AR_EXPECT(cond, msg)                                         \
  do {                                                               \
    if (!(cond)) ::anchorrefine::internal::Violation(                \
        std::string(__func__) + ": " + (msg));                       \
  } while (false)

}  // namespace anchorrefine

#endif  // ANCHORREFINE_CORE_ERRORS_H_
