#ifndef POLYDYN_ERROR_HPP
#define POLYDYN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace polydyn {

/// Base class for every computational failure raised by the library.
///
/// `name()` is the short machine-readable error kind (e.g. "NonConvergence");
/// the CLI prints it on stderr and maps it to exit code 1.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define POLYDYN_DEFINE_ERROR(Type)                                          \
    class Type : public Error {                                             \
    public:                                                                 \
        explicit Type(const std::string& what) : Error(#Type, what) {}      \
    }

// polynomial
POLYDYN_DEFINE_ERROR(NonConvergence);
// escape
POLYDYN_DEFINE_ERROR(WitnessFailed);
// components
POLYDYN_DEFINE_ERROR(SeedEscapes);
POLYDYN_DEFINE_ERROR(ResolutionTooCoarse);
POLYDYN_DEFINE_ERROR(NotFound);
// pressure
POLYDYN_DEFINE_ERROR(RootFailure);
POLYDYN_DEFINE_ERROR(NearCriticalValue);
POLYDYN_DEFINE_ERROR(PostCriticalBase);
POLYDYN_DEFINE_ERROR(NoBracket);
POLYDYN_DEFINE_ERROR(EmptyTree);
POLYDYN_DEFINE_ERROR(LeafBudgetExceeded);
// chebyshev_lift
POLYDYN_DEFINE_ERROR(ZeroInput);
POLYDYN_DEFINE_ERROR(NotDegreeTwo);
POLYDYN_DEFINE_ERROR(RamificationHit);
// lowerbound
POLYDYN_DEFINE_ERROR(EmptyBranch);
// cubic_family
POLYDYN_DEFINE_ERROR(NewtonDiverged);
POLYDYN_DEFINE_ERROR(NotRepelling);
POLYDYN_DEFINE_ERROR(NoRealRoot);

#undef POLYDYN_DEFINE_ERROR

/// Raised by detect_poly_like when another component of f^{-1}(U_m) still
/// meets U_m; the caller retries with a larger level.
class NotYetPolyLike : public Error {
public:
    NotYetPolyLike(int level, const std::string& what)
        : Error("NotYetPolyLike", "m=" + std::to_string(level) + ": " + what), level_(level) {}

    int level() const noexcept { return level_; }

private:
    int level_;
};

} // namespace polydyn

#endif // POLYDYN_ERROR_HPP
