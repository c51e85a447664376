#ifndef SPECLAB_ERRORS_HPP
#define SPECLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace speclab {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularGenerator : Error {
    explicit SingularGenerator(const std::string& msg) : Error(msg) {}
};

struct NotAFrame : Error {
    explicit NotAFrame(const std::string& msg) : Error(msg) {}
};

struct NonPositiveOmega : Error {
    explicit NonPositiveOmega(const std::string& msg) : Error(msg) {}
};

struct MaskNotSubset : Error {
    explicit MaskNotSubset(const std::string& msg) : Error(msg) {}
};

struct BadDivisor : Error {
    explicit BadDivisor(const std::string& msg) : Error(msg) {}
};

struct NotOrthonormal : Error {
    explicit NotOrthonormal(const std::string& msg) : Error(msg) {}
};

struct WeightsNotNormalized : Error {
    explicit WeightsNotNormalized(const std::string& msg) : Error(msg) {}
};

struct NotHermitian : Error {
    explicit NotHermitian(const std::string& msg) : Error(msg) {}
};

struct NoConvergence : Error {
    explicit NoConvergence(const std::string& msg) : Error(msg) {}
};

struct DeltaOutOfRange : Error {
    explicit DeltaOutOfRange(const std::string& msg) : Error(msg) {}
};

struct POutOfRange : Error {
    explicit POutOfRange(const std::string& msg) : Error(msg) {}
};

struct NonPositiveInput : Error {
    explicit NonPositiveInput(const std::string& msg) : Error(msg) {}
};

struct AllInfinite : Error {
    explicit AllInfinite(const std::string& msg) : Error(msg) {}
};

struct EmptyInterval : Error {
    explicit EmptyInterval(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

} // namespace speclab

#endif
