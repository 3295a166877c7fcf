#pragma once

#include <stdexcept>
#include <string>

namespace fewsub {

/// Base for every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad arities, out-of-range elements, unknown names, bad files.
class malformed_input : public error {
public:
    using error::error;
};

/// A caller violated an operation's documented precondition.
class precondition_error : public error {
public:
    using error::error;
};

/// A configured size or search cap was exceeded.
class resource_limit : public error {
public:
    using error::error;
};

/// An internal invariant failed. Always a bug or a refuted assumption.
class internal_error : public error {
public:
    using error::error;
};

/// Raised where a one-element algebra has no meaningful answer.
class degenerate_algebra : public precondition_error {
public:
    using precondition_error::precondition_error;
};

/// The template lacks the polymorphism the algorithm depends on.
class not_applicable : public precondition_error {
public:
    using precondition_error::precondition_error;
};

}  // namespace fewsub
