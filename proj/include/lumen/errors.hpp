#pragma once

#include <stdexcept>
#include <string>

namespace lumen {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class EvenKernelError : public Error {
public:
    using Error::Error;
};

class BadSigmaError : public Error {
public:
    using Error::Error;
};

class EmptyHistogramError : public Error {
public:
    using Error::Error;
};

class OutOfBoundsError : public Error {
public:
    using Error::Error;
};

class KeypointOutOfBoundsError : public Error {
public:
    using Error::Error;
};

class PatchOutOfBoundsError : public Error {
public:
    using Error::Error;
};

class EmptySetError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class MissingDirectoryError : public IoError {
public:
    using IoError::IoError;
};

class MissingIndexError : public IoError {
public:
    using IoError::IoError;
};

class MalformedIndexError : public IoError {
public:
    using IoError::IoError;
};

class UnreadableImageError : public IoError {
public:
    using IoError::IoError;
};

class TooFewFramesError : public Error {
public:
    using Error::Error;
};

}  // namespace lumen
