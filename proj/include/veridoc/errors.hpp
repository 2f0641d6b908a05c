#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace veridoc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (even kernel size, zero dimension, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input has no usable signal, e.g. a zero-variance image fed to a correlation.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ManifestError : public Error {
public:
    using Error::Error;
};

class DuplicateIdError : public ManifestError {
public:
    explicit DuplicateIdError(std::string id)
        : ManifestError("duplicate template id \"" + id + "\""), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class MissingFileError : public ManifestError {
public:
    explicit MissingFileError(std::string path)
        : ManifestError("cannot resolve file \"" + path + "\""), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class RegionOutOfBoundsError : public ManifestError {
public:
    RegionOutOfBoundsError(const std::string& template_id, const std::string& field)
        : ManifestError("text region \"" + field + "\" of template \"" + template_id +
                        "\" lies outside the template image") {}
};

class IdCollisionError : public ManifestError {
public:
    explicit IdCollisionError(const std::string& id)
        : ManifestError("template id \"" + id + "\" already exists") {}
};

}  // namespace veridoc
