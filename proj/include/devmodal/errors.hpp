#pragma once

#include <stdexcept>
#include <string>

namespace devmodal {

// Base for all library errors. Subclasses exist so callers can catch the
// condition they care about; the message always names the offending input.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

class SortError : public Error {
public:
  using Error::Error;
};

class UnboundVariableError : public Error {
public:
  using Error::Error;
};

class ModalInputError : public Error {
public:
  using Error::Error;
};

class BoundVariableError : public Error {
public:
  using Error::Error;
};

class ArityMismatchError : public Error {
public:
  using Error::Error;
};

class SignatureMismatchError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class FrameInvalidError : public Error {
public:
  using Error::Error;
};

class DynSortPresentError : public Error {
public:
  using Error::Error;
};

class PartialTupleError : public Error {
public:
  using Error::Error;
};

class NotALiteralError : public Error {
public:
  using Error::Error;
};

class NotStaticLanguageError : public Error {
public:
  using Error::Error;
};

class NotManifestingError : public Error {
public:
  using Error::Error;
};

class NotSigma2Error : public Error {
public:
  using Error::Error;
};

class ChainInvalidError : public Error {
public:
  using Error::Error;
};

class ParameterOutOfUniverseError : public Error {
public:
  using Error::Error;
};

class NotAnIdealError : public Error {
public:
  using Error::Error;
};

class NotWellFoundedError : public Error {
public:
  using Error::Error;
};

class BoundsTooLargeError : public Error {
public:
  using Error::Error;
};

class FrameMismatchError : public Error {
public:
  using Error::Error;
};

class NoModulusError : public Error {
public:
  using Error::Error;
};

class PrefixUnrealizableError : public Error {
public:
  PrefixUnrealizableError(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

private:
  std::size_t index_;
};

}  // namespace devmodal
