#pragma once

#include <stdexcept>
#include <string>

namespace uplan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad base, digit outside the map, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configured bound (digit supply, automaton size, lattice size) would be exceeded.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// A state handed to a transition function is not part of the free space.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Obstacles touch or overlap each other or the boundary, so no clearance exists.
class DegenerateEnvironment : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  enum class Kind {
    kEmpty,
    kBadCharacter,
    kNonRectangular,
    kNoStart,
    kMultipleStarts,
    kNoGoal,
    kDisconnected,
    kBadValue,
    kUnknownKey,
    kMissingKey,
  };

  ParseError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace uplan
