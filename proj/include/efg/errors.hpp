#pragma once

#include <stdexcept>
#include <string>

namespace efg {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A construction/game parameter is out of its allowed range (e.g. m < s*k).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed textual input (JSON tree file, formula surface syntax, transcript).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Parsed data violates a structural invariant (cycle, dangling parent, ...).
class StructureError : public Error {
public:
    using Error::Error;
};

class NotIsomorphicError : public Error {
public:
    using Error::Error;
};

class UnboundVariableError : public Error {
public:
    using Error::Error;
};

class IllegalMoveError : public Error {
public:
    using Error::Error;
};

class GameOverError : public Error {
public:
    using Error::Error;
};

/// Instance exceeds the exact solver's configured budgets.
class BudgetExceededError : public Error {
public:
    using Error::Error;
};

/// A sweep would enumerate more lines than its limit allows.
class LimitExceededError : public Error {
public:
    using Error::Error;
};

/// An adapted strategy's inner virtual game went out of sync; the wrapped
/// strategy was not actually a winning strategy for its claimed game.
class DesyncError : public Error {
public:
    using Error::Error;
};

/// The recursive strategy was driven into a position none of its cases cover.
class StrategyViolatedError : public Error {
public:
    using Error::Error;
};

} // namespace efg
