#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stratwave {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

/// h_p <= 0 somewhere, i.e. u >= c: the flow stagnates.
class StagnationError : public Error {
public:
  StagnationError(const std::string& what, int i, int j, double hp)
      : Error(what), node_i(i), node_j(j), h_p(hp) {}
  int node_i;
  int node_j;
  double h_p;
};

class NoLaminarFlow : public Error {
public:
  NoLaminarFlow(const std::string& what, std::vector<double> slopes_tried,
                std::vector<double> top_residuals)
      : Error(what), slopes(std::move(slopes_tried)),
        residuals(std::move(top_residuals)) {}
  std::vector<double> slopes;     // bed slopes H'(p0) probed by the bracket scan
  std::vector<double> residuals;  // top-condition residual at each probed slope
};

class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, std::vector<double> history,
                  double amp = 0.0)
      : Error(what), residual_history(std::move(history)), amplitude(amp) {}
  std::vector<double> residual_history;
  double amplitude;
};

/// Principal eigenpair is complex or its eigenvector changes sign.
class PerronFailure : public Error {
public:
  using Error::Error;
};

class MisuseError : public Error {
public:
  using Error::Error;
};

}  // namespace stratwave
