#ifndef PSIDO_ERRORS_HPP
#define PSIDO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace psido {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OrderExceeded : public Error {
 public:
  using Error::Error;
};

class InvalidSupport : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class SizeCapExceeded : public Error {
 public:
  using Error::Error;
};

class SupportEscapesTorus : public Error {
 public:
  using Error::Error;
};

class QuadratureNonConvergence : public Error {
 public:
  using Error::Error;
};

class SvdFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace psido

#endif  // PSIDO_ERRORS_HPP
