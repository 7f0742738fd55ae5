#pragma once

#include <stdexcept>
#include <string>

namespace bemalg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (negative sizes, unknown kinds, bad indices).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds a documented implementation cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Mesh file could not be parsed or violates the supported subset.
class MeshFormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedElementError : public MeshFormatError {
 public:
  using MeshFormatError::MeshFormatError;
};

/// Mesh is not a closed, consistently oriented 2-manifold.
class ManifoldError : public Error {
 public:
  using Error::Error;
};

/// Space kind not supported by the requested operation.
class UnsupportedSpaceError : public Error {
 public:
  using Error::Error;
};

/// Spaces of two operands do not fit together (products, sums, grids).
class SpaceMismatchError : public Error {
 public:
  using Error::Error;
};

/// Coefficients cannot be recovered from projections (rectangular pairing).
class ConversionUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Matrix factorization failed: singular, or not positive definite.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point lies too close to the boundary surface.
class ProximityError : public Error {
 public:
  using Error::Error;
};

/// Blocked operator violates a structural rule.
class BlockStructureError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values where a finite matrix is required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bemalg
