#pragma once

#include <stdexcept>
#include <string>

namespace zqg {

/** Evaluation requested within the guard radius of a band degeneracy. */
struct NodeProximityError : std::runtime_error {
  explicit NodeProximityError(const std::string& what) : std::runtime_error(what) {}
};

/** A user-supplied model callback failed or returned non-finite values. */
struct ModelEvaluationError : std::runtime_error {
  explicit ModelEvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/** Grid construction or grid-kind preconditions violated. */
struct GridError : std::runtime_error {
  explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

/** Contour is open, degenerate, or negatively oriented. */
struct ContourError : std::runtime_error {
  explicit ContourError(const std::string& what) : std::runtime_error(what) {}
};

/** Phase accumulation stepped too far between adjacent contour samples. */
struct UndersampledContourError : std::runtime_error {
  explicit UndersampledContourError(const std::string& what) : std::runtime_error(what) {}
};

/** A check that requires a planar d-vector met d_z != 0. */
struct PlanarityError : std::runtime_error {
  explicit PlanarityError(const std::string& what) : std::runtime_error(what) {}
};

/** Cutoff-doubling self-check moved the result by more than the declared tolerance. */
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double coarse, double refined)
      : std::runtime_error(what), value_coarse(coarse), value_refined(refined) {}
  double value_coarse;
  double value_refined;
};

/** Magnetic point-group label not present in the table. */
struct UnknownGroupError : std::runtime_error {
  explicit UnknownGroupError(const std::string& what) : std::runtime_error(what) {}
};

/** Malformed or inconsistent run configuration. */
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace zqg
