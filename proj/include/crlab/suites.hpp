#pragma once

// Seeded certificate suites. Each claim runs its own trials and folds them
// into one Certificate carrying the trial count and the seed.

#include "crlab/certificate.hpp"
#include "crlab/scalar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crlab::suites {

struct SuiteOptions {
  std::uint64_t seed = 1;
  bool quick = false;             // trial counts divided by 10
  std::optional<Rational> A;      // overrides each claim's canonical constant
  std::optional<int> n;           // restricts the dimension set
};

const std::vector<std::string>& suite_names();

/// dim2 | sigma2 | sigman | all. Throws std::invalid_argument for anything else.
std::vector<Certificate> run_suite(std::string_view suite, const SuiteOptions& opts);

// Individual claims.
Certificate dim2_B_nonpositive(const SuiteOptions& opts);
Certificate dim2_B_best_constant(const SuiteOptions& opts, const std::vector<Rational>& above);
Certificate dim2_gradient_identity(const SuiteOptions& opts);
Certificate dim2_equal_eigenvalues(const SuiteOptions& opts);
Certificate dim2_inequality(const SuiteOptions& opts);
Certificate dim2_inequality_sharpness(const SuiteOptions& opts);

Certificate sigma2_sos(const SuiteOptions& opts);
Certificate sigma2_coefficient_expansions(const SuiteOptions& opts);
Certificate sigma2_best_constant(const SuiteOptions& opts);

Certificate euler_identity(const SuiteOptions& opts);
Certificate sigman_minor_formula(const SuiteOptions& opts);
Certificate sigman_a1_threshold(const SuiteOptions& opts, int n);
Certificate sigman_a1_threshold_grid(const SuiteOptions& opts);
Certificate sigman_a_expansion(const SuiteOptions& opts);
Certificate sigman_a2_identity(const SuiteOptions& opts);
Certificate sigman_a2_n3_definite(const SuiteOptions& opts);
Certificate sigman_a3_sign(const SuiteOptions& opts);
Certificate sigman_combined(const SuiteOptions& opts, int n);

/// Dimensions a sigma_n claim runs over: {opts.n} or {3, 4, 5, 6}.
std::vector<int> sigman_dimensions(const SuiteOptions& opts);

}  // namespace crlab::suites
