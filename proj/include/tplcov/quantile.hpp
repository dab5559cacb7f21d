#pragma once

namespace tplcov {

// Standard normal quantile, Wichura's AS 241 (PPND16), relative accuracy
// about 1e-16 on (0, 1). Throws std::invalid_argument outside (0, 1).
double normal_quantile(double prob);

// (1 - alpha)-quantile of the chi-square distribution with one degree of
// freedom, computed as Phi^{-1}(1 - alpha/2)^2. Throws
// std::invalid_argument unless 0 < alpha < 1.
double chisq1_quantile(double alpha);

}  // namespace tplcov
