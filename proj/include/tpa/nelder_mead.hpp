#pragma once

#include <functional>
#include <vector>

namespace tpa {

struct NelderMeadOptions {
    double diameter_tol = 1e-4; // converged when every vertex is this close to the best one
    int max_evals = 1000;
    std::vector<double> initial_step; // per coordinate; defaults to 0.5
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
    double diameter = 0.0;
};

NelderMeadResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& x0, const NelderMeadOptions& opt);

} // namespace tpa
