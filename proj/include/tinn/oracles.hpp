#pragma once

#include "tinn/common.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tinn {

// Reference solution sampled on a tensor grid; values are t-major.
struct SolutionGrid {
    std::string problem;
    std::vector<double> x_grid, t_grid;
    std::vector<double> values;

    double at(std::size_t it, std::size_t ix) const { return values[it * x_grid.size() + ix]; }
};

// Cole-Hopf quadrature solution of viscous Burgers with u(x,0) = -sin(pi x),
// nu = 0.01/pi. Gauss-Hermite after the substitution eta = 2 sqrt(nu t) s.
double burgers_reference(double x, double t, int nodes = 128);

// Gauss-Hermite rule for weight e^{-s^2} (Golub-Welsch).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Fourier pseudo-spectral ETDRK4 integration of Allen-Cahn or KdV on [-1,1)
// with 2/3-rule dealiasing. `modes` is the retained-mode count; the
// collocation grid has 3*modes points. Output is trigonometric interpolation
// onto (x_out, t_out).
SolutionGrid spectral_reference(const std::string& problem, int modes, double dt,
                                const std::vector<double>& x_out,
                                const std::vector<double>& t_out);

void save_grid(const SolutionGrid& grid, const std::string& path);
SolutionGrid load_grid(const std::string& path);
void dump_csv(const SolutionGrid& grid, std::ostream& os);

}  // namespace tinn
