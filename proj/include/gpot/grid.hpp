#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpot/exec.hpp"

namespace gpot {

// Uniform centered lattice on [-L, L)^d with n (a power of two, >= 8) points
// per axis. Spatial points are x_j = (j - n/2) h with h = 2L/n; the dual
// lattice carries k_m = (m - n/2) pi/L. Index 0 of each axis is the most
// negative coordinate; storage is row-major with axis 0 slowest.
struct GridSpec {
    int dim = 0;
    int n = 0;
    double half_width = 0.0; // L

    static GridSpec make(int dim, int n, double half_width);

    double spacing() const { return 2.0 * half_width / n; }
    double cell_volume() const;
    double freq_step() const; // pi / L
    std::int64_t total() const;

    double coord(int axis_index) const { return (axis_index - n / 2) * spacing(); }
    double freq(int axis_index) const { return (axis_index - n / 2) * freq_step(); }

    void multi_index(std::int64_t flat, std::span<int> idx) const;
    std::int64_t flat_index(std::span<const int> idx) const;
    void point(std::int64_t flat, std::span<double> x) const;

    // Nearest lattice index for a point; throws if outside the box.
    std::int64_t index_of_point(std::span<const double> x) const;

    std::int64_t zero_flat() const; // flat index of the origin (j = n/2 on each axis)

    bool operator==(const GridSpec&) const = default;
};

struct RealField {
    GridSpec grid;
    std::vector<double> values;
    std::string unit; // advisory tag, e.g. "1/length^d"

    double& operator[](std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](std::int64_t i) const { return values[static_cast<std::size_t>(i)]; }
};

struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> values;

    std::complex<double>& operator[](std::int64_t i) { return values[static_cast<std::size_t>(i)]; }
    const std::complex<double>& operator[](std::int64_t i) const {
        return values[static_cast<std::size_t>(i)];
    }
};

RealField make_field(const GridSpec& grid, double fill = 0.0);

RealField sample_on_grid(const std::function<double(std::span<const double>)>& f,
                         const GridSpec& grid, Exec exec = Exec::Parallel);

// Point sampling except within refine_radius of the origin, where each cell
// takes its Gauss-Legendre average instead. Sharp peaks (power-law kernels on
// coarse grids) otherwise overweight the midpoint and push the sampled mass
// past 1.
RealField sample_on_grid_cell_averaged(const std::function<double(std::span<const double>)>& f,
                                       const GridSpec& grid, double refine_radius,
                                       Exec exec = Exec::Parallel);

double field_sum(const RealField& f, Exec exec = Exec::Parallel);
double field_mass(const RealField& f, Exec exec = Exec::Parallel); // sum * h^d
double field_max_abs(const RealField& f, Exec exec = Exec::Parallel);

// Largest |value| over lattice points with any axis index in {0} (the most
// negative face); used as the wrap-around guard for periodic convolution.
double boundary_max_abs(const RealField& f);

// CSV with header "x1,...,xd,<value_name>", one lattice point per row.
void write_csv(const RealField& f, std::ostream& os, const std::string& value_name = "value");

} // namespace gpot
