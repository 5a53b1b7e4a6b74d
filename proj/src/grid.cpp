#include "gpot/grid.hpp"

#include <cmath>
#include <ostream>

#include "gpot/errors.hpp"
#include "gpot/quadrature.hpp"

namespace gpot {

GridSpec GridSpec::make(int dim, int n, double half_width) {
    if (dim < 1 || dim > 6) throw Error(Errc::ValidationError, "grid dim must be in [1, 6]");
    if (n < 8 || (n & (n - 1)) != 0)
        throw Error(Errc::ValidationError, "grid n must be a power of two >= 8");
    if (!(half_width > 0.0)) throw Error(Errc::ValidationError, "grid L must be > 0");
    return GridSpec{dim, n, half_width};
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::freq_step() const { return M_PI / half_width; }

std::int64_t GridSpec::total() const {
    std::int64_t t = 1;
    for (int i = 0; i < dim; ++i) t *= n;
    return t;
}

void GridSpec::multi_index(std::int64_t flat, std::span<int> idx) const {
    for (int a = dim - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
        flat /= n;
    }
}

std::int64_t GridSpec::flat_index(std::span<const int> idx) const {
    std::int64_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * n + idx[static_cast<std::size_t>(a)];
    return f;
}

void GridSpec::point(std::int64_t flat, std::span<double> x) const {
    for (int a = dim - 1; a >= 0; --a) {
        x[static_cast<std::size_t>(a)] = coord(static_cast<int>(flat % n));
        flat /= n;
    }
}

std::int64_t GridSpec::index_of_point(std::span<const double> x) const {
    const double h = spacing();
    std::int64_t f = 0;
    for (int a = 0; a < dim; ++a) {
        const long j = std::lround(x[static_cast<std::size_t>(a)] / h) + n / 2;
        if (j < 0 || j >= n)
            throw Error(Errc::ValidationError, "point outside the grid box");
        f = f * n + j;
    }
    return f;
}

std::int64_t GridSpec::zero_flat() const {
    std::int64_t f = 0;
    for (int a = 0; a < dim; ++a) f = f * n + n / 2;
    return f;
}

RealField make_field(const GridSpec& grid, double fill) {
    return RealField{grid, std::vector<double>(static_cast<std::size_t>(grid.total()), fill), ""};
}

RealField sample_on_grid(const std::function<double(std::span<const double>)>& f,
                         const GridSpec& grid, Exec exec) {
    RealField out = make_field(grid);
    const int d = grid.dim;
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            double x[8];
            grid.point(i, std::span<double>(x, static_cast<std::size_t>(d)));
            out[i] = f(std::span<const double>(x, static_cast<std::size_t>(d)));
        },
        exec);
    return out;
}

RealField sample_on_grid_cell_averaged(const std::function<double(std::span<const double>)>& f,
                                       const GridSpec& grid, double refine_radius, Exec exec) {
    RealField out = make_field(grid);
    const int d = grid.dim;
    const double h = grid.spacing();
    const auto& rule = gauss_legendre_rule(5);
    const auto npts = static_cast<std::int64_t>(rule.size());
    std::int64_t sub_total = 1;
    for (int a = 0; a < d; ++a) sub_total *= npts;
    parallel_for(
        grid.total(),
        [&](std::int64_t i) {
            double x[8];
            grid.point(i, std::span<double>(x, static_cast<std::size_t>(d)));
            double max_coord = 0.0;
            for (int a = 0; a < d; ++a) max_coord = std::max(max_coord, std::abs(x[a]));
            if (max_coord > refine_radius) {
                out[i] = f(std::span<const double>(x, static_cast<std::size_t>(d)));
                return;
            }
            double sum = 0.0;
            double y[8];
            for (std::int64_t s = 0; s < sub_total; ++s) {
                std::int64_t rem = s;
                double w = 1.0;
                for (int a = 0; a < d; ++a) {
                    const auto j = static_cast<std::size_t>(rem % npts);
                    rem /= npts;
                    y[a] = x[a] + 0.5 * h * rule[j].x;
                    w *= 0.5 * rule[j].w; // cell-average normalization
                }
                sum += w * f(std::span<const double>(y, static_cast<std::size_t>(d)));
            }
            out[i] = sum;
        },
        exec);
    return out;
}

double field_sum(const RealField& f, Exec exec) { return block_sum(f.values, exec); }

double field_mass(const RealField& f, Exec exec) {
    return field_sum(f, exec) * f.grid.cell_volume();
}

double field_max_abs(const RealField& f, Exec exec) {
    const std::int64_t nb =
        (static_cast<std::int64_t>(f.values.size()) + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
    parallel_for(
        nb,
        [&](std::int64_t b) {
            const std::int64_t lo = b * kReduceBlock;
            const std::int64_t hi =
                std::min<std::int64_t>(static_cast<std::int64_t>(f.values.size()), lo + kReduceBlock);
            double m = 0.0;
            for (std::int64_t i = lo; i < hi; ++i) m = std::max(m, std::abs(f[i]));
            partial[static_cast<std::size_t>(b)] = m;
        },
        exec);
    double m = 0.0;
    for (double p : partial) m = std::max(m, p);
    return m;
}

double boundary_max_abs(const RealField& f) {
    const GridSpec& g = f.grid;
    double m = 0.0;
    std::vector<int> idx(static_cast<std::size_t>(g.dim));
    for (std::int64_t i = 0; i < g.total(); ++i) {
        g.multi_index(i, idx);
        bool on_face = false;
        for (int a = 0; a < g.dim; ++a)
            if (idx[static_cast<std::size_t>(a)] == 0) on_face = true;
        if (on_face) m = std::max(m, std::abs(f[i]));
    }
    return m;
}

void write_csv(const RealField& f, std::ostream& os, const std::string& value_name) {
    const GridSpec& g = f.grid;
    for (int a = 1; a <= g.dim; ++a) os << 'x' << a << ',';
    os << value_name << '\n';
    std::vector<double> x(static_cast<std::size_t>(g.dim));
    char buf[32];
    for (std::int64_t i = 0; i < g.total(); ++i) {
        g.point(i, x);
        for (int a = 0; a < g.dim; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g", x[static_cast<std::size_t>(a)]);
            os << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.17g", f[i]);
        os << buf << '\n';
    }
}

} // namespace gpot
