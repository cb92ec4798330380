#include "afslab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace afslab {

double lx_norm(const Vector& v, double x, double zero_tol) {
    if (!(x >= 0.0 && x <= 2.0)) throw ConfigError("lx_norm: x must be in [0, 2]");
    if (x == 0.0) {
        int count = 0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) > zero_tol) ++count;
        }
        return static_cast<double>(count);
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), x);
    return acc;
}

NormSurface norm_surface(const AfsGrid& grid, double x, double zero_tol) {
    if (grid.n_feasible() == 0) throw EmptyAfsError("norm_surface: grid has no feasible cell");
    const double nan = std::numeric_limits<double>::quiet_NaN();

    NormSurface surf;
    surf.x_exponent = x;
    surf.spec = grid.spec;
    surf.p = grid.p;
    surf.per_component.assign(grid.p, Vector::Constant(grid.cells.size(), nan));
    surf.sum = Vector::Constant(grid.cells.size(), nan);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const GridCell& cell = grid.cells[i];
        if (!cell.feasible) continue;
        double total = 0.0;
        for (int k = 0; k < grid.p; ++k) {
            const double v = lx_norm(cell.S_rows.row(k).transpose(), x, zero_tol);
            surf.per_component[k][i] = v;
            total += v;
        }
        surf.sum[i] = total;
        lo = std::min(lo, total);
        hi = std::max(hi, total);
    }

    surf.scaled = Vector::Constant(grid.cells.size(), nan);
    const double range = hi - lo;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        if (!grid.cells[i].feasible) continue;
        surf.scaled[i] = range > 0.0 ? (surf.sum[i] - lo) / range : 0.0;
    }
    return surf;
}

Vector gradient_field(const NormSurface& surface, bool scaled) {
    const int na = surface.spec.steps_a;
    const int nb = surface.spec.steps_b;
    const Vector& f = scaled ? surface.scaled : surface.sum;

    int feasible = 0;
    for (Eigen::Index i = 0; i < f.size(); ++i) feasible += std::isfinite(f[i]) ? 1 : 0;
    if (feasible < 9) {
        throw NumericError("gradient_field: fewer than 3x3 feasible cells");
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    Vector out = Vector::Constant(f.size(), nan);
    const double da = surface.spec.da();
    const double db = surface.spec.db();

    auto value = [&](int ia, int ib) -> double {
        if (ia < 0 || ia >= na || ib < 0 || ib >= nb) return nan;
        return f[surface.index(ia, ib)];
    };

    for (int ib = 0; ib < nb; ++ib) {
        for (int ia = 0; ia < na; ++ia) {
            const double center = value(ia, ib);
            if (!std::isfinite(center)) continue;
            const double left = value(ia - 1, ib);
            const double right = value(ia + 1, ib);
            const double down = value(ia, ib - 1);
            const double up = value(ia, ib + 1);

            double ga = 0.0;
            if (std::isfinite(left) && std::isfinite(right)) {
                ga = (right - left) / (2.0 * da);
            } else if (std::isfinite(right)) {
                ga = (right - center) / da;
            } else if (std::isfinite(left)) {
                ga = (center - left) / da;
            }
            double gb = 0.0;
            if (std::isfinite(down) && std::isfinite(up)) {
                gb = (up - down) / (2.0 * db);
            } else if (std::isfinite(up)) {
                gb = (up - center) / db;
            } else if (std::isfinite(down)) {
                gb = (center - down) / db;
            }
            out[surface.index(ia, ib)] = std::hypot(ga, gb);
        }
    }
    return out;
}

std::vector<NormSurface> sweep_x(const AfsGrid& grid, const std::vector<double>& xs,
                                 double zero_tol) {
    if (xs.empty()) throw ConfigError("sweep_x: x list is empty");
    if (!std::is_sorted(xs.begin(), xs.end())) throw ConfigError("sweep_x: x list must be sorted");
    std::vector<NormSurface> frames;
    frames.reserve(xs.size());
    for (const double x : xs) frames.push_back(norm_surface(grid, x, zero_tol));
    return frames;
}

}  // namespace afslab
