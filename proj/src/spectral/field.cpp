#include "dispersive/field.hpp"

#include "dispersive/errors.hpp"

#include <cmath>
#include <string>

namespace dispersive {

namespace {
void require_grid(const GridPtr& g) {
    if (!g) throw ConfigError("field requires a grid");
}
}  // namespace

Field Field::zeros(GridPtr grid) {
    require_grid(grid);
    Field f(grid, Representation::physical);
    f.real_.assign(grid->size(), 0.0);
    return f;
}

Field Field::physical(GridPtr grid, std::vector<double> values) {
    require_grid(grid);
    if (values.size() != grid->size()) {
        throw GridMismatchError("physical values do not match grid size");
    }
    Field f(std::move(grid), Representation::physical);
    f.real_ = std::move(values);
    return f;
}

Field Field::spectral(GridPtr grid, std::vector<Complex> modes) {
    require_grid(grid);
    if (modes.size() != grid->size()) {
        throw GridMismatchError("spectral modes do not match grid size");
    }
    Field f(std::move(grid), Representation::spectral);
    f.modes_ = std::move(modes);
    return f;
}

Field Field::sample(GridPtr grid, const std::function<double(double)>& fn) {
    require_grid(grid);
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = fn(grid->x(i));
        if (!std::isfinite(v[i])) throw ConfigError("sampled profile is not finite");
    }
    return physical(std::move(grid), std::move(v));
}

Field Field::constant(GridPtr grid, double value) {
    require_grid(grid);
    return physical(grid, std::vector<double>(grid->size(), value));
}

std::span<const double> Field::values() const {
    if (rep_ != Representation::physical) throw RepresentationError("field is spectral");
    return real_;
}

std::span<double> Field::values() {
    if (rep_ != Representation::physical) throw RepresentationError("field is spectral");
    return real_;
}

std::span<const Complex> Field::modes() const {
    if (rep_ != Representation::spectral) throw RepresentationError("field is physical");
    return modes_;
}

std::span<Complex> Field::modes() {
    if (rep_ != Representation::spectral) throw RepresentationError("field is physical");
    return modes_;
}

bool Field::all_finite() const noexcept {
    for (double v : real_) {
        if (!std::isfinite(v)) return false;
    }
    for (const Complex& z : modes_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

Field& Field::operator*=(double c) {
    for (double& v : real_) v *= c;
    for (Complex& z : modes_) z *= c;
    return *this;
}

void require_same_grid(const Field& a, const Field& b, const char* context) {
    if (!a.grid_ptr() || !b.grid_ptr() || !a.grid().same_as(b.grid())) {
        throw GridMismatchError(std::string("grid mismatch in ") + context);
    }
}

}  // namespace dispersive
