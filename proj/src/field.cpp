#include "sfde/field.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace sfde {

std::size_t shape_size(const Shape& shape)
{
    if (shape.empty())
        return 0;
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

Field::Field(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Field::Field(Shape shape, std::vector<double> values) : shape_(std::move(shape)), data_(std::move(values))
{
    if (data_.size() != shape_size(shape_))
        throw std::invalid_argument("field data length does not match its shape");
}

std::size_t Field::stride(std::size_t axis) const
{
    if (axis >= shape_.size())
        throw std::out_of_range("axis out of range");
    std::size_t s = 1;
    for (std::size_t a = 0; a < axis; ++a)
        s *= shape_[a];
    return s;
}

void Field::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

void require_shape(const Field& f, const Shape& expected, const char* what)
{
    if (f.shape() != expected) {
        std::string msg = std::string(what) + ": shape mismatch, expected (";
        for (std::size_t i = 0; i < expected.size(); ++i)
            msg += (i ? "," : "") + std::to_string(expected[i]);
        msg += ") got (";
        for (std::size_t i = 0; i < f.shape().size(); ++i)
            msg += (i ? "," : "") + std::to_string(f.shape()[i]);
        throw std::invalid_argument(msg + ")");
    }
}

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes))
{
    if (axes_.size() != 2 && axes_.size() != 3)
        throw std::invalid_argument("grids must be 2D or 3D");
    for (const Axis& a : axes_) {
        if (a.interior == 0)
            throw std::invalid_argument("each axis needs at least one interior node");
        if (!(a.upper > a.lower))
            throw std::invalid_argument("axis bounds must satisfy lower < upper");
    }
}

GridSpec GridSpec::unit_box(std::size_t dimension, std::size_t n)
{
    return GridSpec(std::vector<Axis>(dimension, Axis{0.0, 1.0, n}));
}

double GridSpec::step(std::size_t i) const
{
    const Axis& a = axes_.at(i);
    return (a.upper - a.lower) / static_cast<double>(a.interior + 1);
}

double GridSpec::node(std::size_t axis, std::size_t p) const
{
    return axes_.at(axis).lower + static_cast<double>(p) * step(axis);
}

Shape GridSpec::shape() const
{
    Shape s;
    for (const Axis& a : axes_)
        s.push_back(a.interior);
    return s;
}

double GridSpec::cell_volume() const
{
    double v = 1.0;
    for (std::size_t i = 0; i < axes_.size(); ++i)
        v *= step(i);
    return v;
}

bool operator==(const GridSpec& a, const GridSpec& b)
{
    if (a.axes_.size() != b.axes_.size())
        return false;
    for (std::size_t i = 0; i < a.axes_.size(); ++i) {
        const auto& x = a.axes_[i];
        const auto& y = b.axes_[i];
        if (x.lower != y.lower || x.upper != y.upper || x.interior != y.interior)
            return false;
    }
    return true;
}

} // namespace sfde
