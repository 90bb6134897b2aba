#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sfde {

/// Interior node counts per axis, x first.
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);

/// Nodal values over the interior grid, stored x-fastest (then y, then z),
/// i.e. flat index = i + n1 * (j + n2 * k).
class Field {
public:
    Field() = default;
    explicit Field(Shape shape, double fill = 0.0);
    Field(Shape shape, std::vector<double> values);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t dimension() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::vector<double>& storage() noexcept { return data_; }
    const std::vector<double>& storage() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    /// Distance in the flat array between neighbours along `axis`.
    std::size_t stride(std::size_t axis) const;

    void fill(double value);

private:
    Shape shape_;
    std::vector<double> data_;
};

void require_shape(const Field& f, const Shape& expected, const char* what);

/// Calls fn(offset, stride) once for every 1D line of `shape` running along
/// `axis`; element j of the line lives at offset + j * stride.
template <typename Fn>
void for_each_line(const Shape& shape, std::size_t axis, Fn&& fn)
{
    std::size_t stride = 1;
    for (std::size_t a = 0; a < axis; ++a)
        stride *= shape[a];
    const std::size_t len = shape[axis];
    const std::size_t block = stride * len;
    const std::size_t total = shape_size(shape);
    for (std::size_t outer = 0; outer < total; outer += block)
        for (std::size_t inner = 0; inner < stride; ++inner)
            fn(outer + inner, stride);
}

/// Uniform tensor grid on a box with homogeneous Dirichlet exterior.
/// Axis i has n_i interior nodes x_p = a_i + p h_i, p = 1..n_i, with
/// h_i = (b_i - a_i) / (n_i + 1).
class GridSpec {
public:
    struct Axis {
        double lower;
        double upper;
        std::size_t interior;
    };

    explicit GridSpec(std::vector<Axis> axes);

    /// Unit box (0,1)^d with n interior nodes on every axis.
    static GridSpec unit_box(std::size_t dimension, std::size_t n);

    std::size_t dimension() const noexcept { return axes_.size(); }
    const Axis& axis(std::size_t i) const { return axes_.at(i); }
    const std::vector<Axis>& axes() const noexcept { return axes_; }
    std::size_t interior(std::size_t i) const { return axes_.at(i).interior; }
    double step(std::size_t i) const;
    double node(std::size_t axis, std::size_t p) const;
    Shape shape() const;
    std::size_t size() const { return shape_size(shape()); }
    /// Product of the steps; the volume of one control cell.
    double cell_volume() const;

    friend bool operator==(const GridSpec& a, const GridSpec& b);

private:
    std::vector<Axis> axes_;
};

} // namespace sfde
