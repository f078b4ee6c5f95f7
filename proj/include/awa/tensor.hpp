#pragma once

#include <Eigen/Dense>

#include "awa/errors.hpp"

namespace awa {

/// Channels-by-length shape of one sample.
struct Shape {
    int channels = 1;
    int length = 1;

    int features() const { return channels * length; }
    bool operator==(const Shape&) const = default;
};

/// A batch of 1-D multi-channel samples. Row b holds sample b flattened
/// channel-major: feature index = channel * length + position.
struct Tensor {
    Eigen::MatrixXd m;
    Shape shape;

    Tensor() = default;
    Tensor(Eigen::MatrixXd data, Shape s) : m(std::move(data)), shape(s) {
        if (m.cols() != shape.features())
            throw ShapeError("tensor data does not match declared shape");
    }

    int batch() const { return static_cast<int>(m.rows()); }

    static Tensor zeros(int batch, Shape s) {
        return Tensor(Eigen::MatrixXd::Zero(batch, s.features()), s);
    }
};

} // namespace awa
