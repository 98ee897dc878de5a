#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spt {

/// Dense row-major matrix of doubles. Rows index time steps, columns index
/// stocks. Derived paths are stored densely so any step is O(1) to read.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Integer-valued matrix, used for per-step permutations.
class IndexMatrix {
public:
    IndexMatrix() = default;
    IndexMatrix(std::size_t rows, std::size_t cols, std::size_t fill = 0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::size_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::size_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const std::size_t> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> data_;
};

/// Left limit of an RCLL step-indexed path: at a flagged step the value that
/// applied "just before" is the previous step's stored value; elsewhere the
/// path is continuous and the left limit is the stored value itself.
inline std::size_t left_index(const std::vector<std::uint8_t>& jump_flags, std::size_t step) {
    return (step > 0 && step < jump_flags.size() && jump_flags[step]) ? step - 1 : step;
}

} // namespace spt
