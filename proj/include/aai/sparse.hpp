#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <tuple>
#include <vector>

namespace aai {

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

// Compressed sparse row matrix of doubles. Zero entries are never stored.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

    // Duplicate coordinates are summed; resulting zeros are dropped.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    double at(std::size_t r, std::size_t c) const;
    double row_sum(std::size_t r) const;

    std::vector<double> to_dense() const;  // row-major

    // `rows cols nnz` header, then one `row col value` line per entry.
    void write_coordinate(std::ostream& out) const;
    static SparseMatrix read_coordinate(std::istream& in);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

}  // namespace aai
