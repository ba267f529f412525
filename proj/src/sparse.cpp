#include "aai/sparse.hpp"

#include "aai/error.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace aai {

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    SparseMatrix m(rows, cols);
    std::vector<std::size_t> counts(rows, 0);
    for (std::size_t i = 0; i < triplets.size();) {
        const auto& t = triplets[i];
        if (t.row >= rows || t.col >= cols) throw DomainError("sparse triplet out of range");
        double sum = 0.0;
        std::size_t j = i;
        for (; j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col; ++j)
            sum += triplets[j].value;
        if (sum != 0.0) {
            m.col_idx_.push_back(t.col);
            m.values_.push_back(sum);
            ++counts[t.row];
        }
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] = m.row_ptr_[r] + counts[r];
    return m;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
    auto cols = row_cols(r);
    auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

double SparseMatrix::row_sum(std::size_t r) const {
    double s = 0.0;
    for (double v : row_values(r)) s += v;
    return s;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> d(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        auto c = row_cols(r);
        auto v = row_values(r);
        for (std::size_t k = 0; k < c.size(); ++k) d[r * cols_ + c[k]] = v[k];
    }
    return d;
}

void SparseMatrix::write_coordinate(std::ostream& out) const {
    out << rows_ << ' ' << cols_ << ' ' << nnz() << '\n';
    char buf[64];
    for (std::size_t r = 0; r < rows_; ++r) {
        auto c = row_cols(r);
        auto v = row_values(r);
        for (std::size_t k = 0; k < c.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", v[k]);
            out << r << ' ' << c[k] << ' ' << buf << '\n';
        }
    }
}

SparseMatrix SparseMatrix::read_coordinate(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("missing coordinate header", 1);
    std::istringstream header(line);
    std::size_t rows = 0, cols = 0, nnz = 0;
    if (!(header >> rows >> cols >> nnz)) throw ParseError("bad coordinate header", 1);
    std::vector<Triplet> t;
    t.reserve(nnz);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        Triplet x{};
        if (!(ls >> x.row >> x.col >> x.value)) throw ParseError("bad coordinate entry", lineno);
        t.push_back(x);
    }
    if (t.size() != nnz)
        throw ParseError("coordinate entry count " + std::to_string(t.size()) + " != header " + std::to_string(nnz));
    return from_triplets(rows, cols, std::move(t));
}

}  // namespace aai
