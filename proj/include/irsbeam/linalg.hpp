#pragma once

// Minimal dense complex matrix support for channel blocks and beam-space
// products. Row-major storage; sizes here are tiny (segments x segments).

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace irsbeam {

using cplx = std::complex<double>;

struct CMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> data; // row-major

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c)) {
        if (r < 0 || c < 0) throw std::invalid_argument("CMatrix: negative dimension");
    }

    cplx& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const cplx& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    CMatrix& operator+=(const CMatrix& o) {
        if (rows != o.rows || cols != o.cols)
            throw std::invalid_argument("CMatrix::operator+=: shape mismatch");
        for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
        return *this;
    }
};

/// M += scale * col * row^T  (rank-one update, no conjugation).
inline void add_outer(CMatrix& m, std::span<const cplx> col, std::span<const cplx> row, cplx scale) {
    if (m.rows != static_cast<int>(col.size()) || m.cols != static_cast<int>(row.size()))
        throw std::invalid_argument("add_outer: shape mismatch");
    for (int r = 0; r < m.rows; ++r) {
        cplx cr = scale * col[static_cast<size_t>(r)];
        for (int c = 0; c < m.cols; ++c) m.at(r, c) += cr * row[static_cast<size_t>(c)];
    }
}

/// left^T * M * right (plain transpose, no conjugation).
inline cplx bilinear(std::span<const cplx> left, const CMatrix& m, std::span<const cplx> right) {
    if (m.rows != static_cast<int>(left.size()) || m.cols != static_cast<int>(right.size()))
        throw std::invalid_argument("bilinear: shape mismatch");
    cplx acc = 0.0;
    for (int r = 0; r < m.rows; ++r) {
        cplx rowsum = 0.0;
        for (int c = 0; c < m.cols; ++c) rowsum += m.at(r, c) * right[static_cast<size_t>(c)];
        acc += left[static_cast<size_t>(r)] * rowsum;
    }
    return acc;
}

} // namespace irsbeam
