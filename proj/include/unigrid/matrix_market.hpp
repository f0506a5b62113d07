/// @file matrix_market.hpp
/// @brief Matrix Market coordinate I/O for matrices, one-value-per-line I/O for vectors.

#pragma once

#include "unigrid/sparse.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace unigrid {

inline void write_matrix_market(std::ostream& os, const SparseMatrix& A) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << A.rows() << ' ' << A.cols() << ' ' << A.nnz() << '\n';
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Index i = 0; i < A.rows(); ++i) {
        auto rc = A.row_cols(i);
        auto rv = A.row_values(i);
        for (std::size_t k = 0; k < rc.size(); ++k) {
            os << (i + 1) << ' ' << (rc[k] + 1) << ' ' << rv[k] << '\n';
        }
    }
}

/// Reads `coordinate real|integer general|symmetric` files. Symmetric files
/// store only one triangle; the mirror entries are regenerated.
inline SparseMatrix read_matrix_market(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0) {
        throw std::runtime_error("read_matrix_market: missing banner");
    }
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate") {
        throw std::runtime_error("read_matrix_market: only coordinate matrices are supported");
    }
    if (field != "real" && field != "integer" && field != "double") {
        throw std::runtime_error("read_matrix_market: unsupported field '" + field + "'");
    }
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") {
        throw std::runtime_error("read_matrix_market: unsupported symmetry '" + symmetry + "'");
    }
    while (std::getline(is, line) && (line.empty() || line[0] == '%')) {
    }
    std::istringstream dims(line);
    Index rows = 0, cols = 0, count = 0;
    if (!(dims >> rows >> cols >> count)) throw std::runtime_error("read_matrix_market: bad size line");

    std::vector<Triplet> entries;
    entries.reserve(symmetric ? 2 * count : count);
    for (Index k = 0; k < count; ++k) {
        Index i = 0, j = 0;
        double v = 0.0;
        if (!(is >> i >> j >> v) || i == 0 || j == 0) {
            throw std::runtime_error("read_matrix_market: bad entry " + std::to_string(k + 1));
        }
        entries.push_back({i - 1, j - 1, v});
        if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(entries));
}

inline void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& A) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_matrix_market(os, A);
}

inline SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_matrix_market(is);
}

inline void write_vector(std::ostream& os, std::span<const double> v) {
    char buf[32];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf << '\n';
    }
}

inline DenseVector read_vector(std::istream& is) {
    DenseVector v;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '%' || line[0] == '#') continue;
        std::size_t used = 0;
        v.push_back(std::stod(line, &used));
    }
    return v;
}

inline void write_vector(const std::filesystem::path& path, std::span<const double> v) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_vector(os, v);
}

inline DenseVector read_vector(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    return read_vector(is);
}

}  // namespace unigrid
