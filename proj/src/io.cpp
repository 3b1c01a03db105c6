#include "rgr/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <vector>

namespace rgr {

namespace {

constexpr char kMagic[4] = {'R', 'G', 'R', '1'};

static_assert(sizeof(double) == 8);

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void write_matrix(const std::string& path, const Matrix& m) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    // row-major payload; assumes little-endian host for the doubles
    std::vector<double> row(m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(8 * row.size()));
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidDataError("cannot open matrix file: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw InvalidDataError("bad magic in matrix file: " + path);
    const std::uint64_t rows = get_u64(is), cols = get_u64(is);
    if (!is) throw InvalidDataError("truncated header in matrix file: " + path);
    if (rows > (1ull << 32) || cols > (1ull << 32))
        throw InvalidDataError("implausible matrix dimensions in: " + path);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::vector<double> row(cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
        is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(8 * cols));
        if (!is) throw InvalidDataError("truncated payload in matrix file: " + path);
        for (std::uint64_t j = 0; j < cols; ++j) m(i, j) = row[j];
    }
    return m;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
}

}  // namespace rgr
