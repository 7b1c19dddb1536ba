// Copyright 2026 The Permanent Engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "perm/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perm/errors.hpp"
#include "text_util.hpp"

namespace perm {

std::string_view to_string(MatrixKind kind) {
    return kind == MatrixKind::real ? "real" : "complex";
}

std::string_view to_string(AccumulationMode mode) {
    switch (mode) {
        case AccumulationMode::plain:
            return "plain";
        case AccumulationMode::compensated:
            return "compensated";
        case AccumulationMode::extended:
            return "extended";
    }
    return "unknown";
}

AccumulationMode parse_accumulation_mode(std::string_view text) {
    if (text == "plain") return AccumulationMode::plain;
    if (text == "compensated") return AccumulationMode::compensated;
    if (text == "extended") return AccumulationMode::extended;
    throw InvalidArgument("unknown accumulation mode '" + std::string(text) + "'");
}

Matrix::Matrix(MatrixKind kind, ComplexMatrix values) : kind_(kind), values_(std::move(values)) {
    if (values_.rows() < 1) {
        throw DimensionError("matrix order must be at least 1");
    }
    if (values_.rows() != values_.cols()) {
        throw DimensionError("matrix must be square, got " + std::to_string(values_.rows()) + "x" +
                             std::to_string(values_.cols()));
    }
    const Eigen::Index n = values_.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Complex z = values_(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                throw InvalidArgument("matrix entries must be finite");
            }
            if (kind_ == MatrixKind::real && z.imag() != 0.0) {
                throw InvalidArgument("real matrix has an entry with non-zero imaginary part");
            }
            if (z != Complex(0.0)) {
                band_width_ = std::max(band_width_, static_cast<std::size_t>(i > j ? i - j : j - i));
            }
        }
    }
}

Matrix Matrix::from_real(const RealMatrix &values) {
    return Matrix(MatrixKind::real, values.cast<Complex>());
}

Matrix Matrix::from_complex(ComplexMatrix values) {
    return Matrix(MatrixKind::complex, std::move(values));
}

Matrix all_ones(std::size_t n) {
    if (n == 0) {
        throw DimensionError("matrix order must be at least 1");
    }
    const auto size = static_cast<Eigen::Index>(n);
    return Matrix::from_real(RealMatrix::Ones(size, size));
}

Matrix parse_matrix(std::istream &in) {
    std::string line;
    std::size_t line_number = 0;
    auto next_content_line = [&](std::vector<std::string_view> &tokens) {
        while (std::getline(in, line)) {
            ++line_number;
            tokens = detail::split_whitespace(line);
            if (tokens.empty() || tokens.front().front() == '#') continue;
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string &what) -> ParseError {
        return ParseError("line " + std::to_string(line_number) + ": " + what);
    };

    std::vector<std::string_view> tokens;
    if (!next_content_line(tokens)) {
        throw ParseError("missing matrix header");
    }
    if (tokens.size() != 3) {
        throw fail("header must be '<kind> <rows> <cols>'");
    }
    MatrixKind kind;
    if (tokens[0] == "real") {
        kind = MatrixKind::real;
    } else if (tokens[0] == "complex") {
        kind = MatrixKind::complex;
    } else {
        throw fail("unknown matrix kind '" + std::string(tokens[0]) + "'");
    }
    std::size_t rows = 0;
    std::size_t cols = 0;
    if (!detail::parse_unsigned(tokens[1], rows) || !detail::parse_unsigned(tokens[2], cols)) {
        throw fail("malformed matrix dimensions");
    }
    if (rows != cols) {
        throw DimensionError("matrix must be square, header declares " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    if (rows == 0) {
        throw DimensionError("matrix order must be at least 1");
    }

    const std::size_t per_row = kind == MatrixKind::real ? cols : 2 * cols;
    ComplexMatrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        if (!next_content_line(tokens)) {
            throw ParseError("expected " + std::to_string(rows) + " rows, found " + std::to_string(i));
        }
        if (tokens.size() != per_row) {
            throw fail("expected " + std::to_string(per_row) + " numbers, found " +
                       std::to_string(tokens.size()));
        }
        for (std::size_t j = 0; j < cols; ++j) {
            double re = 0.0;
            double im = 0.0;
            const std::size_t at = kind == MatrixKind::real ? j : 2 * j;
            if (!detail::parse_double(tokens[at], re) ||
                (kind == MatrixKind::complex && !detail::parse_double(tokens[at + 1], im))) {
                throw fail("malformed number");
            }
            if (!std::isfinite(re) || !std::isfinite(im)) {
                throw fail("non-finite entry");
            }
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
        }
    }
    if (next_content_line(tokens)) {
        throw fail("unexpected trailing data");
    }
    return Matrix(kind, std::move(values));
}

Matrix read_matrix(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open matrix file '" + path.string() + "'");
    }
    return parse_matrix(in);
}

void write_matrix(std::ostream &out, const Matrix &matrix) {
    const std::size_t n = matrix.order();
    out << to_string(matrix.kind()) << ' ' << n << ' ' << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) out << ' ';
            const Complex z = matrix(i, j);
            out << detail::format_double(z.real());
            if (matrix.kind() == MatrixKind::complex) {
                out << ' ' << detail::format_double(z.imag());
            }
        }
        out << '\n';
    }
}

void write_matrix(const std::filesystem::path &path, const Matrix &matrix) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write matrix file '" + path.string() + "'");
    }
    write_matrix(out, matrix);
}

}  // namespace perm
