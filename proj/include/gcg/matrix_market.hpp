// Copyright 2026 The gcg-l1 Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcg/error.hpp"

namespace gcg::io {

namespace detail {

inline std::string lower(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline bool next_data_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '%') continue;
        return true;
    }
    return false;
}

}  // namespace detail

/// Parses a MatrixMarket stream (array or coordinate; real or integer;
/// general, symmetric or skew-symmetric) into dense storage.
inline Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& origin = "<stream>") {
    std::string header;
    if (!std::getline(in, header)) throw Error(ErrorKind::Io, origin + ": empty input");
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || detail::lower(object) != "matrix")
        throw Error(ErrorKind::Io, origin + ": missing %%MatrixMarket matrix banner");
    format = detail::lower(format);
    field = detail::lower(field);
    symmetry = detail::lower(symmetry);
    if (field != "real" && field != "integer" && field != "double")
        throw Error(ErrorKind::Io, origin + ": unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
        throw Error(ErrorKind::Io, origin + ": unsupported symmetry '" + symmetry + "'");

    std::string line;
    if (!detail::next_data_line(in, line)) throw Error(ErrorKind::Io, origin + ": missing size line");
    std::istringstream ss(line);
    long rows = -1, cols = -1, nnz = -1;
    ss >> rows >> cols;
    if (format == "coordinate") ss >> nnz;
    if (!ss || rows < 0 || cols < 0 || (format == "coordinate" && nnz < 0))
        throw Error(ErrorKind::Io, origin + ": malformed size line");
    if (symmetry != "general" && rows != cols)
        throw Error(ErrorKind::Io, origin + ": symmetric storage requires a square matrix");

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
    if (format == "array") {
        // Column-major; symmetric variants list only the lower triangle.
        for (long j = 0; j < cols; ++j) {
            const long start = symmetry == "general" ? 0 : (symmetry == "symmetric" ? j : j + 1);
            for (long i = start; i < rows; ++i) {
                if (!detail::next_data_line(in, line))
                    throw Error(ErrorKind::Io, origin + ": truncated array data");
                std::istringstream vs(line);
                double v;
                if (!(vs >> v)) throw Error(ErrorKind::Io, origin + ": malformed value '" + line + "'");
                m(i, j) = v;
                if (symmetry != "general" && i != j) m(j, i) = mirror * v;
            }
        }
    } else if (format == "coordinate") {
        for (long k = 0; k < nnz; ++k) {
            if (!detail::next_data_line(in, line))
                throw Error(ErrorKind::Io, origin + ": truncated coordinate data");
            std::istringstream vs(line);
            long i, j;
            double v;
            if (!(vs >> i >> j >> v)) throw Error(ErrorKind::Io, origin + ": malformed entry '" + line + "'");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw Error(ErrorKind::Io, origin + ": entry index out of range");
            m(i - 1, j - 1) += v;
            if (symmetry != "general" && i != j) m(j - 1, i - 1) += mirror * v;
        }
    } else {
        throw Error(ErrorKind::Io, origin + ": unsupported format '" + format + "'");
    }
    return m;
}

inline Eigen::MatrixXd read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_matrix_market(in, path);
}

/// Writes dense storage as "array real general", full precision.
inline void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) out << detail::format_real(m(i, j)) << '\n';
}

inline void write_matrix_market(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    write_matrix_market(out, m);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

/// Reads a vector from either a MatrixMarket n x 1 (or 1 x n) matrix or plain
/// text holding one value per line.
inline Eigen::VectorXd read_vector(std::istream& in, const std::string& origin = "<stream>") {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.rfind("%%MatrixMarket", 0) == 0) {
        std::istringstream mm(content);
        Eigen::MatrixXd m = read_matrix_market(mm, origin);
        if (m.cols() == 1) return m.col(0);
        if (m.rows() == 1) return m.row(0).transpose();
        throw Error(ErrorKind::Io, origin + ": expected a single row or column");
    }
    std::istringstream lines(content);
    std::vector<double> values;
    std::string line;
    while (detail::next_data_line(lines, line)) {
        std::istringstream vs(line);
        double v;
        if (!(vs >> v)) throw Error(ErrorKind::Io, origin + ": malformed value '" + line + "'");
        std::string rest;
        if (vs >> rest) throw Error(ErrorKind::Io, origin + ": expected one value per line");
        values.push_back(v);
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline Eigen::VectorXd read_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
    return read_vector(in, path);
}

inline void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) out << detail::format_real(v[i]) << '\n';
}

inline void write_vector(const std::string& path, const Eigen::VectorXd& v) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    write_vector(out, v);
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace gcg::io
