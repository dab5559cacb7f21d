#include "tplcov/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string_view>
#include <vector>

#include "tplcov/errors.hpp"

namespace tplcov {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_double(std::string_view field, double& out) {
    if (field.empty()) return false;
    const std::string tmp(field);
    char* end = nullptr;
    errno = 0;
    out = std::strtod(tmp.c_str(), &end);
    return end == tmp.c_str() + tmp.size() && errno != ERANGE;
}

}  // namespace

DataMatrix read_data_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_commas(line);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_double(fields[c], values[c])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first_content) {
                first_content = false;
                width = fields.size();
                continue;
            }
            throw DataError("line " + std::to_string(line_no) + ": non-numeric field");
        }
        first_content = false;
        if (width == 0) width = values.size();
        if (values.size() != width) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, found " +
                            std::to_string(values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw DataError("no data rows");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return DataMatrix(std::move(x));
}

DataMatrix read_data_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    return read_data_csv(in);
}

void write_data_csv(std::ostream& os, const DataMatrix& data) {
    for (std::size_t j = 0; j < data.p(); ++j) os << (j ? ",x" : "x") << j + 1;
    os << '\n';
    const auto& x = data.rows();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) os << (j ? "," : "") << format_number(x(i, j));
        os << '\n';
    }
}

void write_triplets(std::ostream& os, const SymMatrix& mat) {
    os << "j,k,value\n";
    const std::size_t p = mat.dim();
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = j; k < p; ++k) {
            if (j != k && mat(j, k) == 0.0) continue;
            os << j + 1 << ',' << k + 1 << ',' << format_number(mat(j, k)) << '\n';
        }
    }
}

void write_dense(std::ostream& os, const SymMatrix& mat) {
    const std::size_t p = mat.dim();
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < p; ++k) os << (k ? "," : "") << format_number(mat(j, k));
        os << '\n';
    }
}

}  // namespace tplcov
