#include "daggp/dataset_io.hpp"

#include "daggp/error.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace daggp {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t j = 0; j < data.columns.size(); ++j) {
        if (j) out << ',';
        out << data.columns[j];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.rows.cols(); ++j) {
            if (j) out << ',';
            out << format_double(data.rows(i, j));
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

Dataset read_csv(std::istream& in) {
    Dataset data;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') break;
    }
    if (line.empty()) throw ArgumentError("csv: missing header row");
    data.columns = split(line);

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (cells.size() != data.columns.size()) {
            throw ArgumentError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                " cells, expected " + std::to_string(data.columns.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const auto& c = cells[j];
            auto res = std::from_chars(c.data(), c.data() + c.size(), row[j]);
            if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
                throw ArgumentError("csv: line " + std::to_string(line_no) + " column '" + data.columns[j] +
                                    "' is not a number: '" + c + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    data.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < data.columns.size(); ++j)
            data.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return data;
}

} // namespace daggp
