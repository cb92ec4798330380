#include "afslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace afslab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv(const std::filesystem::path& path, const Matrix& m,
               const std::vector<std::string>& header) {
    std::ostringstream out;
    if (!header.empty()) {
        if (static_cast<Eigen::Index>(header.size()) != m.cols()) {
            throw ConfigError("write_csv: header size does not match column count");
        }
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j) out << ',';
            out << header[j];
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
    write_text(path, out.str());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

CsvContent read_csv(const std::filesystem::path& path, CsvHeader header) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());

    CsvContent content;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (first && header == CsvHeader::require) {
            content.header = fields;
            first = false;
            continue;
        }
        std::vector<double> row(fields.size());
        bool numeric = true;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_double(fields[j], row[j])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first && header == CsvHeader::autodetect) {
                content.header = fields;
                first = false;
                continue;
            }
            throw ConfigError("read_csv: non-numeric data row in " + path.string());
        }
        first = false;
        if (!rows.empty() && rows.back().size() != row.size()) {
            throw ConfigError("read_csv: ragged rows in " + path.string());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        content.values.resize(0, 0);
        return content;
    }
    content.values.resize(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            content.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
        }
    }
    return content;
}

void write_pgm(const std::filesystem::path& path, const Matrix& values) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double v = values.data()[i];
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double range = (hi > lo) ? hi - lo : 1.0;

    std::ostringstream out;
    out << "P2\n" << values.cols() << ' ' << values.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double v = values(i, j);
            int gray = 0;
            if (std::isfinite(v)) {
                gray = static_cast<int>(std::lround((v - lo) / range * 255.0));
                gray = std::clamp(gray, 0, 255);
            }
            if (j) out << ' ';
            out << gray;
        }
        out << '\n';
    }
    write_text(path, out.str());
}

}  // namespace afslab
