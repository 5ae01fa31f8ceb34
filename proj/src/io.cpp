#include "divw/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

static_assert(std::endian::native == std::endian::little,
              "DWM1 serialization assumes a little-endian host");

namespace divw {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        const auto a = field.find_first_not_of(" \t\r");
        const auto b = field.find_last_not_of(" \t\r");
        fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

FeatureMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);

    std::string line;
    std::vector<std::vector<double>> rows;
    std::vector<long> labels;
    bool has_label_col = false;
    bool first_data_line = true;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);

        if (first_data_line) {
            double tmp;
            bool numeric = true;
            for (const auto& f : fields)
                if (!parse_double(f, tmp)) { numeric = false; break; }
            if (!numeric) {
                // Header row; a trailing "label" column marks integer class labels.
                has_label_col = !fields.empty() && lower(fields.back()) == "label";
                first_data_line = false;
                continue;
            }
            first_data_line = false;
        }

        const std::size_t want = has_label_col ? fields.size() - 1 : fields.size();
        std::vector<double> row(want);
        for (std::size_t j = 0; j < want; ++j) {
            if (!parse_double(fields[j], row[j]))
                throw ParseError(path + ": line " + std::to_string(lineno) + ", field " +
                                 std::to_string(j + 1) + ": not a number: '" + fields[j] + "'");
            if (!std::isfinite(row[j]))
                throw ValidationError(path + ": line " + std::to_string(lineno) +
                                      ": non-finite entry");
        }
        if (has_label_col) {
            double lv;
            if (!parse_double(fields.back(), lv))
                throw ParseError(path + ": line " + std::to_string(lineno) +
                                 ": label is not an integer: '" + fields.back() + "'");
            labels.push_back(static_cast<long>(std::llround(lv)));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ": line " + std::to_string(lineno) + ": expected " +
                             std::to_string(rows.front().size()) + " fields, got " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");

    FeatureMatrix X;
    X.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            X.data(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    X.labels = std::move(labels);
    return X;
}

void save_csv(const std::string& path, const FeatureMatrix& X) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    if (X.has_labels()) {
        for (Index j = 0; j < X.cols(); ++j) out << "f" << j << ",";
        out << "label\n";
    }
    char buf[32];
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < X.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", X.data(i, j));
            out << (j ? "," : "") << buf;
        }
        if (X.has_labels()) out << "," << X.labels[static_cast<std::size_t>(i)];
        out << "\n";
    }
}

}  // namespace

Matrix load_dwm1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "DWM1", 4) != 0)
        throw ParseError(path + ": byte offset 0: bad magic, expected DWM1");
    std::uint64_t n = 0, d = 0;
    if (!in.read(reinterpret_cast<char*>(&n), 8) || !in.read(reinterpret_cast<char*>(&d), 8))
        throw ParseError(path + ": byte offset 4: truncated header");
    if (n == 0 || d == 0 || n > (1ull << 32) || d > (1ull << 32))
        throw ParseError(path + ": implausible dimensions " + std::to_string(n) + "x" +
                         std::to_string(d));
    Matrix m(static_cast<Index>(n), static_cast<Index>(d));
    for (std::uint64_t i = 0; i < n; ++i) {
        std::vector<double> row(d);
        if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(d * 8)))
            throw ParseError(path + ": byte offset " + std::to_string(20 + i * d * 8) +
                             ": truncated payload");
        for (std::uint64_t j = 0; j < d; ++j) {
            if (!std::isfinite(row[j]))
                throw ValidationError(path + ": non-finite entry at row " + std::to_string(i));
            m(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
        }
    }
    return m;
}

void save_dwm1(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out.write("DWM1", 4);
    const std::uint64_t n = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t d = static_cast<std::uint64_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&d), 8);
    std::vector<double> row(d);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(d * 8));
    }
    if (!out) throw ParseError("write failed: " + path);
}

FeatureMatrix load_features(const std::string& path, FileFormat format) {
    if (format == FileFormat::csv) return load_csv(path);
    return FeatureMatrix{load_dwm1(path), {}};
}

void save_features(const std::string& path, const FeatureMatrix& X, FileFormat format) {
    if (format == FileFormat::csv)
        save_csv(path, X);
    else
        save_dwm1(path, X.data);
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[65536];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof buf)) break;
    }
    return h;
}

}  // namespace divw
