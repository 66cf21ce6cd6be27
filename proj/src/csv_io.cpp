#include "tsad/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsad {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
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

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double parse_value(const std::string& field, const std::string& path, std::size_t line_no,
                   const std::string& column) {
    const std::string t = trim(field);
    if (t.empty())
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": empty cell in column '" + column + "'");
    try {
        std::size_t pos = 0;
        const double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        if (!std::isfinite(v)) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": cell '" + t + "' in column '" + column +
                                 "' is not a finite number");
    }
}

int parse_label(const std::string& field, const std::string& path, std::size_t line_no) {
    const std::string t = lower(trim(field));
    if (t == "0" || t == "normal") return 0;
    if (t == "1" || t == "attack") return 1;
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": label '" + trim(field) +
                             "' must be 0/1 or Normal/Attack");
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

TimeSeriesMatrix read_time_series_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

    const std::vector<std::string> header = split_csv_line(line);
    long label_col = -1, time_col = -1;
    std::vector<long> value_cols;
    TimeSeriesMatrix data;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const std::string name = trim(header[j]);
        const std::string low = lower(name);
        if (low == "label" && label_col < 0) {
            label_col = static_cast<long>(j);
        } else if (low == "timestamp" && time_col < 0) {
            time_col = static_cast<long>(j);
        } else {
            value_cols.push_back(static_cast<long>(j));
            data.column_names.push_back(name);
        }
    }
    if (value_cols.empty()) throw std::runtime_error(path + ": no signal columns");

    std::vector<double> values;
    std::size_t line_no = 1;
    long rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(header.size()) +
                                     " fields, got " + std::to_string(fields.size()));
        for (std::size_t k = 0; k < value_cols.size(); ++k)
            values.push_back(parse_value(fields[value_cols[k]], path, line_no,
                                         data.column_names[k]));
        if (label_col >= 0) data.labels.push_back(parse_label(fields[label_col], path, line_no));
        if (time_col >= 0) data.timestamps.push_back(trim(fields[time_col]));
        ++rows;
    }
    if (rows == 0) throw std::runtime_error(path + ": no data rows");

    const long m = static_cast<long>(value_cols.size());
    data.values.resize(rows, m);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < m; ++j) data.values(i, j) = values[i * m + j];
    return data;
}

void write_time_series_csv(const std::string& path, const TimeSeriesMatrix& data) {
    std::ofstream out = open_out(path);
    if (!data.timestamps.empty()) out << "timestamp,";
    for (long j = 0; j < data.cols(); ++j) {
        out << data.column_names[j];
        out << (j + 1 < data.cols() ? "," : "");
    }
    if (data.has_labels()) out << ",label";
    out << "\n";
    for (long i = 0; i < data.rows(); ++i) {
        if (!data.timestamps.empty()) out << data.timestamps[i] << ",";
        for (long j = 0; j < data.cols(); ++j) {
            out << format_double(data.values(i, j));
            out << (j + 1 < data.cols() ? "," : "");
        }
        if (data.has_labels()) out << "," << data.labels[i];
        out << "\n";
    }
}

void write_scores_csv(const std::string& path, const ScoreRows& rows) {
    std::ofstream out = open_out(path);
    out << "t,score,label\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << rows.t[i] << "," << format_double(rows.score[i]) << "," << rows.label[i] << "\n";
}

ScoreRows read_scores_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (trim(line) != "t,score,label")
        throw std::runtime_error(path + ": expected header 't,score,label'");
    ScoreRows rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 3 fields");
        rows.t.push_back(std::stol(trim(fields[0])));
        rows.score.push_back(parse_value(fields[1], path, line_no, "score"));
        rows.label.push_back(parse_label(fields[2], path, line_no));
    }
    return rows;
}

void write_truth_csv(const std::string& path, const std::vector<long>& t,
                     const std::vector<int>& labels) {
    std::ofstream out = open_out(path);
    out << "t,label\n";
    for (std::size_t i = 0; i < t.size(); ++i) out << t[i] << "," << labels[i] << "\n";
}

std::pair<std::vector<long>, std::vector<int>> read_truth_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    if (trim(line) != "t,label")
        throw std::runtime_error(path + ": expected header 't,label'");
    std::vector<long> t;
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 2)
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 2 fields");
        t.push_back(std::stol(trim(fields[0])));
        labels.push_back(parse_label(fields[1], path, line_no));
    }
    return {t, labels};
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& row_names,
                      const std::vector<std::string>& col_names) {
    std::ofstream out = open_out(path);
    if (!col_names.empty()) {
        if (!row_names.empty()) out << "";
        for (std::size_t j = 0; j < col_names.size(); ++j) {
            if (j > 0 || !row_names.empty()) out << ",";
            out << col_names[j];
        }
        out << "\n";
    }
    for (long i = 0; i < m.rows(); ++i) {
        if (!row_names.empty()) out << row_names[i] << ",";
        for (long j = 0; j < m.cols(); ++j) {
            out << format_double(m(i, j));
            out << (j + 1 < m.cols() ? "," : "");
        }
        out << "\n";
    }
}

}  // namespace tsad
