#pragma once

#include <string>
#include <vector>

#include "tsad/preprocessing.hpp"
#include "tsad/types.hpp"

namespace tsad {

// CSV with a header row. A column named "label" (values 0/1 or
// Normal/Attack, case-insensitive) becomes the label vector; a column
// named "timestamp" is kept as text. Every other cell must parse as a
// finite number.
TimeSeriesMatrix read_time_series_csv(const std::string& path);

void write_time_series_csv(const std::string& path, const TimeSeriesMatrix& data);

// Score output: one row per scored instant, schema `t,score,label`.
struct ScoreRows {
    std::vector<long> t;
    std::vector<double> score;
    std::vector<int> label;

    std::size_t size() const { return t.size(); }
};

void write_scores_csv(const std::string& path, const ScoreRows& rows);
ScoreRows read_scores_csv(const std::string& path);

// Aligned ground truth, schema `t,label`.
void write_truth_csv(const std::string& path, const std::vector<long>& t,
                     const std::vector<int>& labels);
std::pair<std::vector<long>, std::vector<int>> read_truth_csv(const std::string& path);

// Plain numeric matrix with optional row/column headers (correlation
// exports and similar).
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& row_names = {},
                      const std::vector<std::string>& col_names = {});

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace tsad
