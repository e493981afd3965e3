#pragma once

#include <cstdint>
#include <vector>

namespace desclab {

struct SummaryStats {
    int64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance, denominator n-1
    double std_error = 0.0; // NaN when n < 2
    double min = 0.0;
    double max = 0.0;
};

SummaryStats summarize(const std::vector<double>& values);

// p-th raw moment of a sample
double raw_moment(const std::vector<double>& values, double p);

// empirical quantile by linear interpolation of the order statistics
double quantile(std::vector<double> values, double q);

// sup distance between the two empirical CDFs; inputs must be sorted
double two_sample_ks(const std::vector<double>& a, const std::vector<double>& b);

struct ChiSquareResult {
    double statistic = 0.0;
    int64_t dof = 0;
    double p_value = 1.0;
};

// Pearson statistic against expected cell counts; adjacent cells are pooled
// until every expected count reaches min_expected
ChiSquareResult chi_square(const std::vector<int64_t>& observed,
                           const std::vector<double>& expected,
                           double min_expected = 5.0);

} // namespace desclab
