#pragma once

#include <vector>

namespace dsgda {

double mean(const std::vector<double>& v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(const std::vector<double>& v);
// Average ranks, ties share the mean rank.
std::vector<double> ranks(const std::vector<double>& v);
// Pearson correlation of the ranks; NaN when either side is constant.
double spearman(const std::vector<double>& a, const std::vector<double>& b);
// Least-squares slope of y on x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dsgda
