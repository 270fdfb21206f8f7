/**
 * @file svg.hpp
 * @brief Self-contained SVG charts. Coordinates are printed with fixed
 *        precision and no timestamps, so identical data gives identical bytes.
 */
#pragma once

#include "eigenmarket/histogram.hpp"

#include <string>
#include <utility>
#include <vector>

namespace eigenmarket::svg {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct BarHistogram {
    std::string name;
    Histogram histogram;
    std::string color = "#1f77b4";
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
};

/// Histogram bars, optionally overlaid with curves.
std::string histogram_chart(const Axes& axes, const std::vector<BarHistogram>& bars,
                            const std::vector<Series>& curves = {});

/// Point clouds, optionally with straight fit lines given as curves.
std::string scatter_chart(const Axes& axes, const std::vector<Series>& points,
                          const std::vector<Series>& lines = {});

std::string line_chart(const Axes& axes, const std::vector<Series>& lines);

/// One bar per value (e.g. eigenvector components) with dotted guides at
/// +threshold and -threshold when threshold > 0.
std::string bar_chart(const Axes& axes, const std::vector<double>& values, double threshold = 0.0);

}  // namespace eigenmarket::svg
