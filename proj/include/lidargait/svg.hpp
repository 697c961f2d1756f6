#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lidargait {

struct TrackPanel {
    std::string title;
    Eigen::VectorXd values;
    /// Draw 0.0 samples as missing markers on the axis instead of connecting through them.
    bool zero_is_missing = false;
};

/// Vertically stacked line panels sharing the frame axis, e.g. raw / corrected / smoothed.
std::string track_panels_svg(const std::string& title, const std::vector<TrackPanel>& panels);

/// Heat-map of a confusion matrix (rows truth, columns prediction) with counts in each cell.
std::string confusion_svg(const std::string& title, const std::vector<std::string>& labels,
                          const Eigen::MatrixXi& confusion);

} // namespace lidargait
