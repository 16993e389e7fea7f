#pragma once

#include <map>
#include <string>
#include <vector>

#include "dsgda/sweep.hpp"

namespace dsgda {

// One SVG per measure: mean with a +-std band against the axis value, and the
// bound as a dashed overlay where one exists. Numeric axes switch to a log
// scale when they span a decade or more; topology axes are categorical.
std::map<std::string, std::string> svg_plots(const std::vector<OutputRow>& rows);

}  // namespace dsgda
