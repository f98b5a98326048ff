#pragma once

#include <string>
#include <vector>

#include "lqm/trace.hpp"

namespace lqm {

/// Renders one link's cumulative curves (top panel) and queue length
/// (bottom panel) as a standalone SVG document. Deterministic output.
std::string render_link_svg(const TraceSet& trace, LinkId link);

/// Writes one SVG per requested link (all links when empty) into out_dir,
/// named link_<id>.svg. Returns the written paths.
std::vector<std::string> write_link_plots(const TraceSet& trace, const std::string& out_dir,
                                          const std::vector<LinkId>& links = {});

}  // namespace lqm
