#pragma once

// SVG pictures of environments and traces.

#include <filesystem>
#include <iosfwd>

#include "uplan/gridworld.hpp"
#include "uplan/scalefree.hpp"

namespace uplan {

/// Obstacles grey, free cells white, visited cells tinted (class "visited"),
/// the state sequence as a polyline, the start as a red circle (class
/// "start-marker") and every goal as a green square (class "goal-marker").
void render_svg(std::ostream& os, const GridEnv& env, const PlanTrace& trace);

/// Discs grey, the goal ball green, the start red; moves drawn as polylines
/// grouped by step-size exponent, one colour per exponent.
void render_svg(std::ostream& os, const ContinuousEnv& env, const ContinuousTrace& trace);

void render_trace_svg(const GridEnv& env, const PlanTrace& trace, const std::filesystem::path& path);
void render_trace_svg(const ContinuousEnv& env, const ContinuousTrace& trace, const std::filesystem::path& path);

}  // namespace uplan
