#include "uplan/render.hpp"

#include <array>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "uplan/errors.hpp"

namespace uplan {
namespace {

constexpr int kCell = 24;
constexpr double kCanvas = 480.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#9467bd", "#8c564b",
                                                 "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

template <typename Env, typename Trace>
void write_file(const Env& env, const Trace& trace, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  render_svg(os, env, trace);
  os.flush();
  if (!os) throw Error("failed writing " + path.string());
}

}  // namespace

void render_svg(std::ostream& os, const GridEnv& env, const PlanTrace& trace) {
  const int w = env.width();
  const int h = env.height();
  auto px = [&](Cell c) { return c.x * kCell; };
  auto py = [&](Cell c) { return (h - 1 - c.y) * kCell; };
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * kCell << "\" height=\"" << h * kCell
     << "\" viewBox=\"0 0 " << w * kCell << ' ' << h * kCell << "\">\n";
  os << "<rect class=\"obstacle\" x=\"0\" y=\"0\" width=\"" << w * kCell << "\" height=\"" << h * kCell
     << "\" fill=\"#888888\"/>\n";
  for (Cell c : env.free_cells()) {
    os << "<rect class=\"free\" x=\"" << px(c) << "\" y=\"" << py(c) << "\" width=\"" << kCell << "\" height=\""
       << kCell << "\" fill=\"#ffffff\" stroke=\"#dddddd\"/>\n";
  }
  const std::set<Cell> visited(trace.states.begin(), trace.states.end());
  for (Cell c : visited) {
    os << "<rect class=\"visited\" x=\"" << px(c) << "\" y=\"" << py(c) << "\" width=\"" << kCell
       << "\" height=\"" << kCell << "\" fill=\"#cfe3ff\"/>\n";
  }
  for (Cell g : env.goals()) {
    os << "<rect class=\"goal-marker\" x=\"" << px(g) + 4 << "\" y=\"" << py(g) + 4 << "\" width=\"" << kCell - 8
       << "\" height=\"" << kCell - 8 << "\" fill=\"#2ca02c\"/>\n";
  }
  if (trace.states.size() > 1) {
    os << "<polyline class=\"path\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
      if (i > 0 && trace.states[i] == trace.states[i - 1]) continue;
      os << px(trace.states[i]) + kCell / 2 << ',' << py(trace.states[i]) + kCell / 2 << ' ';
    }
    os << "\"/>\n";
  }
  const Cell s = trace.states.empty() ? env.start() : trace.states.front();
  os << "<circle class=\"start-marker\" cx=\"" << px(s) + kCell / 2 << "\" cy=\"" << py(s) + kCell / 2
     << "\" r=\"" << kCell / 4 << "\" fill=\"#d62728\"/>\n";
  os << "</svg>\n";
}

void render_svg(std::ostream& os, const ContinuousEnv& env, const ContinuousTrace& trace) {
  const double width = env.width().get_d();
  const double height = env.height().get_d();
  const double scale = kCanvas / std::max(width, height);
  auto sx = [&](double x) { return x * scale; };
  auto sy = [&](double y) { return (height - y) * scale; };
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << sx(width) << "\" height=\"" << height * scale
     << "\" viewBox=\"0 0 " << sx(width) << ' ' << height * scale << "\">\n";
  os << "<rect class=\"free\" x=\"0\" y=\"0\" width=\"" << sx(width) << "\" height=\"" << height * scale
     << "\" fill=\"#ffffff\" stroke=\"#444444\"/>\n";
  for (const Disc& d : env.obstacles()) {
    os << "<circle class=\"obstacle\" cx=\"" << sx(d.cx.get_d()) << "\" cy=\"" << sy(d.cy.get_d()) << "\" r=\""
       << d.radius.get_d() * scale << "\" fill=\"#888888\"/>\n";
  }
  os << "<circle class=\"goal-marker\" cx=\"" << sx(env.goal_center().x.get_d()) << "\" cy=\""
     << sy(env.goal_center().y.get_d()) << "\" r=\"" << env.goal_radius().get_d() * scale
     << "\" fill=\"#2ca02c\" fill-opacity=\"0.5\"/>\n";

  const ExactFrame frame(env, trace.start, trace.unit);
  std::ostringstream line;
  unsigned current = 0;
  bool open = false;
  auto point = [&](const DyadicPoint& p) {
    const RationalPoint q = frame.to_point(p);
    line << sx(q.x.get_d()) << ',' << sy(q.y.get_d()) << ' ';
  };
  auto close = [&] {
    if (!open) return;
    os << "<polyline class=\"path e" << current << "\" fill=\"none\" stroke=\"" << kPalette[current % kPalette.size()]
       << "\" stroke-width=\"1\" points=\"" << line.str() << "\"/>\n";
    line.str({});
    open = false;
  };
  for (std::size_t i = 0; i < trace.steps.size() && i + 1 < trace.points.size(); ++i) {
    const auto& step = trace.steps[i];
    if (step.blocked) continue;
    if (open && step.exponent != current) close();
    if (!open) {
      current = step.exponent;
      open = true;
      point(trace.points[i]);
    }
    point(trace.points[i + 1]);
  }
  close();
  const RationalPoint& s = trace.start;
  os << "<circle class=\"start-marker\" cx=\"" << sx(s.x.get_d()) << "\" cy=\"" << sy(s.y.get_d())
     << "\" r=\"4\" fill=\"#d62728\"/>\n";
  os << "</svg>\n";
}

void render_trace_svg(const GridEnv& env, const PlanTrace& trace, const std::filesystem::path& path) {
  write_file(env, trace, path);
}

void render_trace_svg(const ContinuousEnv& env, const ContinuousTrace& trace, const std::filesystem::path& path) {
  write_file(env, trace, path);
}

}  // namespace uplan
