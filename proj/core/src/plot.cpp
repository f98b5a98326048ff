#include "lqm/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lqm {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Panel {
  double x0, y0, width, height;  // plot area in svg coordinates
  double xmax, ymax;             // data ranges (mins are 0)

  double sx(double x) const { return x0 + (xmax > 0 ? x / xmax : 0.0) * width; }
  double sy(double y) const { return y0 + height - (ymax > 0 ? y / ymax : 0.0) * height; }
};

void polyline(std::ostringstream& os, const Panel& p, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* color) {
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    os << num(p.sx(xs[i])) << ',' << num(p.sy(ys[i])) << ' ';
  }
  os << "\"/>\n";
}

void frame(std::ostringstream& os, const Panel& p, const std::string& title,
           const std::string& y_label) {
  os << "<rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << num(p.width)
     << "\" height=\"" << num(p.height) << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << num(p.x0) << "\" y=\"" << num(p.y0 - 6) << "\" font-size=\"12\">" << title
     << "</text>\n";
  os << "<text x=\"" << num(p.x0 - 34) << "\" y=\"" << num(p.y0 + 12) << "\" font-size=\"10\">"
     << y_label << "</text>\n";
  os << "<text x=\"" << num(p.x0 + p.width - 30) << "\" y=\"" << num(p.y0 + p.height + 14)
     << "\" font-size=\"10\">" << num(p.xmax) << " s</text>\n";
}

}  // namespace

std::string render_link_svg(const TraceSet& trace, LinkId link) {
  const auto cum_in = trace.series(link, "cum_in");
  const auto cum_queue = trace.series(link, "cum_queue");
  const auto cum_out = trace.series(link, "cum_out");
  const auto queue_len = trace.series(link, "queue_len");
  if (cum_in.empty()) throw std::invalid_argument("plot: link not in trace");

  std::vector<double> times(cum_in.size());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = (static_cast<double>(i) + 1) * trace.dt;

  const double t_max = times.back();
  const double n_max = std::max(1e-9, *std::max_element(cum_in.begin(), cum_in.end()));
  const double l_max = std::max(1e-9, *std::max_element(queue_len.begin(), queue_len.end()));

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
        "viewBox=\"0 0 640 480\">\n";
  os << "<text x=\"20\" y=\"20\" font-size=\"14\">link " << link << "</text>\n";

  Panel top{60, 40, 540, 180, t_max, n_max};
  frame(os, top, "cumulative counts (veh)", num(n_max));
  polyline(os, top, times, cum_in, "#1f77b4");
  polyline(os, top, times, cum_queue, "#2ca02c");
  polyline(os, top, times, cum_out, "#d62728");
  os << "<text x=\"66\" y=\"56\" font-size=\"10\" fill=\"#1f77b4\">in</text>\n"
     << "<text x=\"86\" y=\"56\" font-size=\"10\" fill=\"#2ca02c\">queue</text>\n"
     << "<text x=\"126\" y=\"56\" font-size=\"10\" fill=\"#d62728\">out</text>\n";

  Panel bottom{60, 280, 540, 160, t_max, l_max};
  frame(os, bottom, "queue length (m)", num(l_max));
  polyline(os, bottom, times, queue_len, "#9467bd");

  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> write_link_plots(const TraceSet& trace, const std::string& out_dir,
                                          const std::vector<LinkId>& links) {
  std::filesystem::create_directories(out_dir);
  const std::vector<LinkId> targets = links.empty() ? trace.link_ids() : links;
  std::vector<std::string> written;
  for (LinkId link : targets) {
    const std::string path = out_dir + "/link_" + std::to_string(link) + ".svg";
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << render_link_svg(trace, link);
    written.push_back(path);
  }
  return written;
}

}  // namespace lqm
