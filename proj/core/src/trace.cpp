#include "lqm/trace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lqm {

const std::vector<std::string> kTraceQuantities = {
    "cum_in", "cum_queue", "cum_out", "rate_in", "rate_out", "queue_len", "queue_density"};

namespace {

double field(const TraceRow& row, const std::string& quantity) {
  if (quantity == "cum_in") return row.cum_in;
  if (quantity == "cum_queue") return row.cum_queue;
  if (quantity == "cum_out") return row.cum_out;
  if (quantity == "rate_in") return row.rate_in;
  if (quantity == "rate_out") return row.rate_out;
  if (quantity == "queue_len") return row.queue_len;
  if (quantity == "queue_density") return row.queue_density;
  throw std::invalid_argument("unknown trace quantity: " + quantity);
}

}  // namespace

std::vector<LinkId> TraceSet::link_ids() const {
  std::set<LinkId> ids;
  for (const auto& row : rows) ids.insert(row.link);
  return {ids.begin(), ids.end()};
}

Step TraceSet::max_step() const {
  Step m = 0;
  for (const auto& row : rows) m = std::max(m, row.step);
  return m;
}

std::vector<double> TraceSet::series(LinkId link, const std::string& quantity) const {
  std::vector<std::pair<Step, double>> picked;
  for (const auto& row : rows) {
    if (row.link == link) picked.emplace_back(row.step, field(row, quantity));
  }
  std::sort(picked.begin(), picked.end());
  std::vector<double> out;
  out.reserve(picked.size());
  for (const auto& [step, value] : picked) out.push_back(value);
  return out;
}

double epsilon(const std::vector<double>& x, const std::vector<double>& psi) {
  if (x.size() != psi.size()) throw std::invalid_argument("epsilon: series length mismatch");
  if (x.empty()) throw std::invalid_argument("epsilon: empty series");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - psi[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(x.size()));
}

ComparisonReport compare_traces(const TraceSet& a, const TraceSet& b,
                                const std::vector<std::string>& quantities) {
  const auto links_a = a.link_ids();
  const auto links_b = b.link_ids();
  if (links_a != links_b) throw std::invalid_argument("compare: traces cover different links");
  if (a.max_step() != b.max_step()) throw std::invalid_argument("compare: step grids differ");
  if (a.dt != b.dt) throw std::invalid_argument("compare: dt differs");

  ComparisonReport report;
  report.quantities = quantities;
  std::vector<double> sums(quantities.size(), 0.0), sq(quantities.size(), 0.0);
  for (LinkId link : links_a) {
    std::vector<double> eps;
    eps.reserve(quantities.size());
    for (std::size_t q = 0; q < quantities.size(); ++q) {
      const double e = epsilon(a.series(link, quantities[q]), b.series(link, quantities[q]));
      eps.push_back(e);
      sums[q] += e;
      sq[q] += e * e;
    }
    report.per_link[link] = std::move(eps);
  }
  const double n = static_cast<double>(links_a.size());
  report.mean.resize(quantities.size());
  report.stddev.resize(quantities.size());
  for (std::size_t q = 0; q < quantities.size(); ++q) {
    report.mean[q] = sums[q] / n;
    const double var = sq[q] / n - report.mean[q] * report.mean[q];
    report.stddev[q] = std::sqrt(std::max(0.0, var));
  }
  return report;
}

std::string ComparisonReport::to_table() const {
  std::ostringstream os;
  os << std::setw(8) << "link";
  for (const auto& q : quantities) os << std::setw(14) << q;
  os << "\n";
  os << std::fixed << std::setprecision(6);
  for (const auto& [link, eps] : per_link) {
    os << std::setw(8) << link;
    for (double e : eps) os << std::setw(14) << e;
    os << "\n";
  }
  os << std::setw(8) << "mean";
  for (double e : mean) os << std::setw(14) << e;
  os << "\n" << std::setw(8) << "stddev";
  for (double e : stddev) os << std::setw(14) << e;
  os << "\n";
  return os.str();
}

}  // namespace lqm
