#include "profil/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace modchain {

namespace {

std::string fmt3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

}  // namespace

std::string format_report(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "condition,metric,value,ci_lo,ci_hi,method,n\n";
  for (const MetricRow& r : rows) {
    out << r.condition << ',' << r.metric << ',' << fmt3(r.value) << ',';
    if (r.ci) {
      out << fmt3(r.ci->lo) << ',' << fmt3(r.ci->hi) << ','
          << (r.ci->method == Interval::Method::Wilson ? "wilson" : "bootstrap");
    } else {
      out << ",,";
    }
    out << ',' << r.n << '\n';
  }
  return out.str();
}

void emit_report(const std::vector<MetricRow>& rows, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("emit_report: cannot open '" + tmp + "'");
    out << format_report(rows);
    if (!out) throw std::runtime_error("emit_report: write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("emit_report: rename to '" + path + "' failed");
}

}  // namespace modchain
