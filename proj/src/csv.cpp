#include "swingbench/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "swingbench/errors.hpp"

namespace swingbench {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + tmp.string());
    out << content;
    if (!out.good()) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw Error("rename failed for " + target.string() + ": " + ec.message());
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

std::string to_csv(const BodeTable<double>& table) {
  std::ostringstream out;
  out << "omega,sigma_max\n";
  for (Index k = 0; k < table.omega.size(); ++k) {
    out << format_number(table.omega(k)) << ',' << format_number(table.sigma(k)) << '\n';
  }
  return out.str();
}

std::string to_csv(const RootLocusTable<double>& table) {
  std::ostringstream out;
  out << "M,mode,re1,im1,re2,im2\n";
  for (const auto& row : table) {
    out << format_number(row.inertia) << ',' << row.mode << ',' << format_number(row.s1.real()) << ','
        << format_number(row.s1.imag()) << ',' << format_number(row.s2.real()) << ','
        << format_number(row.s2.imag()) << '\n';
  }
  return out.str();
}

std::string to_csv(const SweepTable<double>& table) {
  std::ostringstream out;
  out << "param,value,h2_closed,h2_oracle,hinf_closed,hinf_oracle,regime\n";
  for (const auto& row : table.rows) {
    out << table.param << ',' << format_number(row.value) << ',' << cell(row.h2_closed) << ','
        << cell(row.h2_oracle) << ',' << cell(row.hinf_closed) << ',' << cell(row.hinf_oracle) << ','
        << (row.hinf_closed ? regime_name(row.regime) : "") << '\n';
  }
  return out.str();
}

std::string to_csv(const std::vector<CombinedRow<double>>& rows) {
  std::ostringstream out;
  out << "M,h2_oracle,hinf_oracle\n";
  for (const auto& row : rows) {
    out << format_number(row.inertia) << ',' << format_number(row.h2) << ',' << format_number(row.hinf) << '\n';
  }
  return out.str();
}

}  // namespace swingbench
