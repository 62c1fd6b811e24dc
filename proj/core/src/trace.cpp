#include "manial/trace.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace manial {

const char* const kTraceCsvHeader =
    "k,oracle_calls,wall_seconds,objective,eta_p,eta_d,eta_C,sigma,beta,z_norm,"
    "inner_iters,flags,prox_calls,retraction_calls";

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE)
    throw std::runtime_error("trace parse error at line " + std::to_string(line) +
                             ": bad number '" + field + "'");
  return v;
}

long parse_long(const std::string& field, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (end == field.c_str() || *end != '\0' || errno == ERANGE)
    throw std::runtime_error("trace parse error at line " + std::to_string(line) +
                             ": bad integer '" + field + "'");
  return v;
}

}  // namespace

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows,
                     bool include_timing) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
  out << kTraceCsvHeader << '\n';
  for (const TraceRecord& r : rows) {
    if (r.flags.find(',') != std::string::npos)
      throw std::invalid_argument("trace flags must not contain commas: " + r.flags);
    out << r.k << ',' << r.oracle_calls << ','
        << format_double(include_timing ? r.wall_seconds : 0.0) << ','
        << format_double(r.objective) << ',' << format_double(r.eta_p) << ','
        << format_double(r.eta_d) << ',' << format_double(r.eta_c) << ','
        << format_double(r.sigma) << ',' << format_double(r.beta) << ','
        << format_double(r.z_norm) << ',' << r.inner_iters << ',' << r.flags << ','
        << r.prox_calls << ',' << r.retraction_calls << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace parse error: empty file " + path);
  if (line == std::string(kTraceCsvHeader) + "\r") line.pop_back();
  if (line != kTraceCsvHeader)
    throw std::runtime_error("trace parse error at line 1: unexpected header '" + line + "'");
  std::vector<TraceRecord> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 14)
      throw std::runtime_error("trace parse error at line " + std::to_string(lineno) +
                               ": expected 14 fields, got " + std::to_string(fields.size()));
    TraceRecord r;
    r.k = parse_long(fields[0], lineno);
    r.oracle_calls = parse_long(fields[1], lineno);
    r.wall_seconds = parse_double(fields[2], lineno);
    r.objective = parse_double(fields[3], lineno);
    r.eta_p = parse_double(fields[4], lineno);
    r.eta_d = parse_double(fields[5], lineno);
    r.eta_c = parse_double(fields[6], lineno);
    r.sigma = parse_double(fields[7], lineno);
    r.beta = parse_double(fields[8], lineno);
    r.z_norm = parse_double(fields[9], lineno);
    r.inner_iters = parse_long(fields[10], lineno);
    r.flags = fields[11];
    r.prox_calls = parse_long(fields[12], lineno);
    r.retraction_calls = parse_long(fields[13], lineno);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace manial
