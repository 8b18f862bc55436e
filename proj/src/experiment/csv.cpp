#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "rssgp/experiment.hpp"

namespace rssgp {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int(const std::string& text) {
  int out = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad integer '" + text + "'");
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buffer, ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double out = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad number '" + text + "'");
  return out;
}

void write_trace_csv(std::ostream& out, int dim, const std::vector<TraceRow>& rows) {
  out << "trial,iteration";
  for (int i = 1; i <= dim; ++i) out << ",x_" << i;
  out << ",y,incumbent,regret,entropy,seconds\n";
  for (const TraceRow& row : rows) {
    if (static_cast<int>(row.x.size()) != dim) {
      throw std::invalid_argument("write_trace_csv: row dimension mismatch");
    }
    out << row.trial << ',' << row.iteration;
    for (double v : row.x) out << ',' << format_double(v);
    out << ',' << format_double(row.y) << ',' << format_double(row.incumbent) << ','
        << format_double(row.regret) << ',' << format_double(row.entropy) << ','
        << format_double(row.seconds) << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw std::invalid_argument("read_trace_csv: missing header");
  const std::vector<std::string> header = split(line);
  const int dim = static_cast<int>(header.size()) - 7;
  if (dim < 1 || header[0] != "trial" || header[1] != "iteration") {
    throw std::invalid_argument("read_trace_csv: unexpected header");
  }
  std::vector<TraceRow> rows;
  while (next_line(in, line)) {
    const std::vector<std::string> f = split(line);
    if (f.size() != header.size()) throw std::invalid_argument("read_trace_csv: ragged row");
    TraceRow row;
    row.trial = parse_int(f[0]);
    row.iteration = parse_int(f[1]);
    for (int i = 0; i < dim; ++i) row.x.push_back(parse_double(f[2 + i]));
    row.y = parse_double(f[2 + dim]);
    row.incumbent = parse_double(f[3 + dim]);
    row.regret = parse_double(f[4 + dim]);
    row.entropy = parse_double(f[5 + dim]);
    row.seconds = parse_double(f[6 + dim]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "arm,iteration,mean_regret,stderr\n";
  for (const AggregateRow& row : rows) {
    out << row.arm << ',' << row.iteration << ',' << format_double(row.mean_regret) << ','
        << format_double(row.std_error) << '\n';
  }
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::string line;
  if (!next_line(in, line) || line != "arm,iteration,mean_regret,stderr") {
    throw std::invalid_argument("read_aggregate_csv: unexpected header");
  }
  std::vector<AggregateRow> rows;
  while (next_line(in, line)) {
    const std::vector<std::string> f = split(line);
    if (f.size() != 4) throw std::invalid_argument("read_aggregate_csv: ragged row");
    rows.push_back({f[0], parse_int(f[1]), parse_double(f[2]), parse_double(f[3])});
  }
  return rows;
}

}  // namespace rssgp
