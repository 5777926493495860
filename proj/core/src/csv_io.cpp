#include <charconv>
#include <cmath>
#include <set>
#include <string>

#include "ecgscan/errors.hpp"
#include "ecgscan/wfdb_io.hpp"

namespace ecgscan {

namespace {

constexpr double kStepTolerance = 1e-6;

// RFC-4180 field splitting for one physical line (no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else if (after_quote) {
      throw FormatError("line " + std::to_string(line_no) + ": text after closing quote");
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw FormatError("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(field));
  return fields;
}

double parse_value(const std::string& token, int line_no) {
  std::string_view s = token;
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("line " + std::to_string(line_no) + ": bad number '" + token + "'");
  }
  return value;
}

std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

SignalSet read_csv(std::string_view text) {
  std::vector<std::string> header;
  std::vector<double> times;
  SignalSet out;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    auto fields = split_csv_line(line, line_no);
    if (header.empty()) {
      if (fields.size() < 2 || fields[0] != "time_s") {
        throw FormatError("line " + std::to_string(line_no) +
                          ": header must be 'time_s,LEAD1,...'");
      }
      header = std::move(fields);
      std::set<std::string> seen;
      for (std::size_t i = 1; i < header.size(); ++i) {
        if (!seen.insert(header[i]).second) {
          throw FormatError("duplicate lead column '" + header[i] + "'");
        }
        out.lead_names.push_back(header[i]);
      }
      out.samples.resize(out.lead_names.size());
      continue;
    }
    if (fields.size() != header.size()) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    times.push_back(parse_value(fields[0], line_no));
    for (std::size_t i = 1; i < fields.size(); ++i) {
      out.samples[i - 1].push_back(parse_value(fields[i], line_no));
    }
  }

  if (header.empty()) throw FormatError("empty CSV");
  if (times.size() < 2) throw FormatError("CSV needs at least two rows to infer sampling rate");

  const double step = times[1] - times[0];
  if (!(step > 0.0)) throw FormatError("time column must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dev = std::abs((times[i] - times[i - 1]) - step) / step;
    if (dev > kStepTolerance) {
      throw FormatError("non-uniform time step at row " + std::to_string(i + 1));
    }
  }
  double fs = 1.0 / step;
  // Printed times rarely reproduce 1/fs exactly; snap near-integer rates.
  if (std::abs(fs - std::round(fs)) <= 1e-9 * fs) fs = std::round(fs);
  out.sampling_hz = fs;
  out.validate();
  return out;
}

std::string write_csv(const SignalSet& signals) {
  signals.validate();
  std::string out = "time_s";
  for (const auto& name : signals.lead_names) {
    out += ',';
    out += quote_if_needed(name);
  }
  out += '\n';
  for (std::size_t s = 0; s < signals.n_samples(); ++s) {
    out += shortest(static_cast<double>(s) / signals.sampling_hz);
    for (std::size_t ch = 0; ch < signals.n_leads(); ++ch) {
      out += ',';
      out += shortest(signals.samples[ch][s]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ecgscan
