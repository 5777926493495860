#include "ecgscan/wfdb_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "ecgscan/errors.hpp"
#include "ecgscan/leads.hpp"

namespace ecgscan {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, int line, const char* field) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(line, std::string("bad ") + field + " '" + std::string(token) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void RecordHeader::validate() const {
  if (leads.empty() || leads.size() > 12) {
    throw ValidationError("record must have 1..12 signals, got " + std::to_string(leads.size()));
  }
  if (!(sampling_hz > 0.0)) throw ValidationError("sampling rate must be positive");
  if (n_samples == 0) throw ValidationError("record has no samples");
  std::set<std::string> seen;
  for (const auto& lead : leads) {
    if (lead.format_code != 16) {
      throw UnsupportedFormatError("signal format " + std::to_string(lead.format_code) +
                                   " is not supported (only 16)");
    }
    if (!(lead.gain > 0.0)) throw ValidationError("lead '" + lead.lead_name + "' gain must be > 0");
    if (!is_standard_lead(lead.lead_name)) {
      throw ValidationError("'" + lead.lead_name + "' is not a standard 12-lead name");
    }
    if (!seen.insert(lead.lead_name).second) {
      throw ValidationError("duplicate lead '" + lead.lead_name + "'");
    }
  }
}

RecordHeader parse_header(std::string_view text) {
  RecordHeader header;
  bool have_record_line = false;
  std::size_t declared_signals = 0;
  std::set<std::string> seen;
  int line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto fields = split_ws(line);
    if (fields.empty() || fields.front().front() == '#') continue;

    if (!have_record_line) {
      if (fields.size() != 4) {
        throw ParseError(line_no, "record line needs 4 fields: name n_sig fs n_samples");
      }
      header.record_name = std::string(fields[0]);
      declared_signals = parse_number<std::size_t>(fields[1], line_no, "signal count");
      header.sampling_hz = parse_number<double>(fields[2], line_no, "sampling rate");
      header.n_samples = parse_number<std::size_t>(fields[3], line_no, "sample count");
      have_record_line = true;
      continue;
    }

    if (fields.size() != 5) {
      throw ParseError(line_no, "signal line needs 5 fields: file format gain adc_zero lead");
    }
    LeadSpec lead;
    lead.file_name = std::string(fields[0]);
    lead.format_code = parse_number<int>(fields[1], line_no, "format code");
    if (lead.format_code != 16) {
      throw UnsupportedFormatError("line " + std::to_string(line_no) + ": signal format " +
                                   std::to_string(lead.format_code) +
                                   " is not supported (only 16)");
    }
    lead.gain = parse_number<double>(fields[2], line_no, "gain");
    lead.adc_zero = parse_number<int>(fields[3], line_no, "adc_zero");
    auto canonical = canonical_lead_name(fields[4]);
    if (!canonical) {
      throw ValidationError("line " + std::to_string(line_no) + ": '" + std::string(fields[4]) +
                            "' is not a standard 12-lead name");
    }
    lead.lead_name = *canonical;
    if (!seen.insert(lead.lead_name).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate lead '" +
                            lead.lead_name + "'");
    }
    header.leads.push_back(std::move(lead));
  }

  if (!have_record_line) throw ParseError(line_no, "missing record line");
  if (declared_signals != header.leads.size()) {
    throw ValidationError("record line declares " + std::to_string(declared_signals) +
                          " signals but " + std::to_string(header.leads.size()) + " are listed");
  }
  header.validate();
  return header;
}

std::string format_header(const RecordHeader& header) {
  std::ostringstream os;
  os << header.record_name << ' ' << header.leads.size() << ' ' << format_double(header.sampling_hz)
     << ' ' << header.n_samples << '\n';
  for (const auto& lead : header.leads) {
    os << lead.file_name << ' ' << lead.format_code << ' ' << format_double(lead.gain) << ' '
       << lead.adc_zero << ' ' << lead.lead_name << '\n';
  }
  return os.str();
}

SignalRead read_signals(const RecordHeader& header, std::span<const std::uint8_t> bytes) {
  header.validate();
  const std::size_t n_sig = header.n_signals();
  const std::size_t expected = 2 * n_sig * header.n_samples;
  if (bytes.size() != expected) {
    throw TruncationError("signal data has " + std::to_string(bytes.size()) + " bytes, expected " +
                          std::to_string(expected));
  }

  SignalRead out;
  out.signals.sampling_hz = header.sampling_hz;
  out.signals.samples.assign(n_sig, std::vector<double>(header.n_samples));
  for (const auto& lead : header.leads) out.signals.lead_names.push_back(lead.lead_name);

  std::vector<std::size_t> out_of_range(n_sig, 0);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < header.n_samples; ++s) {
    for (std::size_t ch = 0; ch < n_sig; ++ch) {
      const auto lo = static_cast<std::uint16_t>(bytes[offset]);
      const auto hi = static_cast<std::uint16_t>(bytes[offset + 1]);
      offset += 2;
      const auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
      const auto& spec = header.leads[ch];
      const double mv = (static_cast<double>(raw) - spec.adc_zero) / spec.gain;
      if (std::abs(mv) > kRecordRangeMv) ++out_of_range[ch];
      out.signals.samples[ch][s] = mv;
    }
  }
  for (std::size_t ch = 0; ch < n_sig; ++ch) {
    if (out_of_range[ch] > 0) {
      out.warnings.push_back("lead " + header.leads[ch].lead_name + ": " +
                             std::to_string(out_of_range[ch]) +
                             " samples exceed +/-16.384 mV");
    }
  }
  return out;
}

WrittenRecord write_record(const SignalSet& signals, double gain, std::string_view record_name) {
  if (!(gain > 0.0)) throw ValidationError("gain must be positive");
  signals.validate();

  RecordHeader header;
  header.record_name = std::string(record_name);
  header.sampling_hz = signals.sampling_hz;
  header.n_samples = signals.n_samples();
  const std::string file_name = header.record_name + ".dat";
  for (const auto& name : signals.lead_names) {
    LeadSpec lead;
    lead.file_name = file_name;
    lead.gain = gain;
    lead.lead_name = canonical_lead_name(name).value_or(name);
    header.leads.push_back(std::move(lead));
  }
  header.validate();

  WrittenRecord out;
  out.header_text = format_header(header);
  out.bytes.resize(2 * signals.n_leads() * signals.n_samples());
  std::size_t offset = 0;
  for (std::size_t s = 0; s < signals.n_samples(); ++s) {
    for (std::size_t ch = 0; ch < signals.n_leads(); ++ch) {
      const double scaled = signals.samples[ch][s] * gain;
      if (!std::isfinite(scaled) || std::round(scaled) < -32768.0 ||
          std::round(scaled) > 32767.0) {
        throw RangeError("lead " + signals.lead_names[ch] + " sample " + std::to_string(s) +
                         " does not fit a 16-bit sample at gain " + format_double(gain));
      }
      const auto raw = static_cast<std::int16_t>(std::lround(scaled));
      const auto bits = static_cast<std::uint16_t>(raw);
      out.bytes[offset] = static_cast<std::uint8_t>(bits & 0xff);
      out.bytes[offset + 1] = static_cast<std::uint8_t>(bits >> 8);
      offset += 2;
    }
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

SignalRead load_record(const std::filesystem::path& header_path) {
  const RecordHeader header = parse_header(read_text_file(header_path));
  const std::string& file_name = header.leads.front().file_name;
  for (const auto& lead : header.leads) {
    if (lead.file_name != file_name) {
      throw UnsupportedFormatError("multi-file records are not supported");
    }
  }
  const auto bytes = read_binary_file(header_path.parent_path() / file_name);
  return read_signals(header, bytes);
}

void save_record(const SignalSet& signals, double gain, const std::filesystem::path& header_path) {
  const auto record = write_record(signals, gain, header_path.stem().string());
  write_text_file(header_path, record.header_text);
  write_binary_file(header_path.parent_path() / (header_path.stem().string() + ".dat"),
                    record.bytes);
}

SignalSet load_csv(const std::filesystem::path& path) { return read_csv(read_text_file(path)); }

void save_csv(const SignalSet& signals, const std::filesystem::path& path) {
  write_text_file(path, write_csv(signals));
}

SignalSet load_signals(const std::filesystem::path& path) {
  if (path.extension() == ".hea") return load_record(path).signals;
  if (path.extension() == ".csv") return load_csv(path);
  throw UnsupportedFormatError("unrecognized record file '" + path.string() + "'");
}

}  // namespace ecgscan
