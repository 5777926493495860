#pragma once

// Reader/writer for a simplified WFDB header + format-16 signal file pair,
// plus the CSV interchange format.
//
// Header grammar (one record line, then one line per signal; '#' comments):
//
//   <record_name> <n_signals> <sampling_hz> <n_samples>
//   <file_name> 16 <gain ADU/mV> <adc_zero> <lead_name>
//
// Signal files hold 16-bit two's-complement little-endian samples,
// interleaved one frame (all leads) at a time.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecgscan/signal_set.hpp"

namespace ecgscan {

/// PTB stores 0.5 uV per ADC unit.
inline constexpr double kPtbGain = 2000.0;

struct LeadSpec {
  std::string file_name;
  int format_code = 16;
  double gain = kPtbGain;  ///< ADC units per mV
  int adc_zero = 0;
  std::string lead_name;
};

struct RecordHeader {
  std::string record_name;
  double sampling_hz = 0.0;
  std::size_t n_samples = 0;
  std::vector<LeadSpec> leads;

  std::size_t n_signals() const { return leads.size(); }
  void validate() const;
};

RecordHeader parse_header(std::string_view text);
std::string format_header(const RecordHeader& header);

struct SignalRead {
  SignalSet signals;
  /// Non-fatal findings, e.g. samples outside +/-16.384 mV.
  std::vector<std::string> warnings;
};

SignalRead read_signals(const RecordHeader& header, std::span<const std::uint8_t> bytes);

struct WrittenRecord {
  std::string header_text;
  std::vector<std::uint8_t> bytes;
};

/// Quantizes to round(mV * gain) with adc_zero 0. Throws RangeError if any
/// sample leaves the 16-bit range.
WrittenRecord write_record(const SignalSet& signals, double gain,
                           std::string_view record_name = "record");

SignalSet read_csv(std::string_view text);
std::string write_csv(const SignalSet& signals);

// Filesystem helpers. Record paths name the header; the signal file is
// resolved next to it.
SignalRead load_record(const std::filesystem::path& header_path);
void save_record(const SignalSet& signals, double gain, const std::filesystem::path& header_path);
SignalSet load_csv(const std::filesystem::path& path);
void save_csv(const SignalSet& signals, const std::filesystem::path& path);

/// Loads a .hea or .csv record by extension.
SignalSet load_signals(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace ecgscan
