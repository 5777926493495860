#pragma once

#include <exception>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ecgscan/errors.hpp"
#include "ecgscan/paper_layout.hpp"
#include "ecgscan/preprocess.hpp"
#include "ecgscan/raster.hpp"
#include "ecgscan/reconstruct.hpp"
#include "ecgscan/row_detect.hpp"
#include "ecgscan/trace_extract.hpp"

namespace ecgscan {

inline constexpr const char* kDigitizeReportVersion = "ecgscan-digitize-1";

/// Optional hooks for inspecting intermediate results.
struct DigitizeDebug {
  std::function<void(int iteration, double threshold, const InkMask& mask)> on_iteration;
  /// Called once per band with the trace overlay of that band.
  std::function<void(int band, const RgbImage& overlay)> on_band_overlay;
};

struct DigitizeOptions {
  /// Page geometry. layout.dpi is not consulted; see dpi_override.
  PaperLayout layout;
  /// Forces px_per_mm = dpi / 25.4, ignoring image metadata.
  std::optional<double> dpi_override;
  double target_fs = 500.0;
  std::string row_detector = "projection";
  RowDetectConfig rows;
  GridRemovalConfig grid;
  TraceConfig trace;
  DigitizeDebug debug;
};

struct DigitizeResult {
  SignalSet signals;
  CoverageMap coverage;
  nlohmann::json report;
};

/// A pipeline stage failed. Carries the stage name, the report built so
/// far and the original exception.
class StageError : public Error {
 public:
  StageError(std::string stage, nlohmann::json partial_report, std::exception_ptr cause,
             const std::string& what)
      : Error(stage + ": " + what),
        stage_(std::move(stage)),
        report_(std::move(partial_report)),
        cause_(std::move(cause)) {}

  const std::string& stage() const noexcept { return stage_; }
  const nlohmann::json& report() const noexcept { return report_; }
  [[noreturn]] void rethrow_cause() const { std::rethrow_exception(cause_); }

 private:
  std::string stage_;
  nlohmann::json report_;
  std::exception_ptr cause_;
};

/// Grayscale conversion, grid removal, row detection, trace extraction and
/// calibration into a 12-lead record. px_per_mm comes from dpi_override,
/// else image metadata, else the detected grid period. Throws StageError.
DigitizeResult digitize(const RasterImage& gray, const DigitizeOptions& options = {});
DigitizeResult digitize(const RgbImage& rgb, const DigitizeOptions& options = {});

/// Small-square period of the printed grid, px; nullopt when no grid is
/// found.
std::optional<GridEstimate> estimate_grid_pitch(const RasterImage& gray,
                                                const GridDetectConfig& config = {});

/// Report coverage section: lead name -> list of [begin, end) sample pairs.
nlohmann::json coverage_to_json(const std::vector<std::string>& leads, const CoverageMap& coverage);
/// Inverse of coverage_to_json for the given lead order; absent leads are
/// unobserved.
CoverageMap coverage_from_json(const nlohmann::json& j, const std::vector<std::string>& leads,
                               std::size_t n_samples);

}  // namespace ecgscan
