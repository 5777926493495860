#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "run_config.hpp"

namespace ecgscan::cli {

enum ExitCode : int { kSuccess = 0, kFatal = 1, kPartialFailure = 2 };

/// Seed of one record: splitmix64(seed ^ fnv1a(name)).
std::uint64_t record_seed(std::uint64_t seed, std::string_view name);

/// Files of `dir` (or `path` itself) with the given extension, sorted.
std::vector<std::filesystem::path> list_inputs(const std::filesystem::path& path,
                                               std::string_view extension);

int cmd_gen_corpus(const RunConfig& config);
int cmd_render(const RunConfig& config);
int cmd_digitize(const RunConfig& config);
int cmd_evaluate(const RunConfig& config);
/// gen-corpus (unless input names a corpus), render, digitize and evaluate
/// under output/{corpus,images,digitized,evaluation}, then summary.json.
int cmd_roundtrip(const RunConfig& config);

}  // namespace ecgscan::cli
