#pragma once

// One training configuration end to end: data (generated in memory or read
// from a `generate` directory), model, run settings and the provenance that
// goes into every CSV row.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "sigt/cli/config.hpp"
#include "sigt/model/factory.hpp"
#include "sigt/train/trainer.hpp"

namespace sigt::cli {

const char* commit_id();

struct ExperimentSpec {
  std::string name = "run";
  GenerationParams gen;
  std::optional<std::filesystem::path> data_dir;  // else generate from `gen`
  ModelConfig model;
  RunConfig run;
  std::string receiver;  // classic|zf|mmse replaces the trained model; empty otherwise
};

/// Every setting that influences results, as ordered key/value pairs.
/// Excludes the run name, paths and the seed (reported separately).
KeyValues describe(const ExperimentSpec& spec);
std::uint64_t config_hash(const ExperimentSpec& spec);

/// Manifest written next to generated datasets.
KeyValues dataset_manifest(const GenerationParams& gen);
GenerationParams read_manifest(const std::filesystem::path& dir);

struct DataSplits {
  Dataset train;
  Dataset test;
};

/// With data_dir set, spec.gen is replaced by the directory's manifest and
/// both files are checked against it. Throws DataError on any mismatch.
DataSplits load_data(ExperimentSpec& spec);

void check_frame(const Dataset& ds, const FrameConfig& frame, const std::string& what);

/// Final and best metrics of one or more replicate runs of a configuration.
struct Summary {
  std::string run_id;
  ExperimentSpec spec;
  std::size_t seeds = 1;
  double train_aacc = 0.0;
  double test_aacc = 0.0;
  double best_test_aacc = 0.0;
  std::string status = "ok";
};

std::vector<std::string> summary_header();
std::vector<std::string> summary_row(const Summary& s);

std::vector<std::string> metrics_header();
std::vector<std::string> metrics_row(const std::string& run_id, const ExperimentSpec& spec, const EpochMetrics& m);

}  // namespace sigt::cli
