#pragma once

#include "qkdmem/analysis.hpp"

namespace qkdmem {

// Invalid configs and malformed inputs map to exit code 2; anything thrown
// as a plain QkdError during a run maps to exit code 3.
struct ConfigError : QkdError {
    using QkdError::QkdError;
};

struct ExperimentConfig {
    std::string device_id;
    std::string protocol = "bb84";  // "bb84" | "example_protocol"
    ProtocolConfig bb84;            // bb84 parameters
    std::size_t n_pairs = 0;        // example_protocol parameters
    double gamma = 0.25;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> analyses;
    std::string out_path = "out";
    std::string format = "json";

    std::size_t protocol_rounds() const;
    void check() const;
    ordered_json to_json() const;  // fully resolved; round-trips via from_json
    static ExperimentConfig from_json(const ordered_json& j);
    static ExperimentConfig from_file(const std::string& path);
};

std::vector<std::string> known_analysis_ids();

// Trial i draws from an independent stream derived as trial_rng(seed, i);
// its transcript is invariant to the total trial count.
Transcript run_single_trial(const ExperimentConfig& cfg, std::uint64_t trial);

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<Transcript> transcripts;
    std::string transcripts_jsonl;
    ordered_json report;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Recomputes the requested analyses from stored transcripts alone; the batch
// must share one schema version and config hash.
ordered_json analyze_batch(const std::vector<std::string>& ids,
                           const std::vector<Transcript>& batch);

// Writes transcripts.jsonl plus report.json or report.csv under out_path.
void write_report_files(const ExperimentResult& r);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qkdmem
