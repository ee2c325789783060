#ifndef BHLAB_HARNESS_HPP
#define BHLAB_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bhlab {

/** Validated experiment configuration.  Configs are line-oriented
 *  `key = value` text with `#` comments; every key is checked against the
 *  experiment's schema (unknown keys rejected, ranges enforced) and
 *  defaults are filled in. */
struct ExperimentConfig {
    std::string experiment;
    std::map<std::string, double> num;
    std::uint64_t seed = 1;
    std::string output_dir;

    double get(const std::string& key) const;
    int get_int(const std::string& key) const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

std::vector<std::string> list_experiments();
/// Human-readable schema (key, range, default) plus the default config body.
std::string experiment_defaults_text(const std::string& name);

/** One verified inequality: `check` names it as a formula over the
 *  measured quantities. */
struct SummaryRow {
    std::string name;
    std::string check;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<SummaryRow> rows;
    std::vector<std::pair<std::string, std::string>> notes;  // fitted constants etc.
    std::vector<std::pair<std::string, std::string>> artifacts;  // extra files written

    bool passed() const;
};

/// Runs the named suite; throws on execution errors (bad state, resolution
/// aborts), returns the per-row outcomes otherwise.
ExperimentResult execute_experiment(const ExperimentConfig& cfg);

/** Executes and writes summary.txt, config_resolved.txt and series files
 *  into cfg.output_dir.  Exit status: 0 all contracts pass, 1 contract
 *  violation, 2 execution error.  Reruns with the same config and seed
 *  produce byte-identical summaries; wall-clock data goes to a separate
 *  metadata file. */
int run_experiment(const ExperimentConfig& cfg);

/// Worker count: BHLAB_WORKERS if set, otherwise hardware concurrency.
int worker_count();

/// Index-deterministic parallel map over [0, count).
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace bhlab

#endif
