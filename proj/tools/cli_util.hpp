#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dunet::cli {

std::string iso_timestamp_utc();

// DUNET_THREADS selects the default worker count (min 1).
int thread_count_from_env();

// Line-oriented `key = value` config files; blank lines and lines whose
// first non-space character is '#' are skipped. Underscores in keys are
// normalized to dashes so `max_epochs` and `max-epochs` both work.
std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path);

// Rewrites argv so config entries become `--key=value` tokens inserted
// right after the subcommand, before the user's own flags. Options take
// the last occurrence, so the command line overrides the file.
std::vector<std::string> expand_config_args(int argc, char** argv);

// Runs fn(i) for i in [0, n) across `threads` workers. Results must be
// written into index-addressed slots; the first exception (by index) is
// rethrown after all workers join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

struct Manifest {
    std::string command;
    std::string config_file;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string started_at;
    std::string finished_at;
};

void write_manifest(const Manifest& m, const std::filesystem::path& path);

}  // namespace dunet::cli
