#include "cli_util.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dunet/common.hpp"
#include "dunet/version.hpp"

namespace dunet::cli {

std::string iso_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int thread_count_from_env() {
    const char* v = std::getenv("DUNET_THREADS");
    if (!v || !*v) return 1;
    const int n = std::atoi(v);
    return n >= 1 ? n : 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

std::vector<std::pair<std::string, std::string>> parse_config_file(
    const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCategory::io, "cannot open config file " + path.string());
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t ln = 0;
    auto trim = [](std::string s) {
        const std::size_t b = s.find_first_not_of(" \t");
        if (b == std::string::npos) return std::string();
        const std::size_t e = s.find_last_not_of(" \t");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            raise(ErrorCategory::usage, path.string() + ":" + std::to_string(ln) +
                                            ": expected `key = value`");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            raise(ErrorCategory::usage,
                  path.string() + ":" + std::to_string(ln) + ": empty key");
        for (char& c : key)
            if (c == '_') c = '-';
        entries.emplace_back(std::move(key), std::move(value));
    }
    return entries;
}

std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return args;

    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::vector<std::string> out;
    out.push_back(args[0]);  // subcommand
    for (const auto& [key, value] : parse_config_file(config_path))
        out.push_back("--" + key + "=" + value);
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    nlohmann::json j;
    j["command"] = m.command;
    j["config_file"] = m.config_file;
    j["parameters"] = m.parameters;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    j["tool_version"] = std::string(kToolName) + " " + kVersion;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCategory::io, "cannot write " + path.string());
    out << j.dump(2) << "\n";
}

}  // namespace dunet::cli
