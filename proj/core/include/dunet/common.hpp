#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dunet {

// Error categories map 1:1 onto CLI exit codes (usage=2, io=3, format=4,
// validation=5).
enum class ErrorCategory { usage, io, format, validation };

const char* category_name(ErrorCategory c);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, std::string message)
        : std::runtime_error(std::move(message)), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const;

private:
    ErrorCategory category_;
};

[[noreturn]] void raise(ErrorCategory cat, const std::string& message);

// Deterministic PRNG (splitmix64 core). Distributions are implemented by
// hand so a given seed yields the same stream on every platform and stdlib.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derives an independent stream, e.g. per fold or per epoch.
    static Rng derive(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_double();                  // uniform [0, 1)
    double next_uniform(double lo, double hi);
    double next_normal();                  // standard normal, Box-Muller
    int next_int(int bound);               // uniform [0, bound), unbiased

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            int j = next_int(i + 1);
            std::swap(v[i], v[static_cast<std::size_t>(j)]);
        }
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dunet
