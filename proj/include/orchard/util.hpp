#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace orchard {

std::string trim(const std::string& s);
std::vector<std::string> split_ws(const std::string& line);
std::vector<std::string> split_char(const std::string& line, char sep);

// Strict numeric parsing: the whole token must be consumed.
std::optional<double> parse_double(const std::string& tok);
std::optional<long long> parse_int(const std::string& tok);

// %g with a given number of significant digits, C locale.
std::string format_g(double v, int significant_digits = 12);
// Fixed-point with a given number of decimals, C locale.
std::string format_f(double v, int decimals);

std::string read_text_file(const std::filesystem::path& path);
// Writes to <path>.tmp then renames over the target.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& content);

// Deterministic sampling helpers on top of mt19937_64. The engine itself is
// bit-exact across platforms; std:: distributions are not, so we roll our own.
double uniform_unit(std::mt19937_64& rng);                          // [0, 1)
double uniform_range(std::mt19937_64& rng, double lo, double hi);   // [lo, hi)
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n); // [0, n)

template <typename T>
void shuffle_deterministic(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

// Derives an independent stream seed from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Fixed-aspect resize rule: scale = min(min_dim / min(w,h), max_dim / max(w,h)).
double resize_scale(double width, double height, double min_dim = 600.0, double max_dim = 1024.0);

} // namespace orchard
