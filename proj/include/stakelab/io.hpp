#pragma once
// Result-file plumbing: RFC-4180 CSV (CRLF, header row, '.' decimal
// separator, 17 significant digits) and JSON run manifests.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace stakelab {

// Shortest-width exact decimal rendering would round-trip too, but a fixed
// %.17g keeps the byte layout independent of value-specific shortening.
std::string format_double(double x);

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

    static std::string cell(double x) { return format_double(x); }
    static std::string cell(std::int64_t x) { return std::to_string(x); }
    static std::string cell(const std::string& s);

  private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Canonical config hash: nlohmann serializes objects with sorted keys, so the
// hash depends only on semantic content.
std::uint64_t config_hash(const nlohmann::json& config);

// Manifest with config echo, hash, seed, software version and runtime. The
// runtime field is informational and excluded from reproducibility claims.
void write_manifest(const std::string& path, const nlohmann::json& config, std::uint64_t seed,
                    double runtime_seconds, const std::vector<std::string>& outputs);

nlohmann::json load_json_file(const std::string& path);

}  // namespace stakelab
