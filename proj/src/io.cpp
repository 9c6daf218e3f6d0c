#include "stakelab/io.hpp"

#include <cstdio>
#include <stdexcept>

#include "stakelab/version.hpp"

namespace stakelab {

std::string format_double(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void CsvWriter::header(const std::vector<std::string>& names) {
    columns_ = names.size();
    row(names);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (columns_ != 0 && cells.size() != columns_)
        throw std::invalid_argument("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << "\r\n";
}

std::string CsvWriter::cell(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t config_hash(const nlohmann::json& config) { return fnv1a64(config.dump()); }

void write_manifest(const std::string& path, const nlohmann::json& config, std::uint64_t seed,
                    double runtime_seconds, const std::vector<std::string>& outputs) {
    nlohmann::json m;
    m["config"] = config;
    char hex[19];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    m["config_hash"] = hex;
    m["master_seed"] = seed;
    m["software_version"] = STAKELAB_VERSION;
    m["runtime_seconds"] = runtime_seconds;
    m["outputs"] = outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << m.dump(2) << "\n";
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

}  // namespace stakelab
