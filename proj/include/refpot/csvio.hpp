#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace refpot::io {

/// Fixed 12-significant-digit scientific formatting (deterministic bytes).
std::string fmt(double x);

/// Value given as ln|x| with sign, rendered as mantissa/exponent even when
/// the exponent is far outside double range (e.g. 2.3e-10317).
std::string fmt_log(double log_abs, int sign = 1);

struct RunManifest {
    std::string tool = "refpot 1.0.0";
    std::string subcommand;
    std::string config_path;
    std::string config_fingerprint;
    std::string options;  // canonical key=value list
    std::string fingerprint() const;
};

/// CSV writer with a manifest/fingerprint comment header and a units row.
class Csv {
public:
    Csv(const std::string& path, const RunManifest& manifest,
        const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    ~Csv();

private:
    std::ofstream out_;
};

}  // namespace refpot::io
