#include "refpot/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "refpot/fingerprint.hpp"

namespace refpot::io {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

std::string fmt_log(double log_abs, int sign) {
    if (sign == 0 || log_abs < -1e290) return "0";
    const double l10 = log_abs / std::log(10.0);
    double e10 = std::floor(l10);
    double mant = std::pow(10.0, l10 - e10);
    if (mant >= 10.0) {  // rounding spill
        mant /= 10.0;
        e10 += 1.0;
    }
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%.11fe%+ld", sign < 0 ? "-" : "", mant,
                  static_cast<long>(e10));
    return buf;
}

std::string RunManifest::fingerprint() const {
    return to_hex(fnv1a64(tool + "|" + subcommand + "|" + config_fingerprint + "|" + options));
}

Csv::Csv(const std::string& path, const RunManifest& manifest,
         const std::vector<std::string>& columns)
    : out_(path) {
    if (!out_) throw std::runtime_error("cannot open output file: " + path);
    out_ << "# " << manifest.tool << " " << manifest.subcommand
         << " manifest=" << manifest.fingerprint() << " config=" << manifest.config_fingerprint
         << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
}

void Csv::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 == cells.size() ? "\n" : ",");
}

Csv::~Csv() = default;

}  // namespace refpot::io
