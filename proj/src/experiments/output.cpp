#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "rpoly/error.hpp"
#include "rpoly/experiments.hpp"

namespace rpoly {

namespace {

std::string fmt17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_number(const std::optional<double>& x) { return x && std::isfinite(*x) ? fmt17(*x) : ""; }

void dump(const nlohmann::ordered_json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& item : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + nlohmann::json(item.key()).dump() + ": ";
                dump(item.value(), out, indent + 2);
            }
            out += "\n" + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = true;
            for (const auto& x : j) flat = flat && !x.is_structured();
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i > 0) out += ", ";
                    dump(j[i], out, indent);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) out += ",\n";
                out += pad;
                dump(j[i], out, indent + 2);
            }
            out += "\n" + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float:
            out += fmt17(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string to_json_text(const nlohmann::ordered_json& doc) {
    std::string out;
    dump(doc, out, 0);
    out += "\n";
    return out;
}

std::string summary_csv(const Report& report) {
    std::string out = "n,mean,var,var_stderr,M3,M4,M5,M6,ks,mean_slope,mean_slope_stderr,var_slope,var_slope_stderr,ks_slope,ks_slope_stderr\n";
    const SlopeFields& s = report.slopes;
    for (const auto& r : report.rows) {
        out += std::to_string(r.n);
        for (double x : {r.mean, r.var, r.var_stderr, r.m3, r.m4, r.m5, r.m6}) out += "," + csv_number(x);
        for (const auto& x : {r.ks, s.mean_slope, s.mean_slope_stderr, s.var_slope, s.var_slope_stderr, s.ks_slope, s.ks_slope_stderr})
            out += "," + csv_number(x);
        out += "\n";
    }
    return out;
}

std::string raw_csv(const Report& report) {
    std::string out = "n,trial,value\n";
    for (const auto& r : report.raw) out += std::to_string(r.n) + "," + std::to_string(r.trial) + "," + fmt17(r.value) + "\n";
    return out;
}

void write_report(const Report& report, const std::string& directory, bool raw) {
    const std::filesystem::path dir(directory.empty() ? "." : directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_file(dir / "report.json", to_json_text(report.doc));
    write_file(dir / "summary.csv", summary_csv(report));
    if (raw) write_file(dir / "raw.csv", raw_csv(report));
}

}  // namespace rpoly
