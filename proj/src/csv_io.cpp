#include "nlcl/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlcl/errors.hpp"

namespace nlcl {

std::string format_float(double v, int significant_digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*e", significant_digits - 1, v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out) throw ModelError("cannot write `" + path.string() + "`");
    return out;
}

std::string time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", t);
    return buf;
}

} // namespace

std::vector<std::string> emit_profile_csv(const Trajectory& traj, const std::string& out_dir,
                                          int sig) {
    std::vector<std::string> written;
    for (size_t r = 0; r < traj.states.size(); ++r) {
        const auto& s = traj.states[r];
        const std::string name = "profile_t" + time_tag(traj.record_times[r]) + ".csv";
        auto out = open_out(out_dir, name);
        out << "x";
        for (int k = 0; k < s.n_components; ++k) out << ",U" << (k + 1);
        out << "\n";
        for (int i = 0; i < s.cells; ++i) {
            out << format_float(traj.grid.x_center(i), sig);
            for (int k = 0; k < s.n_components; ++k)
                out << "," << format_float(s.at(k, i), sig);
            out << "\n";
        }
        written.push_back((std::filesystem::path(out_dir) / name).string());
    }
    return written;
}

std::vector<std::string> emit_rate_table(const ErrorTable& table, const std::string& out_dir,
                                         int sig) {
    std::vector<std::string> written;
    {
        auto out = open_out(out_dir, "rate_table.csv");
        out << "parameter,error,rate,lambda_used\n";
        for (const auto& row : table.rows) {
            out << format_float(row.parameter, sig) << "," << format_float(row.error, sig)
                << ",";
            if (row.rate) out << format_float(*row.rate, sig);
            out << "," << format_float(row.lambda_used, sig) << "\n";
        }
        written.push_back((std::filesystem::path(out_dir) / "rate_table.csv").string());
    }
    {
        auto out = open_out(out_dir, "rates_loglog.dat");
        out << "# " << table.parameter_name << " error slope1_ref slope05_ref\n";
        if (!table.rows.empty()) {
            const double p0 = table.rows.front().parameter;
            const double e0 = table.rows.front().error;
            for (const auto& row : table.rows) {
                const double q = row.parameter / p0;
                out << format_float(row.parameter, sig) << " " << format_float(row.error, sig)
                    << " " << format_float(e0 * q, sig) << " "
                    << format_float(e0 * std::sqrt(q), sig) << "\n";
            }
        }
        written.push_back((std::filesystem::path(out_dir) / "rates_loglog.dat").string());
    }
    return written;
}

std::string emit_diagnostics_csv(const DiagnosticsReport& report, const std::string& out_dir,
                                 int sig) {
    auto out = open_out(out_dir, "diagnostics.csv");
    out << "check,component,worst,tolerance,pass\n";
    for (const auto& e : report.entries) {
        out << e.check << "," << e.component << "," << format_float(e.worst, sig) << ","
            << format_float(e.tolerance, sig) << "," << (e.pass ? "1" : "0") << "\n";
    }
    return (std::filesystem::path(out_dir) / "diagnostics.csv").string();
}

std::string render_diagnostics_table(const DiagnosticsReport& report) {
    std::ostringstream out;
    out << std::left << std::setw(26) << "check" << std::setw(6) << "comp" << std::setw(16)
        << "worst" << std::setw(14) << "tolerance" << "result\n";
    for (const auto& e : report.entries) {
        std::ostringstream comp;
        if (e.component >= 0) comp << (e.component + 1);
        else comp << "-";
        out << std::left << std::setw(26) << e.check << std::setw(6) << comp.str()
            << std::setw(16) << format_float(e.worst, 6) << std::setw(14)
            << format_float(e.tolerance, 4) << (e.pass ? "pass" : "FAIL") << "\n";
    }
    out << "C9 (empirical) = " << format_float(report.c9_empirical, 6) << "\n";
    return out.str();
}

} // namespace nlcl
