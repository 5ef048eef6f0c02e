#include "qjump/io.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "qjump/errors.hpp"

namespace qjump::io {

std::string format_number(double v) {
    return fmt::format("{:.17g}", v);
}

void write_observables_csv(std::ostream& out, const TrajectoryRecord& record,
                           const std::vector<std::string>& names) {
    out << "time";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < record.times.size(); ++k) {
        out << format_number(record.times[k]);
        for (double v : record.observables[k]) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_events_csv(std::ostream& out, const TrajectoryRecord& record, bool include_steps) {
    out << "time,event_type,channel_rate,target_index\n";
    auto jump = record.jumps.begin();
    auto write_jumps_until = [&](double t) {
        while (jump != record.jumps.end() && jump->time <= t) {
            out << format_number(jump->time) << ",jump," << format_number(jump->channel_rate) << ','
                << jump->target_index << '\n';
            ++jump;
        }
    };
    if (include_steps) {
        for (std::size_t k = 1; k < record.times.size(); ++k) {
            const double t = record.times[k];
            const bool jumped = jump != record.jumps.end() && jump->time == t;
            if (jumped) {
                write_jumps_until(t);
            } else {
                out << format_number(t) << ",step,0,-1\n";
            }
        }
    }
    write_jumps_until(std::numeric_limits<double>::infinity());
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "time,trace_distance,stat_error";
    for (const auto& n : report.observable_names) out << ',' << n << "_mean";
    for (const auto& n : report.observable_names) out << ',' << n << "_stderr";
    out << '\n';
    for (const auto& s : report.snapshots) {
        out << format_number(s.time) << ',' << format_number(s.trace_distance) << ','
            << format_number(s.stat_error);
        for (double v : s.observable_mean) out << ',' << format_number(v);
        for (double v : s.observable_stderr) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_density(std::ostream& out, const ComplexMatrix& rho) {
    out << "dim " << rho.rows() << '\n';
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.cols(); ++j) {
            if (j > 0) out << ' ';
            out << format_number(rho(i, j).real()) << ',' << format_number(rho(i, j).imag());
        }
        out << '\n';
    }
}

ComplexMatrix read_density(std::istream& in) {
    std::string word;
    Eigen::Index d = 0;
    if (!(in >> word >> d) || word != "dim" || d <= 0) throw InvalidConfig("density dump: bad header");
    ComplexMatrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            std::string pair;
            if (!(in >> pair)) throw InvalidConfig("density dump: truncated");
            const auto comma = pair.find(',');
            if (comma == std::string::npos) throw InvalidConfig("density dump: expected re,im");
            rho(i, j) = Complex(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
        }
    }
    return rho;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace qjump::io
