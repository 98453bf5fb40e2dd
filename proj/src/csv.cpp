#include "mgsim/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mgsim/common.hpp"

namespace mgsim {

const char* const kRunCsvHeader =
    "t,omega1,omega2,vd1,vd2,P1,P2,Q1,Q2,dQ1,dQ2,vpcc_mag,deltaQ";

namespace {

void append_f64(std::string& out, double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    out.append(buf, p);
}

}  // namespace

std::string run_csv_text(const std::vector<Sample>& series) {
    std::string out;
    out.reserve(series.size() * 160 + 64);
    out += kRunCsvHeader;
    out += '\n';
    for (const Sample& s : series) {
        const double cols[13] = {s.t,  s.omega1, s.omega2, s.vd1, s.vd2,      s.p1,      s.p2,
                                 s.q1, s.q2,     s.dq1,    s.dq2, s.vpcc_mag, s.delta_q};
        for (int i = 0; i < 13; ++i) {
            if (i) out += ',';
            append_f64(out, cols[i]);
        }
        out += '\n';
    }
    return out;
}

void write_run_csv(const std::string& path, const std::vector<Sample>& series) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << run_csv_text(series);
}

std::vector<Sample> read_run_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw ConfigError(path + ": empty file");
    if (line != kRunCsvHeader) throw ConfigError(path + ": unexpected header");

    std::vector<Sample> out;
    int lineno = 1;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        double cols[13];
        std::size_t pos = 0;
        for (int i = 0; i < 13; ++i) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            if (i < 12 && next == line.size())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": short row");
            const std::string cell = line.substr(pos, next - pos);
            char* end = nullptr;
            cols[i] = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size())
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
            pos = next + 1;
        }
        Sample s;
        s.t = cols[0];
        s.omega1 = cols[1];
        s.omega2 = cols[2];
        s.vd1 = cols[3];
        s.vd2 = cols[4];
        s.p1 = cols[5];
        s.p2 = cols[6];
        s.q1 = cols[7];
        s.q2 = cols[8];
        s.dq1 = cols[9];
        s.dq2 = cols[10];
        s.vpcc_mag = cols[11];
        s.delta_q = cols[12];
        out.push_back(s);
    }
    return out;
}

}  // namespace mgsim
