#include "driftgmm/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace driftgmm {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && begin != end;
}

}  // namespace

LoadedStream load_stream_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    LoadedStream result;
    std::string line;
    long row = 0;
    long d = -1;
    long t = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() < 2) {
            ++result.rejected_rows;
            continue;
        }
        Eigen::VectorXd features(fields.size() - 1);
        bool ok = true;
        for (std::size_t j = 0; ok && j + 1 < fields.size(); ++j) {
            ok = parse_double(fields[j], features[static_cast<Eigen::Index>(j)]);
        }
        double label_val = 0.0;
        ok = ok && parse_double(fields.back(), label_val);
        if (first) {
            first = false;
            if (!ok) continue;  // header row
        }
        if (!ok || (d >= 0 && static_cast<long>(fields.size()) - 1 != d) ||
            !features.allFinite()) {
            ++result.rejected_rows;
            continue;
        }
        if (d < 0) d = static_cast<long>(fields.size()) - 1;
        result.observations.push_back(
            Observation{std::move(features), static_cast<int>(label_val), t++});
    }
    return result;
}

}  // namespace driftgmm
