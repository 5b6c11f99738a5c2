#include "cost/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace cost::io {

std::string format_g12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double round12(double v) {
    if (!std::isfinite(v)) return v;
    if (v == 0.0) return 0.0;  // normalizes -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(trim(current));
    return fields;
}

[[noreturn]] void row_error(const std::string& source, std::size_t line_no,
                            const std::string& what) {
    throw DataError(source + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& field, const std::string& source, std::size_t line_no,
                    const char* name) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        row_error(source, line_no, std::string("cannot parse ") + name + " '" + field + "'");
    }
    return value;
}

long long parse_count(const std::string& field, const std::string& source, std::size_t line_no,
                      const char* name) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        row_error(source, line_no, std::string("cannot parse ") + name + " '" + field + "'");
    }
    return value;
}

struct Line {
    std::size_t number;
    std::vector<std::string> fields;
};

}  // namespace

std::vector<PopulationInput> read_population_csv(std::istream& in, const std::string& source) {
    std::vector<Line> lines;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string content = trim(raw);
        if (content.empty() || content[0] == '#') continue;
        lines.push_back({line_no, split_fields(content)});
    }
    if (lines.empty()) {
        throw UsageError(source + ": empty input file");
    }

    std::vector<std::string> header;
    header.reserve(lines.front().fields.size());
    for (const std::string& f : lines.front().fields) header.push_back(lower(f));

    auto header_is = [&](std::initializer_list<const char*> expected) {
        if (header.size() < expected.size()) return false;
        std::size_t k = 0;
        for (const char* e : expected) {
            if (header[k++] != e) return false;
        }
        return true;
    };

    std::vector<PopulationInput> populations;
    std::map<std::string, std::size_t> index_of;

    if (header_is({"population", "p0", "p1"})) {
        for (std::size_t k = 1; k < lines.size(); ++k) {
            const Line& line = lines[k];
            if (line.fields.size() < 3) {
                row_error(source, line.number, "expected at least 3 fields (population,p0,p1)");
            }
            PopulationInput pop;
            pop.id = line.fields[0];
            if (pop.id.empty()) row_error(source, line.number, "empty population id");
            if (index_of.count(pop.id)) {
                row_error(source, line.number, "duplicate population '" + pop.id + "'");
            }
            pop.risks.p0 = parse_double(line.fields[1], source, line.number, "p0");
            pop.risks.p1 = parse_double(line.fields[2], source, line.number, "p1");
            try {
                require_valid(pop.risks);
            } catch (const std::invalid_argument& e) {
                row_error(source, line.number, e.what());
            }
            index_of[pop.id] = populations.size();
            populations.push_back(std::move(pop));
        }
        return populations;
    }

    if (header_is({"population", "arm", "events", "total"})) {
        struct Partial {
            std::optional<ArmCounts> treated, control;
            std::size_t first_line = 0;
        };
        std::map<std::string, Partial> partials;
        std::vector<std::string> order;
        for (std::size_t k = 1; k < lines.size(); ++k) {
            const Line& line = lines[k];
            if (line.fields.size() < 4) {
                row_error(source, line.number,
                          "expected at least 4 fields (population,arm,events,total)");
            }
            const std::string& id = line.fields[0];
            if (id.empty()) row_error(source, line.number, "empty population id");
            std::string arm = lower(line.fields[1]);
            ArmCounts counts{parse_count(line.fields[2], source, line.number, "events"),
                             parse_count(line.fields[3], source, line.number, "total")};
            try {
                require_valid(counts);
            } catch (const std::invalid_argument& e) {
                row_error(source, line.number, e.what());
            }
            if (!partials.count(id)) {
                order.push_back(id);
                partials[id].first_line = line.number;
            }
            Partial& p = partials[id];
            if (arm == "treated") {
                if (p.treated) row_error(source, line.number, "duplicate treated arm for '" + id + "'");
                p.treated = counts;
            } else if (arm == "control") {
                if (p.control) row_error(source, line.number, "duplicate control arm for '" + id + "'");
                p.control = counts;
            } else {
                row_error(source, line.number, "arm must be 'treated' or 'control', got '" +
                                                   line.fields[1] + "'");
            }
        }
        for (const std::string& id : order) {
            const Partial& p = partials[id];
            if (!p.treated || !p.control) {
                row_error(source, p.first_line,
                          "population '" + id + "' is missing its " +
                              (p.treated ? "control" : "treated") + " arm");
            }
            PopulationInput pop;
            pop.id = id;
            pop.counts = meta::StudyRecord{id, *p.treated, *p.control};
            pop.risks = pop.counts->risks();
            populations.push_back(std::move(pop));
        }
        return populations;
    }

    throw UsageError(source + ": unrecognized header; expected 'population,p0,p1' or "
                              "'population,arm,events,total'");
}

std::vector<PopulationInput> read_population_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open input file '" + path + "'");
    }
    return read_population_csv(in, path);
}

}  // namespace cost::io
