#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cost/measures.hpp"
#include "cost/meta.hpp"

namespace cost::io {

// Malformed content inside an otherwise usable input (bad row, bad number,
// missing arm): the CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally unusable input (empty file, unrecognized schema) or an
// invocation problem: exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every float the toolkit prints goes through "%.12g": wide enough to make
// golden comparisons unambiguous, narrow enough to absorb last-bit noise.
std::string format_g12(double v);

// The nearest double with 12 significant decimal digits; applied to every
// value placed in JSON so that re-serialization is byte-stable.
double round12(double v);

struct PopulationInput {
    std::string id;
    RiskPair risks;
    std::optional<meta::StudyRecord> counts;  // present under the counts schema
};

// Reads either supported schema, detected by header:
//   population,p0,p1              one row per population, risks in [0,1]
//   population,arm,events,total   two rows per population, arm treated|control
// Extra columns beyond the schema prefix are ignored, so emitted CSV can be
// re-ingested. Blank lines and lines starting with '#' are skipped. Fields
// are plain comma-separated UTF-8 with '.' decimals; no quoting.
std::vector<PopulationInput> read_population_csv(std::istream& in, const std::string& source);
std::vector<PopulationInput> read_population_file(const std::string& path);

}  // namespace cost::io
