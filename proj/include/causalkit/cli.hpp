#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "causalkit/half_sibling.hpp"
#include "causalkit/scm.hpp"

namespace causalkit {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ScmSpec {
    Scm scm;
    std::optional<std::uint64_t> seed;
};

// Parses the JSON model document (nodes with noise, mechanism and parents,
// plus an optional seed). Unknown fields and malformed pieces raise
// DataFormatError with a distinct code per failure class.
ScmSpec parse_scm_spec_document(const std::string& text);
Scm parse_scm_spec(const std::string& text);

// Panel configuration document for the hsr command; same strictness.
PanelSpec parse_panel_spec_document(const std::string& text);

// Two whitespace-separated numeric columns, one sample per line, blank lines
// skipped (cause-effect pair layout).
std::pair<std::vector<double>, std::vector<double>> read_pair_file(const std::string& path);

struct Report {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    nlohmann::json results;
    std::string version = kToolkitVersion;

    nlohmann::json to_json() const;
    static Report from_json(const nlohmann::json& doc);
};

// Byte-stable serialisation: sorted keys, fixed indentation, trailing newline.
std::string render_report(const Report& report);
void write_report(const Report& report, const std::string& path);
Report parse_report(const std::string& text);

// Locale-independent shortest-round-trip formatting used by every CSV writer.
std::string format_double(double value);

void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_panel_csv(const Panel& panel, std::ostream& out);

// Batch front end. Returns the process exit code: 0 success, 2 usage error,
// 3 data-format error, 4 numeric failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalkit
