#include "causalkit/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "causalkit/cause_effect.hpp"
#include "causalkit/complexity.hpp"
#include "causalkit/errors.hpp"
#include "causalkit/ssl_bench.hpp"

namespace causalkit {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// JSON document helpers
// ---------------------------------------------------------------------------

void require_object(const json& value, const std::string& where) {
    if (!value.is_object()) {
        throw DataFormatError(DataErrorCode::syntax, where + ": expected an object");
    }
}

void reject_unknown_fields(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw DataFormatError(DataErrorCode::unknown_field,
                                  where + ": unknown field '" + key + "'");
        }
    }
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        throw DataFormatError(DataErrorCode::bad_value,
                              where + ": field '" + key + "' must be a number");
    }
    return obj.at(key).get<double>();
}

NoiseSpec parse_noise(const json& obj, const std::string& where) {
    require_object(obj, where);
    if (!obj.contains("kind") || !obj.at("kind").is_string()) {
        throw DataFormatError(DataErrorCode::bad_value, where + ": noise needs a string 'kind'");
    }
    const std::string kind = obj.at("kind").get<std::string>();
    try {
        if (kind == "bernoulli") {
            reject_unknown_fields(obj, {"kind", "p"}, where);
            return NoiseSpec::bernoulli(get_number(obj, "p", where));
        }
        if (kind == "uniform") {
            reject_unknown_fields(obj, {"kind", "a", "b"}, where);
            return NoiseSpec::uniform(get_number(obj, "a", where), get_number(obj, "b", where));
        }
        if (kind == "gaussian") {
            reject_unknown_fields(obj, {"kind", "mu", "sigma"}, where);
            return NoiseSpec::gaussian(get_number(obj, "mu", where),
                                       get_number(obj, "sigma", where));
        }
        if (kind == "categorical") {
            reject_unknown_fields(obj, {"kind", "weights"}, where);
            if (!obj.contains("weights") || !obj.at("weights").is_array()) {
                throw DataFormatError(DataErrorCode::bad_value,
                                      where + ": categorical noise needs a 'weights' array");
            }
            return NoiseSpec::categorical(obj.at("weights").get<std::vector<double>>());
        }
        if (kind == "constant") {
            reject_unknown_fields(obj, {"kind", "value"}, where);
            return NoiseSpec::constant(get_number(obj, "value", where));
        }
    } catch (const std::invalid_argument& e) {
        throw DataFormatError(DataErrorCode::bad_value, where + ": " + e.what());
    }
    throw DataFormatError(DataErrorCode::unknown_kind, where + ": unknown noise kind '" + kind + "'");
}

SelectorFunction parse_selector_function(const json& obj, const std::string& where) {
    require_object(obj, where);
    if (!obj.contains("kind") || !obj.at("kind").is_string()) {
        throw DataFormatError(DataErrorCode::bad_value, where + ": needs a string 'kind'");
    }
    const std::string kind = obj.at("kind").get<std::string>();
    SelectorFunction fn;
    if (kind == "identity") {
        reject_unknown_fields(obj, {"kind"}, where);
        fn.kind = SelectorFunction::Kind::identity;
    } else if (kind == "negation") {
        reject_unknown_fields(obj, {"kind"}, where);
        fn.kind = SelectorFunction::Kind::negation;
    } else if (kind == "constant") {
        reject_unknown_fields(obj, {"kind", "value"}, where);
        fn.kind = SelectorFunction::Kind::constant;
        fn.a = get_number(obj, "value", where);
    } else if (kind == "affine") {
        reject_unknown_fields(obj, {"kind", "a", "b"}, where);
        fn.kind = SelectorFunction::Kind::affine;
        fn.a = get_number(obj, "a", where);
        fn.b = get_number(obj, "b", where);
    } else {
        throw DataFormatError(DataErrorCode::unknown_kind,
                              where + ": unknown selector function kind '" + kind + "'");
    }
    return fn;
}

Mechanism parse_mechanism(const json& obj, const std::string& where) {
    require_object(obj, where);
    if (!obj.contains("kind") || !obj.at("kind").is_string()) {
        throw DataFormatError(DataErrorCode::bad_value, where + ": mechanism needs a string 'kind'");
    }
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "table") {
        reject_unknown_fields(obj, {"kind", "parent_cards", "noise_card", "outputs"}, where);
        TableMechanism mech;
        if (obj.contains("parent_cards")) {
            if (!obj.at("parent_cards").is_array()) {
                throw DataFormatError(DataErrorCode::bad_value,
                                      where + ": 'parent_cards' must be an array");
            }
            mech.parent_cards = obj.at("parent_cards").get<std::vector<int>>();
        }
        mech.noise_card = static_cast<int>(get_number(obj, "noise_card", where));
        if (!obj.contains("outputs") || !obj.at("outputs").is_array()) {
            throw DataFormatError(DataErrorCode::bad_value, where + ": table needs an 'outputs' array");
        }
        mech.outputs = obj.at("outputs").get<std::vector<double>>();
        return mech;
    }
    if (kind == "linear") {
        reject_unknown_fields(obj, {"kind", "coefficients", "intercept", "add_noise"}, where);
        LinearMechanism mech;
        if (obj.contains("coefficients")) {
            mech.coefficients = obj.at("coefficients").get<std::vector<double>>();
        }
        if (obj.contains("intercept")) mech.intercept = get_number(obj, "intercept", where);
        if (obj.contains("add_noise")) {
            if (!obj.at("add_noise").is_boolean()) {
                throw DataFormatError(DataErrorCode::bad_value,
                                      where + ": 'add_noise' must be boolean");
            }
            mech.add_noise = obj.at("add_noise").get<bool>();
        }
        return mech;
    }
    if (kind == "additive") {
        reject_unknown_fields(obj, {"kind", "knots"}, where);
        if (!obj.contains("knots") || !obj.at("knots").is_array()) {
            throw DataFormatError(DataErrorCode::bad_value,
                                  where + ": additive mechanism needs a 'knots' array");
        }
        AdditiveMechanism mech;
        for (const auto& knot : obj.at("knots")) {
            if (!knot.is_array() || knot.size() != 2) {
                throw DataFormatError(DataErrorCode::bad_value,
                                      where + ": each knot must be an [x, y] pair");
            }
            mech.knot_x.push_back(knot.at(0).get<double>());
            mech.knot_y.push_back(knot.at(1).get<double>());
        }
        return mech;
    }
    if (kind == "selector") {
        reject_unknown_fields(obj, {"kind", "family"}, where);
        if (!obj.contains("family") || !obj.at("family").is_array()) {
            throw DataFormatError(DataErrorCode::bad_value,
                                  where + ": selector mechanism needs a 'family' array");
        }
        SelectorMechanism mech;
        std::size_t index = 0;
        for (const auto& fn : obj.at("family")) {
            mech.family.push_back(
                parse_selector_function(fn, where + ".family[" + std::to_string(index) + "]"));
            ++index;
        }
        return mech;
    }
    if (kind == "constant") {
        reject_unknown_fields(obj, {"kind", "value"}, where);
        return ConstantMechanism{get_number(obj, "value", where)};
    }
    throw DataFormatError(DataErrorCode::unknown_kind,
                          where + ": unknown mechanism kind '" + kind + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataFormatError(DataErrorCode::io_failure, "cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void emit_text(const std::string& text, const std::string& output_path, std::ostream& out) {
    if (output_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(output_path, std::ios::binary);
    if (!file) {
        throw DataFormatError(DataErrorCode::io_failure, "cannot open for writing: " + output_path);
    }
    file << text;
    if (!file) {
        throw DataFormatError(DataErrorCode::io_failure, "write failed: " + output_path);
    }
}

json verdict_to_json(const DirectionVerdict& verdict) {
    json out;
    out["verdict"] = direction_name(verdict.verdict);
    out["method"] = verdict.method;
    if (verdict.method == "anm") {
        out["p_forward"] = verdict.anm_p_forward;
        out["p_backward"] = verdict.anm_p_backward;
    } else {
        out["igci_score"] = verdict.igci_score;
    }
    return out;
}

std::pair<std::string, double> split_assignment(const std::string& text, const char* flag) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument(std::string(flag) + " expects NODE=VALUE");
    }
    const std::string value_text = text.substr(eq + 1);
    try {
        std::size_t used = 0;
        const double value = std::stod(value_text, &used);
        if (used != value_text.size()) throw std::invalid_argument("trailing characters");
        return {text.substr(0, eq), value};
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(flag) + ": cannot parse value '" + value_text + "'");
    }
}

std::pair<std::string, json> split_json_assignment(const std::string& text, const char* flag) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument(std::string(flag) + " expects NODE=JSON");
    }
    try {
        return {text.substr(0, eq), json::parse(text.substr(eq + 1))};
    } catch (const json::parse_error& e) {
        throw DataFormatError(DataErrorCode::syntax,
                              std::string(flag) + ": " + e.what());
    }
}

Direction parse_truth(const std::string& token, const std::string& where) {
    if (token == "x->y") return Direction::x_to_y;
    if (token == "y->x") return Direction::y_to_x;
    throw DataFormatError(DataErrorCode::bad_value,
                          where + ": ground-truth direction must be x->y or y->x, got '" + token +
                              "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

ScmSpec parse_scm_spec_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataFormatError(DataErrorCode::syntax,
                              std::string("model document: ") + e.what());
    }
    require_object(doc, "model document");
    reject_unknown_fields(doc, {"nodes", "seed"}, "model document");
    if (!doc.contains("nodes") || !doc.at("nodes").is_array() || doc.at("nodes").empty()) {
        throw DataFormatError(DataErrorCode::bad_value,
                              "model document: needs a non-empty 'nodes' array");
    }

    std::optional<std::uint64_t> seed;
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            throw DataFormatError(DataErrorCode::bad_value,
                                  "model document: 'seed' must be a non-negative integer");
        }
        seed = doc.at("seed").get<std::uint64_t>();
    }

    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<NoiseSpec> noises;
    std::vector<Mechanism> mechanisms;

    for (const auto& node : doc.at("nodes")) {
        const std::string where = "node " + std::to_string(names.size());
        require_object(node, where);
        reject_unknown_fields(node, {"name", "parents", "noise", "mechanism"}, where);
        if (!node.contains("name") || !node.at("name").is_string()) {
            throw DataFormatError(DataErrorCode::bad_value, where + ": needs a string 'name'");
        }
        const std::string name = node.at("name").get<std::string>();
        if (node.contains("parents")) {
            if (!node.at("parents").is_array()) {
                throw DataFormatError(DataErrorCode::bad_value, where + ": 'parents' must be an array");
            }
            for (const auto& parent : node.at("parents")) {
                if (!parent.is_string()) {
                    throw DataFormatError(DataErrorCode::bad_value,
                                          where + ": parent names must be strings");
                }
                edges.push_back({parent.get<std::string>(), name});
            }
        }
        if (!node.contains("noise")) {
            throw DataFormatError(DataErrorCode::bad_value, where + ": missing 'noise'");
        }
        if (!node.contains("mechanism")) {
            throw DataFormatError(DataErrorCode::bad_value, where + ": missing 'mechanism'");
        }
        noises.push_back(parse_noise(node.at("noise"), where + ".noise"));
        mechanisms.push_back(parse_mechanism(node.at("mechanism"), where + ".mechanism"));
        names.push_back(name);
    }

    try {
        Dag graph(names, edges);
        try {
            return ScmSpec{Scm(std::move(graph), std::move(noises), std::move(mechanisms)), seed};
        } catch (const std::invalid_argument& e) {
            const std::string message = e.what();
            const DataErrorCode code = message.find("arity") != std::string::npos
                                           ? DataErrorCode::arity_mismatch
                                           : DataErrorCode::bad_value;
            throw DataFormatError(code, "model document: " + message);
        }
    } catch (const DataFormatError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        const std::string message = e.what();
        const DataErrorCode code = message.find("cycle") != std::string::npos
                                       ? DataErrorCode::cycle
                                       : DataErrorCode::bad_value;
        throw DataFormatError(code, "model document: " + message);
    }
}

Scm parse_scm_spec(const std::string& text) { return parse_scm_spec_document(text).scm; }

PanelSpec parse_panel_spec_document(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataFormatError(DataErrorCode::syntax, std::string("panel document: ") + e.what());
    }
    require_object(doc, "panel document");
    reject_unknown_fields(doc,
                          {"n_targets", "n_siblings", "n_time", "systematics", "loading_min",
                           "loading_max", "noise_sigma", "signals"},
                          "panel document");
    PanelSpec spec;
    if (doc.contains("n_targets")) spec.n_targets = static_cast<int>(get_number(doc, "n_targets", "panel"));
    if (doc.contains("n_siblings")) spec.n_siblings = static_cast<int>(get_number(doc, "n_siblings", "panel"));
    if (doc.contains("n_time")) spec.n_time = static_cast<int>(get_number(doc, "n_time", "panel"));
    if (doc.contains("loading_min")) spec.loading_min = get_number(doc, "loading_min", "panel");
    if (doc.contains("loading_max")) spec.loading_max = get_number(doc, "loading_max", "panel");
    if (doc.contains("noise_sigma")) spec.noise_sigma = get_number(doc, "noise_sigma", "panel");
    if (doc.contains("systematics")) {
        if (!doc.at("systematics").is_array()) {
            throw DataFormatError(DataErrorCode::bad_value, "panel: 'systematics' must be an array");
        }
        spec.systematics.clear();
        for (const auto& entry : doc.at("systematics")) {
            require_object(entry, "panel.systematics");
            reject_unknown_fields(entry, {"amplitude", "smoothness"}, "panel.systematics");
            SystematicSpec s;
            if (entry.contains("amplitude")) s.amplitude = get_number(entry, "amplitude", "panel.systematics");
            if (entry.contains("smoothness")) s.smoothness = get_number(entry, "smoothness", "panel.systematics");
            spec.systematics.push_back(s);
        }
    }
    if (doc.contains("signals")) {
        if (!doc.at("signals").is_array()) {
            throw DataFormatError(DataErrorCode::bad_value, "panel: 'signals' must be an array");
        }
        spec.signals.clear();
        for (const auto& entry : doc.at("signals")) {
            require_object(entry, "panel.signals");
            reject_unknown_fields(entry, {"depth", "duration", "period", "phase"}, "panel.signals");
            TransitSpec t;
            if (entry.contains("depth")) t.depth = get_number(entry, "depth", "panel.signals");
            if (entry.contains("duration")) t.duration = get_number(entry, "duration", "panel.signals");
            if (entry.contains("period")) t.period = get_number(entry, "period", "panel.signals");
            if (entry.contains("phase")) t.phase = get_number(entry, "phase", "panel.signals");
            spec.signals.push_back(t);
        }
    }
    return spec;
}

std::pair<std::vector<double>, std::vector<double>> read_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataFormatError(DataErrorCode::io_failure, "cannot open pair file: " + path);
    }
    std::vector<double> x;
    std::vector<double> y;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        std::string token;
        while (fields >> token) tokens.push_back(token);
        if (tokens.empty()) continue;  // blank line
        if (tokens.size() != 2) {
            throw DataFormatError(DataErrorCode::ragged_line,
                                  path + ":" + std::to_string(line_number) + ": expected 2 fields, got " +
                                      std::to_string(tokens.size()));
        }
        for (std::size_t k = 0; k < 2; ++k) {
            try {
                std::size_t used = 0;
                const double value = std::stod(tokens[k], &used);
                if (used != tokens[k].size() || !std::isfinite(value)) {
                    throw std::invalid_argument("trailing characters");
                }
                (k == 0 ? x : y).push_back(value);
            } catch (const std::exception&) {
                throw DataFormatError(DataErrorCode::non_numeric,
                                      path + ":" + std::to_string(line_number) +
                                          ": non-numeric token '" + tokens[k] + "'");
            }
        }
    }
    if (x.empty()) {
        throw DataFormatError(DataErrorCode::empty_file, path + ": no samples");
    }
    return {std::move(x), std::move(y)};
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

json Report::to_json() const {
    json out;
    out["command"] = command;
    out["config"] = config;
    out["seed"] = seed;
    out["results"] = results;
    out["version"] = version;
    return out;
}

Report Report::from_json(const json& doc) {
    Report report;
    report.command = doc.at("command").get<std::string>();
    report.config = doc.at("config");
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.results = doc.at("results");
    report.version = doc.at("version").get<std::string>();
    return report;
}

std::string render_report(const Report& report) { return report.to_json().dump(2) + "\n"; }

void write_report(const Report& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataFormatError(DataErrorCode::io_failure, "cannot open for writing: " + path);
    }
    out << render_report(report);
    if (!out) {
        throw DataFormatError(DataErrorCode::io_failure, "write failed: " + path);
    }
}

Report parse_report(const std::string& text) {
    try {
        return Report::from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw DataFormatError(DataErrorCode::syntax, std::string("report: ") + e.what());
    }
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buffer, ptr);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t c = 0; c < data.columns().size(); ++c) {
        if (c) out << ',';
        out << data.columns()[c];
    }
    out << '\n';
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t c = 0; c < data.cols(); ++c) {
            if (c) out << ',';
            out << format_double(data.at(r, c));
        }
        out << '\n';
    }
}

void write_panel_csv(const Panel& panel, std::ostream& out) {
    out << "time";
    for (std::size_t k = 0; k < panel.targets.size(); ++k) out << ",t" << (k + 1);
    for (std::size_t m = 0; m < panel.siblings.size(); ++m) out << ",s" << (m + 1);
    out << '\n';
    for (std::size_t t = 0; t < panel.time.size(); ++t) {
        out << format_double(panel.time[t]);
        for (const auto& series : panel.targets) out << ',' << format_double(series[t]);
        for (const auto& series : panel.siblings) out << ',' << format_double(series[t]);
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Command dispatch
// ---------------------------------------------------------------------------

namespace {

struct CommonOptions {
    std::uint64_t seed = 0;
    CLI::Option* seed_option = nullptr;
    std::string output;

    bool seed_given() const { return seed_option != nullptr && seed_option->count() > 0; }
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    common.seed_option = cmd->add_option("--seed", common.seed, "random seed");
    cmd->add_option("--output,-o", common.output, "output file (default: stdout)");
}

std::vector<Intervention> collect_interventions(const std::vector<std::string>& do_args,
                                                const std::vector<std::string>& noise_args,
                                                const std::vector<std::string>& mechanism_args) {
    std::vector<Intervention> out;
    for (const auto& text : do_args) {
        const auto [node, value] = split_assignment(text, "--do");
        out.push_back(Intervention::set_constant(node, value));
    }
    for (const auto& text : noise_args) {
        const auto [node, doc] = split_json_assignment(text, "--replace-noise");
        out.push_back(Intervention::replace_noise(node, parse_noise(doc, "--replace-noise")));
    }
    for (const auto& text : mechanism_args) {
        const auto [node, doc] = split_json_assignment(text, "--replace-mechanism");
        require_object(doc, "--replace-mechanism");
        reject_unknown_fields(doc, {"mechanism", "parents"}, "--replace-mechanism");
        if (!doc.contains("mechanism")) {
            throw DataFormatError(DataErrorCode::bad_value,
                                  "--replace-mechanism: missing 'mechanism'");
        }
        std::vector<std::string> parents;
        if (doc.contains("parents")) parents = doc.at("parents").get<std::vector<std::string>>();
        out.push_back(Intervention::replace_mechanism(
            node, parse_mechanism(doc.at("mechanism"), "--replace-mechanism"), parents));
    }
    return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"structural causal model toolkit"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "sample a model spec into a CSV dataset");
    CommonOptions simulate_common;
    std::string simulate_spec;
    std::size_t simulate_n = 1000;
    simulate->add_option("--spec", simulate_spec, "model spec (JSON)")->required();
    simulate->add_option("--n", simulate_n, "number of rows");
    add_common(simulate, simulate_common);

    // --- intervene --------------------------------------------------------
    auto* intervene = app.add_subcommand("intervene", "apply interventions, then sample to CSV");
    CommonOptions intervene_common;
    std::string intervene_spec;
    std::size_t intervene_n = 1000;
    std::vector<std::string> do_args, noise_args, mechanism_args;
    intervene->add_option("--spec", intervene_spec, "model spec (JSON)")->required();
    intervene->add_option("--n", intervene_n, "number of rows");
    intervene->add_option("--do", do_args, "set-constant intervention NODE=VALUE");
    intervene->add_option("--replace-noise", noise_args, "replace-noise intervention NODE=JSON");
    intervene->add_option("--replace-mechanism", mechanism_args,
                          "replace-mechanism intervention NODE=JSON");
    add_common(intervene, intervene_common);

    // --- dsep --------------------------------------------------------------
    auto* dsep = app.add_subcommand("dsep", "decide d-separation of two node sets");
    CommonOptions dsep_common;
    std::string dsep_spec;
    std::vector<std::string> dsep_a, dsep_b, dsep_given;
    dsep->add_option("--spec", dsep_spec, "model spec (JSON)")->required();
    dsep->add_option("--a", dsep_a, "first node set")->required()->delimiter(',');
    dsep->add_option("--b", dsep_b, "second node set")->required()->delimiter(',');
    dsep->add_option("--given", dsep_given, "conditioning node set")->delimiter(',');
    add_common(dsep, dsep_common);

    // --- markov -------------------------------------------------------------
    auto* markov = app.add_subcommand("markov", "verify d-separation-implied CIs exactly");
    CommonOptions markov_common;
    std::string markov_spec;
    double markov_tolerance = 1e-10;
    markov->add_option("--spec", markov_spec, "model spec (JSON)")->required();
    markov->add_option("--tolerance", markov_tolerance, "CI deviation threshold");
    add_common(markov, markov_common);

    // --- discover-pair -------------------------------------------------------
    auto* discover_pair = app.add_subcommand("discover-pair", "cause-effect verdict for one pair file");
    CommonOptions pair_common;
    std::string pair_file, pair_method = "anm";
    double pair_alpha = 0.05;
    discover_pair->add_option("--file", pair_file, "two-column pair file")->required();
    discover_pair->add_option("--method", pair_method, "anm or igci")
        ->check(CLI::IsMember({"anm", "igci"}));
    discover_pair->add_option("--alpha", pair_alpha, "decision level for anm");
    add_common(discover_pair, pair_common);

    // --- discover-dir ---------------------------------------------------------
    auto* discover_dir = app.add_subcommand("discover-dir", "evaluate a directory of labelled pairs");
    CommonOptions dir_common;
    std::string dir_path, dir_meta, dir_method = "anm";
    double dir_alpha = 0.05;
    discover_dir->add_option("--dir", dir_path, "directory with pair files")->required();
    discover_dir->add_option("--meta", dir_meta, "metadata file: '<file> <x->y|y->x>' per line")
        ->required();
    discover_dir->add_option("--method", dir_method, "anm or igci")
        ->check(CLI::IsMember({"anm", "igci"}));
    discover_dir->add_option("--alpha", dir_alpha, "decision level for anm");
    add_common(discover_dir, dir_common);

    // --- hsr -------------------------------------------------------------------
    auto* hsr = app.add_subcommand("hsr", "simulate a confounded panel and score signal recovery");
    CommonOptions hsr_common;
    std::string hsr_config, hsr_panel_out;
    bool hsr_kernel = false;
    double hsr_ridge = 1e-8;
    int hsr_lag = 0;
    hsr->add_option("--config", hsr_config, "panel spec (JSON); defaults when omitted");
    hsr->add_option("--panel-out", hsr_panel_out, "also write the simulated panel as CSV");
    hsr->add_flag("--kernel", hsr_kernel, "kernel regression instead of linear ridge");
    hsr->add_option("--ridge", hsr_ridge, "linear ridge strength");
    hsr->add_option("--target-lag", hsr_lag, "augment predictors with target at +/- this lag");
    add_common(hsr, hsr_common);

    // --- second-law ---------------------------------------------------------------
    auto* second_law = app.add_subcommand("second-law", "complexity trajectory of a reversible automaton");
    CommonOptions law_common;
    std::size_t law_bits = 4096;
    int law_steps = 200, law_block = 16;
    std::size_t law_ones = 256;
    second_law->add_option("--bits", law_bits, "state length in bits");
    second_law->add_option("--steps", law_steps, "number of steps");
    second_law->add_option("--block", law_block, "block size in bits");
    second_law->add_option("--ones", law_ones, "length of the initial run of ones");
    add_common(second_law, law_common);

    // --- ssl-bench ------------------------------------------------------------------
    auto* ssl = app.add_subcommand("ssl-bench", "semi-supervised gain, causal vs anticausal");
    CommonOptions ssl_common;
    SslConfig ssl_config;
    int ssl_seeds = 20;
    ssl->add_option("--seeds", ssl_seeds, "number of paired seeds");
    ssl->add_option("--labeled", ssl_config.n_labeled, "labeled points per task");
    ssl->add_option("--unlabeled", ssl_config.n_unlabeled, "unlabeled points per task");
    ssl->add_option("--rounds", ssl_config.rounds, "self-training rounds");
    ssl->add_option("--mu", ssl_config.mu, "anticausal cluster centre (+/-)");
    ssl->add_option("--sigma", ssl_config.sigma_anticausal, "anticausal cluster spread");
    ssl->add_option("--theta", ssl_config.theta, "causal decision boundary");
    ssl->add_option("--epsilon", ssl_config.epsilon, "causal label noise");
    ssl->add_option("--test", ssl_config.n_test, "test points per task");
    add_common(ssl, ssl_common);

    std::vector<std::string> cli_args(args.rbegin(), args.rend());
    try {
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (simulate->parsed()) {
        const ScmSpec spec = parse_scm_spec_document(read_file(simulate_spec));
        const std::uint64_t seed =
            simulate_common.seed_given() || !spec.seed ? simulate_common.seed : *spec.seed;
        const Dataset data = spec.scm.sample(simulate_n, seed);
        std::ostringstream csv;
        write_dataset_csv(data, csv);
        emit_text(csv.str(), simulate_common.output, out);
        return 0;
    }

    if (intervene->parsed()) {
        const ScmSpec spec = parse_scm_spec_document(read_file(intervene_spec));
        const std::uint64_t seed =
            intervene_common.seed_given() || !spec.seed ? intervene_common.seed : *spec.seed;
        Scm model = spec.scm;
        for (const auto& iv : collect_interventions(do_args, noise_args, mechanism_args)) {
            model = model.intervene(iv);
        }
        const Dataset data = model.sample(intervene_n, seed);
        std::ostringstream csv;
        write_dataset_csv(data, csv);
        emit_text(csv.str(), intervene_common.output, out);
        return 0;
    }

    if (dsep->parsed()) {
        const ScmSpec spec = parse_scm_spec_document(read_file(dsep_spec));
        const bool separated =
            d_separated(spec.scm.graph(), {dsep_a.begin(), dsep_a.end()},
                        {dsep_b.begin(), dsep_b.end()}, {dsep_given.begin(), dsep_given.end()});
        Report report;
        report.command = "dsep";
        report.seed = dsep_common.seed;
        report.config = {{"spec", dsep_spec}, {"a", dsep_a}, {"b", dsep_b}, {"given", dsep_given}};
        report.results = {{"d_separated", separated}};
        emit_text(separated ? "true\n" : "false\n", "", out);
        if (!dsep_common.output.empty()) write_report(report, dsep_common.output);
        return 0;
    }

    if (markov->parsed()) {
        const ScmSpec spec = parse_scm_spec_document(read_file(markov_spec));
        const auto checks = spec.scm.verify_markov(markov_tolerance);
        json items = json::array();
        bool all_hold = true;
        for (const auto& check : checks) {
            items.push_back({{"a", check.a},
                             {"b", check.b},
                             {"given", check.given},
                             {"holds", check.holds},
                             {"deviation", check.deviation}});
            all_hold = all_hold && check.holds;
        }
        Report report;
        report.command = "markov";
        report.seed = markov_common.seed;
        report.config = {{"spec", markov_spec}, {"tolerance", markov_tolerance}};
        report.results = {{"checks", items}, {"implied_ci_count", checks.size()}, {"all_hold", all_hold}};
        emit_text(render_report(report), markov_common.output, out);
        return 0;
    }

    if (discover_pair->parsed()) {
        const auto [x, y] = read_pair_file(pair_file);
        DirectionVerdict verdict;
        if (pair_method == "anm") {
            AnmConfig config;
            config.alpha = pair_alpha;
            config.seed = pair_common.seed;
            verdict = anm_direction(x, y, config);
        } else {
            verdict = igci_direction(x, y);
        }
        Report report;
        report.command = "discover-pair";
        report.seed = pair_common.seed;
        report.config = {{"file", pair_file}, {"method", pair_method}, {"alpha", pair_alpha}};
        report.results = verdict_to_json(verdict);
        emit_text(render_report(report), pair_common.output, out);
        return 0;
    }

    if (discover_dir->parsed()) {
        std::vector<LabeledPair> pairs;
        {
            std::ifstream meta(dir_meta);
            if (!meta) {
                throw DataFormatError(DataErrorCode::io_failure, "cannot open metadata: " + dir_meta);
            }
            std::string line;
            std::size_t line_number = 0;
            while (std::getline(meta, line)) {
                ++line_number;
                std::istringstream fields(line);
                std::string file, truth;
                if (!(fields >> file)) continue;  // blank line
                if (!(fields >> truth)) {
                    throw DataFormatError(DataErrorCode::ragged_line,
                                          dir_meta + ":" + std::to_string(line_number) +
                                              ": expected '<file> <direction>'");
                }
                std::string extra;
                if (fields >> extra) {
                    throw DataFormatError(DataErrorCode::ragged_line,
                                          dir_meta + ":" + std::to_string(line_number) +
                                              ": trailing fields");
                }
                LabeledPair pair;
                pair.id = file;
                pair.truth = parse_truth(truth, dir_meta + ":" + std::to_string(line_number));
                std::tie(pair.x, pair.y) = read_pair_file(dir_path + "/" + file);
                pairs.push_back(std::move(pair));
            }
        }
        AnmConfig anm_config;
        anm_config.alpha = dir_alpha;
        anm_config.seed = dir_common.seed;
        const DiscoverySummary summary = batch_discover(
            pairs, dir_method == "anm" ? DiscoveryMethod::anm : DiscoveryMethod::igci, anm_config);
        json verdicts = json::array();
        for (const auto& [id, verdict] : summary.verdicts) {
            json entry = verdict_to_json(verdict);
            entry["id"] = id;
            verdicts.push_back(entry);
        }
        Report report;
        report.command = "discover-dir";
        report.seed = dir_common.seed;
        report.config = {{"dir", dir_path}, {"meta", dir_meta}, {"method", dir_method}, {"alpha", dir_alpha}};
        report.results = {{"total", summary.total},
                          {"decided", summary.decided},
                          {"correct", summary.correct},
                          {"accuracy", summary.accuracy},
                          {"decision_rate", summary.decision_rate},
                          {"verdicts", verdicts}};
        emit_text(render_report(report), dir_common.output, out);
        return 0;
    }

    if (hsr->parsed()) {
        const PanelSpec spec = hsr_config.empty() ? PanelSpec{}
                                                  : parse_panel_spec_document(read_file(hsr_config));
        const Panel panel = simulate_panel(spec, hsr_common.seed);
        HsrConfig config;
        config.use_kernel = hsr_kernel;
        config.ridge = hsr_ridge;
        config.target_lag = hsr_lag;

        json targets = json::array();
        for (std::size_t k = 0; k < panel.targets.size(); ++k) {
            const HsrResult result = hsr_estimate(panel.targets[k], panel.siblings, config);
            const RecoveryScore vs_signal = recovery_score(result.estimate, panel.signals[k]);
            // The estimator cannot remove the target's own idiosyncratic noise,
            // so also score against signal + noise (the recoverable component).
            std::vector<double> recoverable(panel.signals[k]);
            for (std::size_t t = 0; t < recoverable.size(); ++t) {
                recoverable[t] += panel.target_noise[k][t];
            }
            const RecoveryScore vs_recoverable = recovery_score(result.estimate, recoverable);
            targets.push_back({{"target", k + 1},
                               {"r_squared", result.r_squared},
                               {"signal_correlation", vs_signal.correlation},
                               {"signal_offset_free_mse", vs_signal.offset_free_mse},
                               {"recoverable_correlation", vs_recoverable.correlation},
                               {"recoverable_offset_free_mse", vs_recoverable.offset_free_mse}});
        }
        Report report;
        report.command = "hsr";
        report.seed = hsr_common.seed;
        report.config = {{"config", hsr_config},
                         {"kernel", hsr_kernel},
                         {"ridge", hsr_ridge},
                         {"target_lag", hsr_lag},
                         {"n_targets", spec.n_targets},
                         {"n_siblings", spec.n_siblings},
                         {"n_time", spec.n_time},
                         {"noise_sigma", spec.noise_sigma}};
        report.results = {{"targets", targets}};
        emit_text(render_report(report), hsr_common.output, out);
        if (!hsr_panel_out.empty()) {
            std::ostringstream csv;
            write_panel_csv(panel, csv);
            emit_text(csv.str(), hsr_panel_out, out);
        }
        return 0;
    }

    if (second_law->parsed()) {
        if (law_bits == 0 || law_block <= 0 || law_bits % static_cast<std::size_t>(law_block) != 0) {
            throw std::invalid_argument("second-law: --bits must be a positive multiple of --block");
        }
        const ReversibleRule rule = ReversibleRule::random_mixing(law_block, law_common.seed);
        const BitState initial = BitState::ones_run(law_bits, law_bits / 2, law_ones);
        const auto series = second_law_run(initial, rule, law_steps);
        std::ostringstream csv;
        csv << "step,bits\n";
        for (std::size_t k = 0; k < series.size(); ++k) {
            csv << k << ',' << series[k] << '\n';
        }
        emit_text(csv.str(), law_common.output, out);
        return 0;
    }

    if (ssl->parsed()) {
        const SslGapSummary summary = ssl_gap_experiment(ssl_config, ssl_seeds, ssl_common.seed);
        Report report;
        report.command = "ssl-bench";
        report.seed = ssl_common.seed;
        report.config = {{"seeds", ssl_seeds},
                         {"labeled", ssl_config.n_labeled},
                         {"unlabeled", ssl_config.n_unlabeled},
                         {"rounds", ssl_config.rounds},
                         {"mu", ssl_config.mu},
                         {"sigma", ssl_config.sigma_anticausal},
                         {"theta", ssl_config.theta},
                         {"epsilon", ssl_config.epsilon},
                         {"test", ssl_config.n_test}};
        report.results = {{"anticausal_gains", summary.anticausal_gains},
                          {"causal_gains", summary.causal_gains},
                          {"median_anticausal_gain", summary.median_anticausal_gain},
                          {"median_causal_gain", summary.median_causal_gain},
                          {"sign_test_p", summary.sign_test_p},
                          {"degenerate", summary.degenerate}};
        emit_text(render_report(report), ssl_common.output, out);
        return 0;
    }

    err << "no subcommand selected\n";
    return 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const DataFormatError& e) {
        err << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace causalkit
