// scenario.hpp — declarative scenario configuration: schema, parser, renderer
// and the figure presets. The interface speaks ratios of 2J exclusively; the
// reference key waveguide.J2 exists only to make that contract explicit and is
// required to be 1.0.
//
// Document format: flat `key = value` lines, one nesting level for species,
// `#` comments. Example:
//
//   name = fig2a_M4
//   waveguide.J2 = 1.0
//   waveguide.N = 2001
//   species[0].delta_over_2J = 0.0
//   species[0].V_over_2J = 0.07
//   species[0].M = 4
//   species[0].m = 2
//   grid.t_max_2J = 300
//   grid.samples = 1501
//   solvers = both
//   outputs = abs_be,re_be,im_be,norm

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crwqed/errors.hpp"
#include "crwqed/model.hpp"
#include "crwqed/propagator.hpp"

namespace crw {

enum class OutputSeries {
    abs_be,
    re_be,
    im_be,
    norm,
    dark_term,
    bound_terms,
    cut_term,
    trapping_line,
};

inline const char* to_string(OutputSeries s) {
    switch (s) {
        case OutputSeries::abs_be: return "abs_be";
        case OutputSeries::re_be: return "re_be";
        case OutputSeries::im_be: return "im_be";
        case OutputSeries::norm: return "norm";
        case OutputSeries::dark_term: return "dark_term";
        case OutputSeries::bound_terms: return "bound_terms";
        case OutputSeries::cut_term: return "cut_term";
        case OutputSeries::trapping_line: return "trapping_line";
    }
    return "?";
}

inline std::optional<OutputSeries> output_series_from(const std::string& s) {
    for (OutputSeries o :
         {OutputSeries::abs_be, OutputSeries::re_be, OutputSeries::im_be, OutputSeries::norm,
          OutputSeries::dark_term, OutputSeries::bound_terms, OutputSeries::cut_term,
          OutputSeries::trapping_line})
        if (s == to_string(o)) return o;
    return std::nullopt;
}

struct SpeciesConfig {
    std::string label;
    double delta_over_2J = 0.0;
    double V_over_2J = 0.0;
    int M = 1;
    int m = 0;

    bool operator==(const SpeciesConfig&) const = default;
};

struct ScenarioConfig {
    std::string name = "scenario";
    double J2 = 1.0; // reference scale; the only accepted value is 1.0
    int num_sites = 2001;
    std::vector<SpeciesConfig> species;
    double t_max_2J = 0.0;
    int samples = 1501;
    bool solver_numeric = true;
    bool solver_analytic = true;
    std::vector<OutputSeries> outputs = {OutputSeries::abs_be, OutputSeries::re_be,
                                         OutputSeries::im_be, OutputSeries::norm};
    bool outputs_explicit = false; // document listed `outputs` itself
    std::string output_dir = ".";  // CLI-level, not part of the document schema

    // Reset non-explicit outputs to defaults consistent with the solver set.
    void refresh_default_outputs() {
        if (outputs_explicit) return;
        outputs = {OutputSeries::abs_be, OutputSeries::re_be, OutputSeries::im_be};
        if (solver_numeric) outputs.push_back(OutputSeries::norm);
    }

    bool wants(OutputSeries s) const {
        return std::find(outputs.begin(), outputs.end(), s) != outputs.end();
    }

    // Raw-unit system in the band-center frame: 2J = 1, omega_c = 0, x0 = N/2.
    SystemSpec to_system() const {
        SystemSpec sys;
        sys.waveguide.omega_c = 0.0;
        sys.waveguide.hopping_J = 0.5;
        sys.waveguide.num_sites = num_sites;
        sys.waveguide.coupling_site = -1;
        for (std::size_t i = 0; i < species.size(); ++i) {
            const auto& s = species[i];
            EmitterSpecies e;
            e.label = s.label.empty() ? std::string(1, static_cast<char>('A' + i)) : s.label;
            e.omega = s.delta_over_2J; // 2J = 1
            e.coupling_V = s.V_over_2J;
            e.total = s.M;
            e.excited = s.m;
            sys.species.push_back(std::move(e));
        }
        return sys;
    }

    TimeGrid to_grid() const {
        TimeGrid g;
        g.t_start = 0.0;
        g.t_end = t_max_2J; // raw time equals t*2J when 2J = 1
        g.num_samples = samples;
        return g;
    }

    // Schema fields only; output_dir is deliberately excluded.
    bool operator==(const ScenarioConfig& o) const {
        return name == o.name && J2 == o.J2 && num_sites == o.num_sites &&
               species == o.species && t_max_2J == o.t_max_2J && samples == o.samples &&
               solver_numeric == o.solver_numeric && solver_analytic == o.solver_analytic &&
               outputs == o.outputs;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ParseError(key, "expected a number, got '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(n);
    } catch (const std::exception&) {
        throw ParseError(key, "expected an integer, got '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

// Assign one key; shared by the parser and by sweep axes so both validate
// identically. Unknown keys are errors carrying the key path.
inline void apply_scenario_key(ScenarioConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;

    if (key == "name") {
        cfg.name = value;
        return;
    }
    if (key == "waveguide.J2") {
        cfg.J2 = parse_double(key, value);
        return;
    }
    if (key == "waveguide.N") {
        cfg.num_sites = parse_int(key, value);
        return;
    }
    if (key == "grid.t_max_2J") {
        cfg.t_max_2J = parse_double(key, value);
        return;
    }
    if (key == "grid.samples") {
        cfg.samples = parse_int(key, value);
        return;
    }
    if (key == "solvers") {
        cfg.solver_numeric = cfg.solver_analytic = false;
        for (const auto& s : detail::split_list(value)) {
            if (s == "both")
                cfg.solver_numeric = cfg.solver_analytic = true;
            else if (s == "numeric")
                cfg.solver_numeric = true;
            else if (s == "analytic")
                cfg.solver_analytic = true;
            else
                throw ParseError(key, "unknown solver '" + s + "'");
        }
        if (!cfg.solver_numeric && !cfg.solver_analytic)
            throw ParseError(key, "at least one solver required");
        return;
    }
    if (key == "outputs") {
        cfg.outputs.clear();
        cfg.outputs_explicit = true;
        for (const auto& s : detail::split_list(value)) {
            const auto o = output_series_from(s);
            if (!o) throw ParseError(key, "unknown output series '" + s + "'");
            cfg.outputs.push_back(*o);
        }
        return;
    }
    if (key.rfind("species[", 0) == 0) {
        const auto close = key.find(']');
        if (close == std::string::npos || key.size() < close + 2 || key[close + 1] != '.')
            throw ParseError(key, "malformed species key");
        const int i = parse_int(key, key.substr(8, close - 8));
        if (i < 0 || i > 1) throw ParseError(key, "species index must be 0 or 1");
        while (cfg.species.size() <= static_cast<std::size_t>(i)) cfg.species.push_back({});
        auto& sp = cfg.species[static_cast<std::size_t>(i)];
        const std::string field = key.substr(close + 2);
        if (field == "label") sp.label = value;
        else if (field == "delta_over_2J") sp.delta_over_2J = parse_double(key, value);
        else if (field == "V_over_2J") sp.V_over_2J = parse_double(key, value);
        else if (field == "M") sp.M = parse_int(key, value);
        else if (field == "m") sp.m = parse_int(key, value);
        else throw ParseError(key, "unknown species field");
        return;
    }
    throw ParseError(key, "unknown key");
}

// Full-document validation, throwing ParseError with the offending key path.
inline void validate_scenario(const ScenarioConfig& cfg) {
    if (cfg.J2 != 1.0)
        throw ParseError("waveguide.J2",
                         "interface is in units of 2J; the reference must be 1.0");
    if (cfg.num_sites < 3) throw ParseError("waveguide.N", "need at least 3 sites");
    if (cfg.species.empty()) throw ParseError("species", "at least one species required");
    if (cfg.species.size() > 2) throw ParseError("species", "at most two species supported");
    int excited = 0;
    for (std::size_t i = 0; i < cfg.species.size(); ++i) {
        const std::string base = "species[" + std::to_string(i) + "]";
        const auto& s = cfg.species[i];
        if (s.M < 1) throw ParseError(base + ".M", "must be >= 1");
        if (s.m < 0 || s.m > s.M)
            throw ParseError(base + ".m", "m (" + std::to_string(s.m) +
                                              ") must be in [0, M=" + std::to_string(s.M) + "]");
        if (s.V_over_2J < 0.0) throw ParseError(base + ".V_over_2J", "must be >= 0");
        if (s.m > 0) ++excited;
    }
    if (excited == 0) throw ParseError("species", "one species must have m >= 1");
    if (excited > 1)
        throw ParseError("species", "only one species may be initially excited");
    if (cfg.species.size() == 2 && !cfg.species[0].label.empty() &&
        cfg.species[0].label == cfg.species[1].label)
        throw ParseError("species[1].label", "labels must be unique");
    if (!(cfg.t_max_2J > 0.0)) throw ParseError("grid.t_max_2J", "must be > 0");
    if (cfg.samples < 2) throw ParseError("grid.samples", "need at least 2 samples");
    if (!cfg.solver_numeric && !cfg.solver_analytic)
        throw ParseError("solvers", "at least one solver required");
    const bool needs_analytic = cfg.wants(OutputSeries::dark_term) ||
                                cfg.wants(OutputSeries::bound_terms) ||
                                cfg.wants(OutputSeries::cut_term);
    if (needs_analytic && !cfg.solver_analytic)
        throw ParseError("outputs", "breakdown series require the analytic solver");
    if (cfg.wants(OutputSeries::norm) && !cfg.solver_numeric)
        throw ParseError("outputs", "norm requires the numeric solver");
}

inline ScenarioConfig parse_scenario(const std::string& document) {
    ScenarioConfig cfg;
    bool t_max_seen = false;
    std::stringstream ss(document);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("line " + std::to_string(line_no), "empty key");
        apply_scenario_key(cfg, key, value);
        if (key == "grid.t_max_2J") t_max_seen = true;
    }
    if (!t_max_seen) throw ParseError("grid.t_max_2J", "required key missing");
    cfg.refresh_default_outputs();
    validate_scenario(cfg);
    return cfg;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// Canonical rendering; parse_scenario(render_scenario(cfg)) == cfg.
inline std::string render_scenario(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "name = " << cfg.name << "\n";
    out << "waveguide.J2 = " << detail::format_double(cfg.J2) << "\n";
    out << "waveguide.N = " << cfg.num_sites << "\n";
    for (std::size_t i = 0; i < cfg.species.size(); ++i) {
        const auto& s = cfg.species[i];
        const std::string base = "species[" + std::to_string(i) + "]";
        if (!s.label.empty()) out << base << ".label = " << s.label << "\n";
        out << base << ".delta_over_2J = " << detail::format_double(s.delta_over_2J) << "\n";
        out << base << ".V_over_2J = " << detail::format_double(s.V_over_2J) << "\n";
        out << base << ".M = " << s.M << "\n";
        out << base << ".m = " << s.m << "\n";
    }
    out << "grid.t_max_2J = " << detail::format_double(cfg.t_max_2J) << "\n";
    out << "grid.samples = " << cfg.samples << "\n";
    out << "solvers = ";
    if (cfg.solver_numeric && cfg.solver_analytic) out << "both";
    else if (cfg.solver_numeric) out << "numeric";
    else out << "analytic";
    out << "\n";
    out << "outputs = ";
    for (std::size_t i = 0; i < cfg.outputs.size(); ++i)
        out << (i ? "," : "") << to_string(cfg.outputs[i]);
    out << "\n";
    return out.str();
}

// ------------------------------------------------------------ figure presets
//
// Parameter families matching the published plots. Where a caption fixes only
// part of the family (fig1 detunings, fig2 emitter counts) the remaining values
// are documented choices consistent with the caption.

inline std::vector<ScenarioConfig> figure_preset(const std::string& name) {
    std::vector<ScenarioConfig> out;
    char buf[64];

    const auto one_species = [](const std::string& nm, double delta, double V, int M, int m,
                                double t_max, int samples) {
        ScenarioConfig c;
        c.name = nm;
        c.species = {SpeciesConfig{"A", delta, V, M, m}};
        c.t_max_2J = t_max;
        c.samples = samples;
        return c;
    };

    if (name == "fig1") {
        for (const double d : {0.0, 0.5, 1.0, 1.25}) {
            std::snprintf(buf, sizeof(buf), "fig1_d%.2f", d);
            out.push_back(one_species(buf, d, 0.08, 3, 3, 400.0, 1601));
        }
    } else if (name == "fig2a") {
        for (const int M : {2, 3, 4, 6}) {
            std::snprintf(buf, sizeof(buf), "fig2a_M%d", M);
            out.push_back(one_species(buf, 0.0, 0.07, M, 2, 300.0, 1501));
        }
    } else if (name == "fig2b") {
        for (const int M : {3, 4, 5, 8}) {
            std::snprintf(buf, sizeof(buf), "fig2b_M%d", M);
            out.push_back(one_species(buf, 0.0, 0.07, M, 3, 300.0, 1501));
        }
    } else if (name == "fig3a" || name == "fig3b") {
        const double VB = (name == "fig3b") ? 0.6 : 0.1;
        for (int mA = 1; mA <= 5; ++mA) {
            ScenarioConfig c;
            std::snprintf(buf, sizeof(buf), "%s_mA%d", name.c_str(), mA);
            c.name = buf;
            c.species = {SpeciesConfig{"A", 0.3, 0.1, 5, mA},
                         SpeciesConfig{"B", 0.2, VB, 2, 0}};
            c.t_max_2J = 300.0;
            c.samples = 1501;
            out.push_back(std::move(c));
        }
    } else {
        throw std::invalid_argument("figure_preset: unknown name '" + name +
                                    "' (expected fig1, fig2a, fig2b, fig3a, fig3b)");
    }
    for (auto& c : out) validate_scenario(c);
    return out;
}

} // namespace crw
