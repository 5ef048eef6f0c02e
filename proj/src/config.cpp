#include "qjump/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace qjump {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
};

using Document = std::map<std::string, Section>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return parts;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s) {
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<bool> to_bool(std::string_view s) {
    const std::string v = lower(trim(s));
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    return std::nullopt;
}

// Accepts "a", "a,b", "a+bi", "a-bi", "bi", optionally prefixed by "alpha=".
std::optional<Complex> to_complex(std::string_view s) {
    s = trim(s);
    if (const auto eq = s.find('='); eq != std::string_view::npos) s = trim(s.substr(eq + 1));
    if (s.find(',') != std::string_view::npos) {
        const auto parts = split(s, ',');
        if (parts.size() != 2) return std::nullopt;
        const auto re = to_double(parts[0]);
        const auto im = to_double(parts[1]);
        if (!re || !im) return std::nullopt;
        return Complex(*re, *im);
    }
    if (!s.empty() && (s.back() == 'i' || s.back() == 'j')) {
        s.remove_suffix(1);
        // split at the last sign that is not part of an exponent
        std::size_t cut = std::string_view::npos;
        for (std::size_t i = s.size(); i-- > 1;) {
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
                cut = i;
                break;
            }
        }
        if (cut == std::string_view::npos) {
            if (s.empty() || s == "+") return Complex(0.0, 1.0);
            if (s == "-") return Complex(0.0, -1.0);
            const auto im = to_double(s);
            if (!im) return std::nullopt;
            return Complex(0.0, *im);
        }
        const auto re = to_double(s.substr(0, cut));
        std::string_view im_text = s.substr(cut);
        double im_value = 0.0;
        if (im_text == "+") {
            im_value = 1.0;
        } else if (im_text == "-") {
            im_value = -1.0;
        } else {
            const auto im = to_double(im_text);
            if (!im) return std::nullopt;
            im_value = *im;
        }
        if (!re) return std::nullopt;
        return Complex(*re, im_value);
    }
    const auto re = to_double(s);
    if (!re) return std::nullopt;
    return Complex(*re, 0.0);
}

std::optional<std::vector<Complex>> parse_pairs(std::string_view text) {
    std::vector<Complex> values;
    std::string cleaned(text);
    std::replace(cleaned.begin(), cleaned.end(), ';', ' ');
    std::istringstream in(cleaned);
    std::string token;
    while (in >> token) {
        const auto parts = split(token, ',');
        if (parts.size() != 2) return std::nullopt;
        const auto re = to_double(parts[0]);
        const auto im = to_double(parts[1]);
        if (!re || !im) return std::nullopt;
        values.emplace_back(*re, *im);
    }
    return values;
}

Document tokenize(std::string_view text) {
    Document doc;
    std::vector<ConfigIssue> issues;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == ';') {
            if (end == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                issues.push_back({line_no, "malformed section header"});
            } else {
                current = lower(trim(line.substr(1, line.size() - 2)));
                auto [it, inserted] = doc.try_emplace(current);
                if (!inserted) {
                    issues.push_back({line_no, fmt::format("section [{}] appears twice", current)});
                } else {
                    it->second.line = line_no;
                }
            }
        } else {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                issues.push_back({line_no, "expected 'key = value'"});
            } else if (current.empty()) {
                issues.push_back({line_no, "key outside of any section"});
            } else {
                const std::string key(trim(line.substr(0, eq)));
                const std::string value(trim(line.substr(eq + 1)));
                if (key.empty()) {
                    issues.push_back({line_no, "empty key"});
                } else if (!doc[current].entries.try_emplace(key, Entry{value, line_no}).second) {
                    issues.push_back({line_no, fmt::format("duplicate key '{}' in [{}]", key, current)});
                }
            }
        }
        if (end == text.size()) break;
    }
    if (!issues.empty()) throw ParseError(std::move(issues));
    return doc;
}

// Typed access with issue collection.
class Reader {
public:
    explicit Reader(const Document& doc) : doc_(doc) {}

    const Entry* find(const std::string& section, const std::string& key) {
        used_.insert(section + "." + key);
        const auto s = doc_.find(section);
        if (s == doc_.end()) return nullptr;
        const auto e = s->second.entries.find(key);
        return e == s->second.entries.end() ? nullptr : &e->second;
    }

    int line_of(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (e) return e->line;
        const auto s = doc_.find(section);
        return s == doc_.end() ? 0 : s->second.line;
    }

    std::optional<double> real(const std::string& section, const std::string& key,
                               std::optional<double> fallback = std::nullopt) {
        const Entry* e = find(section, key);
        if (!e) {
            if (!fallback) missing(section, key);
            return fallback;
        }
        const auto v = to_double(e->value);
        if (!v) parse_issue(e->line, fmt::format("[{}] {}: '{}' is not a number", section, key, e->value));
        return v;
    }

    std::optional<std::uint64_t> integer(const std::string& section, const std::string& key,
                                         std::optional<std::uint64_t> fallback = std::nullopt) {
        const Entry* e = find(section, key);
        if (!e) {
            if (!fallback) missing(section, key);
            return fallback;
        }
        const auto v = to_u64(e->value);
        if (!v) parse_issue(e->line, fmt::format("[{}] {}: '{}' is not a nonnegative integer", section, key, e->value));
        return v;
    }

    std::optional<bool> boolean(const std::string& section, const std::string& key, bool fallback) {
        const Entry* e = find(section, key);
        if (!e) return fallback;
        const auto v = to_bool(e->value);
        if (!v) parse_issue(e->line, fmt::format("[{}] {}: '{}' is not a boolean", section, key, e->value));
        return v;
    }

    std::optional<std::string> text(const std::string& section, const std::string& key,
                                    std::optional<std::string> fallback = std::nullopt) {
        const Entry* e = find(section, key);
        if (!e) {
            if (!fallback) missing(section, key);
            return fallback;
        }
        return e->value;
    }

    std::optional<ComplexMatrix> matrix(const std::string& section, const std::string& key, Eigen::Index n) {
        const Entry* e = find(section, key);
        if (!e) {
            missing(section, key);
            return std::nullopt;
        }
        auto m = parse_matrix(e->value, n);
        if (!m) {
            parse_issue(e->line, fmt::format("[{}] {}: expected {} row-major 're,im' pairs", section, key, n * n));
        }
        return m;
    }

    void missing(const std::string& section, const std::string& key) {
        const auto s = doc_.find(section);
        validation_.push_back({s == doc_.end() ? 0 : s->second.line,
                               fmt::format("missing required key [{}] {}", section, key)});
    }
    void parse_issue(int line, std::string message) { parse_.push_back({line, std::move(message)}); }
    void invalid(int line, std::string message) { validation_.push_back({line, std::move(message)}); }

    void mark_section_used(const std::string& section) { sections_used_.insert(section); }

    void check_unknown() {
        static const std::set<std::string> known{"model", "state", "run", "output", "observables"};
        for (const auto& [name, section] : doc_) {
            if (!known.count(name)) {
                parse_issue(section.line, fmt::format("unknown section [{}]", name));
                continue;
            }
            if (sections_used_.count(name)) continue;
            for (const auto& [key, entry] : section.entries) {
                if (!used_.count(name + "." + key)) {
                    parse_issue(entry.line, fmt::format("unknown key '{}' in [{}]", key, name));
                }
            }
        }
    }

    void finish() {
        if (!parse_.empty()) {
            std::vector<ConfigIssue> all = parse_;
            all.insert(all.end(), validation_.begin(), validation_.end());
            std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
            throw ParseError(std::move(all));
        }
        if (!validation_.empty()) {
            std::stable_sort(validation_.begin(), validation_.end(),
                             [](const auto& a, const auto& b) { return a.line < b.line; });
            throw ValidationError(validation_);
        }
    }

    const Document& doc() const { return doc_; }

private:
    const Document& doc_;
    std::set<std::string> used_;
    std::set<std::string> sections_used_;
    std::vector<ConfigIssue> parse_;
    std::vector<ConfigIssue> validation_;
};

void check_generator(Reader& r, RunConfig& cfg, int line, const ParseOptions& options) {
    const GeneratorReport report = validate_generator(cfg.generator);
    for (const auto& check : report.checks) {
        if (check.passed) continue;
        if (!options.validate_generator) continue;
        r.invalid(line, fmt::format("generator check {} failed (value {:.6g}){}", check.name, check.value,
                                    check.detail.empty() ? "" : ": " + check.detail));
    }
}

void read_oscillator(Reader& r, RunConfig& cfg, const ParseOptions& options) {
    oscillator::OscillatorParams p;
    const auto levels = r.integer("model", "N");
    const auto m = r.real("model", "m", 1.0);
    const auto omega = r.real("model", "omega", 1.0);
    const auto hbar = r.real("model", "hbar", 1.0);
    const auto d11 = r.real("model", "D11", 0.0);
    const auto d22 = r.real("model", "D22", 0.0);
    const auto re12 = r.real("model", "ReD12", 0.0);
    const auto im12 = r.real("model", "ImD12", 0.0);
    if (!levels || !m || !omega || !hbar || !d11 || !d22 || !re12 || !im12) return;
    bool ok = true;
    if (*levels < 2) {
        r.invalid(r.line_of("model", "N"), "[model] N must be at least 2");
        ok = false;
    }
    for (const auto& [key, value] : {std::pair{"m", *m}, {"omega", *omega}, {"hbar", *hbar}}) {
        if (!(value > 0.0)) {
            r.invalid(r.line_of("model", key), fmt::format("[model] {} must be positive", key));
            ok = false;
        }
    }
    if (!ok) return;
    p.levels = static_cast<Eigen::Index>(*levels);
    p.mass = *m;
    p.omega = *omega;
    p.hbar = *hbar;
    p.diffusion = oscillator::OscillatorParams::make_diffusion(*d11, *d22, *re12, *im12);
    if (p.friction() < 0.0) cfg.warnings.push_back("negative friction constant (ImD12 < 0): the model is anti-damped");

    cfg.generator = oscillator::oscillator_generator_unchecked(p);
    cfg.oscillator = p;
    int d_line = r.line_of("model", "D22");
    for (const char* key : {"D11", "ReD12", "ImD12"}) {
        if (r.find("model", key)) d_line = std::min(d_line, r.line_of("model", key));
    }
    check_generator(r, cfg, d_line, options);
}

void read_explicit(Reader& r, RunConfig& cfg, const ParseOptions& options) {
    const auto dim = r.integer("model", "dim");
    const auto hbar = r.real("model", "hbar", 1.0);
    const auto k = r.integer("model", "couplings", 0);
    if (!dim || !hbar || !k) return;
    if (*dim < 1) {
        r.invalid(r.line_of("model", "dim"), "[model] dim must be positive");
        return;
    }
    if (!(*hbar > 0.0)) r.invalid(r.line_of("model", "hbar"), "[model] hbar must be positive");
    const auto n = static_cast<Eigen::Index>(*dim);
    GeneratorSpec g;
    g.dim = n;
    g.hbar = *hbar;
    auto h = r.matrix("model", "hamiltonian", n);
    bool ok = h.has_value();
    if (h) g.hamiltonian = std::move(*h);
    for (std::uint64_t a = 0; a < *k; ++a) {
        auto c = r.matrix("model", fmt::format("coupling.{}", a), n);
        ok = ok && c.has_value();
        if (c) g.couplings.push_back(std::move(*c));
    }
    if (*k > 0) {
        auto d = r.matrix("model", "coeff", static_cast<Eigen::Index>(*k));
        ok = ok && d.has_value();
        if (d) g.coeff = std::move(*d);
    } else {
        g.coeff = ComplexMatrix(0, 0);
    }
    if (!ok) return;
    cfg.generator = std::move(g);
    check_generator(r, cfg, r.line_of("model", "name"), options);
}

void read_state(Reader& r, RunConfig& cfg) {
    const auto spec = r.text("state", "initial");
    if (!spec || cfg.generator.dim == 0) return;
    const int line = r.line_of("state", "initial");
    const Eigen::Index n = cfg.generator.dim;
    const std::string s = lower(*spec);
    auto argument = [&](std::string_view name) -> std::optional<std::string_view> {
        std::string_view v(*spec);
        if (s.rfind(name, 0) != 0 || v.back() != ')') return std::nullopt;
        v.remove_prefix(name.size());
        v = trim(v);
        if (v.empty() || v.front() != '(') return std::nullopt;
        return trim(v.substr(1, v.size() - 2));
    };
    try {
        if (auto arg = argument("fock")) {
            const auto level = to_u64(*arg);
            if (!level) {
                r.parse_issue(line, "fock(n) needs a nonnegative integer level");
                return;
            }
            if (*level >= static_cast<std::uint64_t>(n)) {
                r.invalid(line, fmt::format("fock({}) is outside the {}-level space", *level, n));
                return;
            }
            cfg.initial_state = StateVector::basis(n, static_cast<Eigen::Index>(*level));
        } else if (auto arg = argument("coherent")) {
            const auto alpha = to_complex(*arg);
            if (!alpha) {
                r.parse_issue(line, "coherent(alpha) needs a complex amplitude such as 1, 1+0.5i or 1,0.5");
                return;
            }
            cfg.initial_state = oscillator::coherent_state(n, *alpha);
        } else if (s == "explicit") {
            const Entry* e = r.find("state", "amplitudes");
            if (!e) {
                r.missing("state", "amplitudes");
                return;
            }
            const auto values = parse_pairs(e->value);
            if (!values || static_cast<Eigen::Index>(values->size()) != n) {
                r.parse_issue(e->line, fmt::format("[state] amplitudes: expected {} 're,im' pairs", n));
                return;
            }
            ComplexVector v(n);
            for (Eigen::Index i = 0; i < n; ++i) v[i] = (*values)[static_cast<std::size_t>(i)];
            if (!(v.norm() > 1e-12)) {
                r.invalid(e->line, "[state] amplitudes are not normalizable");
                return;
            }
            cfg.initial_state = StateVector(std::move(v));
        } else {
            r.parse_issue(line, fmt::format("unknown initial state '{}'", *spec));
            return;
        }
    } catch (const InvalidState& e) {
        r.invalid(line, e.what());
        return;
    }
    r.find("state", "amplitudes");
    cfg.initial_description = *spec;
    cfg.initial_top_occupancy = oscillator::top_occupancy(*cfg.initial_state);
}

std::optional<ComplexMatrix> builtin_observable(const RunConfig& cfg, const std::string& name) {
    if (cfg.oscillator) {
        const auto ops = oscillator::build_operators(*cfg.oscillator);
        if (name == "x") return ops.position;
        if (name == "p") return ops.momentum;
        if (name == "H0") return ops.hamiltonian;
        if (name == "number") return ops.number;
    }
    if (name == "H" && cfg.generator.dim > 0) return cfg.generator.hamiltonian;
    return std::nullopt;
}

void read_run(Reader& r, RunConfig& cfg) {
    const auto dt = r.real("run", "dt");
    const auto t_final = r.real("run", "t_final");
    const auto m = r.integer("run", "n_trajectories", 1);
    const auto seed = r.integer("run", "seed", 0);
    const auto dump = r.boolean("run", "dump_density", false);
    const auto steps = r.boolean("run", "log_steps", false);
    if (dt) cfg.dt = *dt;
    if (t_final) cfg.t_final = *t_final;
    if (m) cfg.n_trajectories = *m;
    if (seed) cfg.seed = *seed;
    if (dump) cfg.dump_density = *dump;
    if (steps) cfg.log_steps = *steps;

    if (dt && !(*dt > 0.0)) r.invalid(r.line_of("run", "dt"), "[run] dt must be positive");
    if (t_final && !(*t_final > 0.0)) r.invalid(r.line_of("run", "t_final"), "[run] t_final must be positive");
    if (dt && t_final && *dt > 0.0 && *t_final > 0.0) {
        if (*dt > *t_final) r.invalid(r.line_of("run", "dt"), "[run] dt must not exceed t_final");
        try {
            cfg.trajectory_config(0).step_count();
        } catch (const InvalidConfig& e) {
            r.invalid(r.line_of("run", "t_final"), fmt::format("[run] {}", e.what()));
        }
    }
    if (m && *m < 1) r.invalid(r.line_of("run", "n_trajectories"), "[run] n_trajectories must be at least 1");

    if (const Entry* e = r.find("run", "snapshot_times")) {
        double previous = -1.0;
        for (auto part : split(e->value, ',')) {
            const auto t = to_double(part);
            if (!t) {
                r.parse_issue(e->line, fmt::format("[run] snapshot_times: '{}' is not a number", part));
                continue;
            }
            if (*t <= previous) r.invalid(e->line, "[run] snapshot_times must be strictly increasing");
            if (*t < 0.0 || (t_final && *t > *t_final * (1.0 + 1e-12))) {
                r.invalid(e->line, fmt::format("[run] snapshot time {} is outside [0, t_final]", *t));
            } else if (dt && *dt > 0.0) {
                const double ratio = *t / *dt;
                if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
                    r.invalid(e->line, fmt::format("[run] snapshot time {} is not a multiple of dt", *t));
                }
            }
            previous = *t;
            cfg.snapshot_times.push_back(*t);
        }
    } else if (t_final) {
        cfg.snapshot_times = {*t_final};
    }

    if (const Entry* e = r.find("run", "trajectories")) {
        cfg.trajectory_indices.clear();
        for (auto part : split(e->value, ',')) {
            const auto idx = to_u64(part);
            if (!idx) {
                r.parse_issue(e->line, fmt::format("[run] trajectories: '{}' is not an index", part));
                continue;
            }
            cfg.trajectory_indices.push_back(*idx);
        }
    }

    std::vector<std::string> names;
    const Entry* obs_entry = r.find("run", "observables");
    if (obs_entry) {
        for (auto part : split(obs_entry->value, ',')) {
            if (!part.empty()) names.emplace_back(part);
        }
    } else if (cfg.oscillator) {
        names = {"x", "p", "H0", "number"};
    }
    r.mark_section_used("observables");
    const auto obs_section = r.doc().find("observables");
    if (cfg.generator.dim == 0) return;
    for (const auto& name : names) {
        if (obs_section != r.doc().end() && obs_section->second.entries.count(name)) {
            auto m_op = r.matrix("observables", name, cfg.generator.dim);
            if (!m_op) continue;
            if (hermiticity_defect(*m_op) > 1e-10) {
                r.invalid(r.line_of("observables", name), fmt::format("observable '{}' is not Hermitian", name));
                continue;
            }
            cfg.observables.push_back({name, std::move(*m_op)});
        } else if (auto op = builtin_observable(cfg, name)) {
            cfg.observables.push_back({name, std::move(*op)});
        } else {
            r.invalid(obs_entry ? obs_entry->line : 0, fmt::format("unknown observable '{}'", name));
        }
    }
    if (obs_section != r.doc().end()) {
        for (const auto& [key, entry] : obs_section->second.entries) {
            if (std::find(names.begin(), names.end(), key) == names.end()) {
                r.invalid(entry.line, fmt::format("observable '{}' is defined but not listed in [run] observables", key));
            }
        }
    }
}

}  // namespace

ConfigError::ConfigError(std::string kind, std::vector<ConfigIssue> issues)
    : InvalidConfig([&] {
          std::string msg = kind + ":";
          for (const auto& i : issues) msg += fmt::format("\n  line {}: {}", i.line, i.message);
          return msg;
      }()),
      issues_(std::move(issues)) {}

TrajectoryConfig RunConfig::trajectory_config(std::uint64_t index) const {
    TrajectoryConfig t;
    t.dt = dt;
    t.t_final = t_final;
    t.seed = seed;
    t.trajectory_index = index;
    t.observables = observables;
    return t;
}

std::optional<ComplexMatrix> parse_matrix(std::string_view text, Eigen::Index n) {
    const auto values = parse_pairs(text);
    if (!values || static_cast<Eigen::Index>(values->size()) != n * n) return std::nullopt;
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = (*values)[static_cast<std::size_t>(i * n + j)];
    }
    return m;
}

RunConfig parse_config(std::string_view text, const ParseOptions& options) {
    const Document doc = tokenize(text);
    Reader r(doc);
    RunConfig cfg;

    const auto name = r.text("model", "name");
    if (name) {
        cfg.model_name = *name;
        if (*name == "damped_oscillator") {
            read_oscillator(r, cfg, options);
        } else if (*name == "explicit") {
            read_explicit(r, cfg, options);
        } else {
            r.invalid(r.line_of("model", "name"),
                      fmt::format("unknown model '{}' (expected damped_oscillator or explicit)", *name));
        }
    }
    read_state(r, cfg);
    read_run(r, cfg);
    if (const auto dir = r.text("output", "dir", std::string("out"))) cfg.output_dir = *dir;
    r.check_unknown();
    r.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const ParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), options);
}

}  // namespace qjump
