#include "crsep/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "crsep/analytic.hpp"
#include "crsep/parallel.hpp"

namespace crsep {

namespace {

// ---------------------------------------------------------------------------
// Text helpers
// ---------------------------------------------------------------------------

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Config document
// ---------------------------------------------------------------------------

const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"scenario", {"scheme", "modulation", "p_detect", "p_false_alarm", "prior_busy", "noise_variance"}},
        {"mixture", {"weights", "variances", "gaussian_reference"}},
        {"constraints", {"mode", "p_pk_db", "q_avg_db", "q_pk_db", "mean_gain_to_primary", "p0", "p1",
                         "p0_db", "p1_db"}},
        {"sweep", {"axis", "start", "stop", "step"}},
        {"monte_carlo", {"trials", "seed", "chunk_size", "workers", "count_skips_as_correct"}},
        {"output", {"path", "json", "engines"}},
    };
    return keys;
}

struct Entry {
    std::string value;
    int line;
};

class Document {
  public:
    std::vector<Diagnostic> diagnostics;

    void parse(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        std::string section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = raw;
            if (const auto c = s.find_first_of("#;"); c != std::string::npos) s.erase(c);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']') {
                    error(line, "unterminated section header");
                    continue;
                }
                section = trim(s.substr(1, s.size() - 2));
                if (!known_keys().contains(section)) error(line, "unknown section [" + section + "]");
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                error(line, "expected 'key = value' or '[section]'");
                continue;
            }
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (section.empty()) {
                error(line, "key '" + key + "' appears before any [section]");
                continue;
            }
            const auto sec = known_keys().find(section);
            if (sec == known_keys().end()) continue;  // already reported
            if (std::find(sec->second.begin(), sec->second.end(), key) == sec->second.end()) {
                error(line, "unknown key '" + key + "' in [" + section + "]");
                continue;
            }
            auto& slot = entries_[section];
            if (slot.contains(key)) {
                error(line, "duplicate key '" + key + "' in [" + section + "] (first on line " +
                                std::to_string(slot[key].line) + ")");
                continue;
            }
            slot[key] = {value, line};
        }
    }

    const Entry* find(const std::string& section, const std::string& key) const {
        const auto s = entries_.find(section);
        if (s == entries_.end()) return nullptr;
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    int line_of(const std::string& section, const std::string& key) const {
        const Entry* e = find(section, key);
        return e ? e->line : 0;
    }

    void error(int line, std::string message) { diagnostics.push_back({line, std::move(message)}); }

    std::optional<double> number(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        auto v = parse_double(e->value);
        if (!v) error(e->line, section + "." + key + ": '" + e->value + "' is not a finite number");
        return v;
    }

    std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        std::vector<double> out;
        for (const auto& item : split_list(e->value)) {
            auto v = parse_double(item);
            if (!v) {
                error(e->line, section + "." + key + ": '" + item + "' is not a finite number");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        return out;
    }

    std::optional<std::uint64_t> unsigned_integer(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        auto v = parse_uint(e->value);
        if (!v) error(e->line, section + "." + key + ": '" + e->value + "' is not a nonnegative integer");
        return v;
    }

    std::optional<bool> boolean(const std::string& section, const std::string& key) {
        const Entry* e = find(section, key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
        if (e->value == "false" || e->value == "no" || e->value == "0") return false;
        error(e->line, section + "." + key + ": expected true or false");
        return std::nullopt;
    }

  private:
    std::map<std::string, std::map<std::string, Entry>> entries_;
};

std::optional<Scheme> parse_scheme(const std::string& s) {
    if (s == "sss") return Scheme::sss;
    if (s == "osa") return Scheme::osa;
    return std::nullopt;
}

std::optional<SweepAxis> parse_axis(const std::string& s) {
    if (s == "q_avg_db") return SweepAxis::q_avg_db;
    if (s == "p_pk_db") return SweepAxis::p_pk_db;
    if (s == "p_detect") return SweepAxis::p_detect;
    if (s == "p_false_alarm") return SweepAxis::p_false_alarm;
    return std::nullopt;
}

std::optional<ConstraintMode> parse_mode(const std::string& s) {
    if (s == "fixed") return ConstraintMode::fixed;
    if (s == "average") return ConstraintMode::average;
    if (s == "peak") return ConstraintMode::peak;
    return std::nullopt;
}

std::optional<Engines> parse_engines(const std::string& s) {
    Engines e{false, false, false};
    for (const auto& item : split_list(s)) {
        if (item == "analytic" || item == "a") e.analytic = true;
        else if (item == "bound" || item == "b") e.bound = true;
        else if (item == "monte_carlo" || item == "mc") e.monte_carlo = true;
        else return std::nullopt;
    }
    return e;
}

using LineOf = std::function<int(const std::string&, const std::string&)>;

std::vector<Diagnostic> check(const ExperimentConfig& c, const LineOf& line_of) {
    std::vector<Diagnostic> out;
    auto fail = [&](const std::string& section, const std::string& key, std::string msg) {
        out.push_back({line_of(section, key), std::move(msg)});
    };
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };

    if (c.schemes.empty()) fail("scenario", "scheme", "scenario.scheme: at least one scheme required");
    if (c.modulations.empty()) fail("scenario", "modulation", "scenario.modulation: at least one modulation required");
    if (c.sensing.empty()) fail("scenario", "p_detect", "scenario: at least one sensing pair required");
    for (const auto& pair : c.sensing) {
        if (!is_prob(pair.p_detect)) fail("scenario", "p_detect", "scenario.p_detect must lie in [0, 1]");
        if (!is_prob(pair.p_false_alarm))
            fail("scenario", "p_false_alarm", "scenario.p_false_alarm must lie in [0, 1]");
    }
    if (!is_prob(c.prior_busy)) fail("scenario", "prior_busy", "scenario.prior_busy must lie in [0, 1]");
    if (!(c.noise_variance > 0.0)) fail("scenario", "noise_variance", "scenario.noise_variance must be positive");

    const bool has_osa = std::find(c.schemes.begin(), c.schemes.end(), Scheme::osa) != c.schemes.end();
    const bool has_sss = std::find(c.schemes.begin(), c.schemes.end(), Scheme::sss) != c.schemes.end();
    if (!(c.mean_gain_to_primary > 0.0))
        fail("constraints", "mean_gain_to_primary", "constraints.mean_gain_to_primary must be positive");

    switch (c.mode) {
        case ConstraintMode::average:
            if (!c.q_avg_db && c.axis != SweepAxis::q_avg_db)
                fail("constraints", "mode", "constraints: average mode needs q_avg_db (or a q_avg_db sweep)");
            break;
        case ConstraintMode::peak:
            if (!c.q_pk_db) fail("constraints", "mode", "constraints: peak mode needs q_pk_db");
            if (c.axis == SweepAxis::q_avg_db)
                fail("sweep", "axis", "sweep.axis q_avg_db has no meaning in peak mode");
            break;
        case ConstraintMode::fixed:
            if (!c.p0) fail("constraints", "mode", "constraints: fixed mode needs p0 (or p0_db)");
            if (has_sss && !c.p1) fail("constraints", "mode", "constraints: fixed mode with SSS needs p1 (or p1_db)");
            if (c.p0 && !(*c.p0 >= 0.0)) fail("constraints", "p0", "constraints.p0 must be nonnegative");
            if (c.p1 && !(*c.p1 >= 0.0)) fail("constraints", "p1", "constraints.p1 must be nonnegative");
            if (c.axis == SweepAxis::q_avg_db || c.axis == SweepAxis::p_pk_db)
                fail("sweep", "axis", std::string("sweep.axis ") + to_string(c.axis) +
                                          " has no effect in fixed mode");
            break;
    }
    if (has_osa && c.p1 && *c.p1 != 0.0) {
        const int l = line_of("constraints", "p1") ? line_of("constraints", "p1") : line_of("constraints", "p1_db");
        out.push_back({l, "constraints.p1: OSA never transmits on a busy decision, so P1 must be 0"});
    }

    if (!(c.sweep_step > 0.0)) fail("sweep", "step", "sweep.step must be positive");
    if (!(c.sweep_stop >= c.sweep_start)) fail("sweep", "stop", "sweep range is empty (stop < start)");
    else if (c.sweep_step > 0.0 && (c.sweep_stop - c.sweep_start) / c.sweep_step > 1e5)
        fail("sweep", "step", "sweep has more than 100000 points");
    if ((c.axis == SweepAxis::p_detect || c.axis == SweepAxis::p_false_alarm) &&
        !(is_prob(c.sweep_start) && is_prob(c.sweep_stop)))
        fail("sweep", "start", "probability sweep must stay inside [0, 1]");

    if (!c.engines.analytic && !c.engines.bound && !c.engines.monte_carlo)
        fail("output", "engines", "output.engines: at least one engine required");
    if (c.monte_carlo.trials == 0) fail("monte_carlo", "trials", "monte_carlo.trials must be positive");
    if (c.monte_carlo.chunk_size == 0)
        fail("monte_carlo", "chunk_size", "monte_carlo.chunk_size must be positive");
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::q_avg_db: return "q_avg_db";
        case SweepAxis::p_pk_db: return "p_pk_db";
        case SweepAxis::p_detect: return "p_detect";
        case SweepAxis::p_false_alarm: return "p_false_alarm";
    }
    return "?";
}

const char* to_string(ConstraintMode mode) {
    switch (mode) {
        case ConstraintMode::fixed: return "fixed";
        case ConstraintMode::average: return "average";
        case ConstraintMode::peak: return "peak";
    }
    return "?";
}

std::string format_diagnostic(const Diagnostic& d) {
    return d.line > 0 ? "line " + std::to_string(d.line) + ": " + d.message : d.message;
}

std::vector<double> ExperimentConfig::sweep_values() const {
    std::vector<double> values;
    if (!(sweep_step > 0.0) || sweep_stop < sweep_start) return values;
    const auto count = static_cast<std::size_t>(std::floor((sweep_stop - sweep_start) / sweep_step + 1e-9)) + 1;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Round away the accumulation error of decimal steps.
        const double v = sweep_start + static_cast<double>(i) * sweep_step;
        values.push_back(std::round(v * 1e12) / 1e12);
    }
    return values;
}

ParseResult parse_config(const std::string& text) {
    Document doc;
    doc.parse(text);
    ExperimentConfig c;

    auto required = [&](const std::string& section, const std::string& key) -> const Entry* {
        const Entry* e = doc.find(section, key);
        if (!e) doc.error(0, "missing required key " + section + "." + key);
        return e;
    };

    // [scenario]
    if (const Entry* e = required("scenario", "scheme")) {
        c.schemes.clear();
        for (const auto& item : split_list(e->value)) {
            if (auto s = parse_scheme(item)) c.schemes.push_back(*s);
            else doc.error(e->line, "scenario.scheme: unknown scheme '" + item + "' (expected sss or osa)");
        }
    }
    if (const Entry* e = required("scenario", "modulation")) {
        c.modulations.clear();
        for (const auto& item : split_list(e->value)) {
            try {
                c.modulations.push_back(Modulation::parse(item));
            } catch (const std::exception& ex) {
                doc.error(e->line, std::string("scenario.modulation: ") + ex.what());
            }
        }
    }
    {
        const auto pd = doc.numbers("scenario", "p_detect");
        const auto pf = doc.numbers("scenario", "p_false_alarm");
        if (!doc.find("scenario", "p_detect")) doc.error(0, "missing required key scenario.p_detect");
        if (!doc.find("scenario", "p_false_alarm")) doc.error(0, "missing required key scenario.p_false_alarm");
        if (pd && pf) {
            if (pd->size() != pf->size()) {
                doc.error(doc.line_of("scenario", "p_false_alarm"),
                          "scenario: p_detect and p_false_alarm lists must have equal length");
            } else {
                c.sensing.clear();
                for (std::size_t i = 0; i < pd->size(); ++i) c.sensing.push_back({(*pd)[i], (*pf)[i]});
            }
        }
    }
    if (auto v = doc.number("scenario", "prior_busy")) c.prior_busy = *v;
    if (auto v = doc.number("scenario", "noise_variance")) c.noise_variance = *v;

    // [mixture]
    {
        const auto w = doc.numbers("mixture", "weights");
        const auto v = doc.numbers("mixture", "variances");
        if (w.has_value() != v.has_value()) {
            doc.error(doc.line_of("mixture", w ? "weights" : "variances"),
                      "mixture: weights and variances must be given together");
        } else if (w && v) {
            const int line = doc.line_of("mixture", "weights");
            bool ok = true;
            if (w->size() != v->size() || w->empty()) {
                doc.error(line, "mixture: weights and variances must be nonempty lists of equal length");
                ok = false;
            } else {
                double sum = 0.0;
                for (double x : *w) {
                    if (x < 0.0) {
                        doc.error(line, "mixture: every weight must be nonnegative");
                        ok = false;
                    }
                    sum += x;
                }
                if (std::abs(sum - 1.0) > 1e-12) {
                    doc.error(line, "mixture: weights must sum to 1 (they sum to " + format_number(sum) + ")");
                    ok = false;
                }
                for (double x : *v) {
                    if (!(x > 0.0)) {
                        doc.error(doc.line_of("mixture", "variances"), "mixture: every variance must be positive");
                        ok = false;
                    }
                }
            }
            if (ok) {
                std::vector<MixtureComponent> comps;
                for (std::size_t i = 0; i < w->size(); ++i) comps.push_back({(*w)[i], (*v)[i]});
                c.mixture = GaussianMixture(std::move(comps));
            }
        }
        if (auto b = doc.boolean("mixture", "gaussian_reference")) c.gaussian_reference = *b;
    }

    // [constraints]
    if (const Entry* e = required("constraints", "mode")) {
        if (auto m = parse_mode(e->value)) c.mode = *m;
        else doc.error(e->line, "constraints.mode: unknown mode '" + e->value + "' (expected fixed, average or peak)");
    }
    if (auto v = doc.number("constraints", "p_pk_db")) c.p_pk_db = *v;
    c.q_avg_db = doc.number("constraints", "q_avg_db");
    c.q_pk_db = doc.number("constraints", "q_pk_db");
    if (auto v = doc.number("constraints", "mean_gain_to_primary")) c.mean_gain_to_primary = *v;
    auto power = [&](const char* linear, const char* db) -> std::optional<double> {
        const auto lin = doc.number("constraints", linear);
        const auto dbv = doc.number("constraints", db);
        if (lin && dbv) {
            doc.error(doc.line_of("constraints", db), std::string("constraints: give either ") + linear +
                                                          " or " + db + ", not both");
            return std::nullopt;
        }
        if (dbv) return db_to_linear(*dbv);
        return lin;
    };
    c.p0 = power("p0", "p0_db");
    c.p1 = power("p1", "p1_db");

    // [sweep]
    if (const Entry* e = required("sweep", "axis")) {
        if (auto a = parse_axis(e->value)) c.axis = *a;
        else doc.error(e->line, "sweep.axis: unknown axis '" + e->value + "'");
    }
    for (const char* key : {"start", "stop", "step"}) {
        if (!doc.find("sweep", key)) {
            doc.error(0, std::string("missing required key sweep.") + key);
            continue;
        }
        const auto v = doc.number("sweep", key);
        if (!v) continue;
        if (std::string(key) == "start") c.sweep_start = *v;
        else if (std::string(key) == "stop") c.sweep_stop = *v;
        else c.sweep_step = *v;
    }

    // [monte_carlo]
    if (auto v = doc.unsigned_integer("monte_carlo", "trials")) c.monte_carlo.trials = *v;
    if (auto v = doc.unsigned_integer("monte_carlo", "seed")) c.monte_carlo.master_seed = *v;
    if (auto v = doc.unsigned_integer("monte_carlo", "chunk_size")) c.monte_carlo.chunk_size = *v;
    if (auto v = doc.unsigned_integer("monte_carlo", "workers")) c.monte_carlo.workers = static_cast<unsigned>(*v);
    if (auto v = doc.boolean("monte_carlo", "count_skips_as_correct")) c.monte_carlo.count_skips_as_correct = *v;

    // [output]
    if (const Entry* e = doc.find("output", "engines")) {
        if (auto en = parse_engines(e->value)) c.engines = *en;
        else doc.error(e->line, "output.engines: expected a list of analytic, bound, monte_carlo");
    }
    if (const Entry* e = doc.find("output", "path")) c.output_path = e->value;
    if (const Entry* e = doc.find("output", "json")) c.json_path = e->value;

    ParseResult result;
    result.diagnostics = std::move(doc.diagnostics);
    for (auto& d : check(c, [&](const std::string& s, const std::string& k) { return doc.line_of(s, k); }))
        result.diagnostics.push_back(std::move(d));
    std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    if (result.diagnostics.empty()) result.config = std::move(c);
    return result;
}

std::vector<Diagnostic> validate(const std::string& text) { return parse_config(text).diagnostics; }

std::vector<Diagnostic> validate(const ExperimentConfig& config) {
    return check(config, [](const std::string&, const std::string&) { return 0; });
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kCommonScenario = R"(noise_variance = 0.01
prior_busy = 0.4

[mixture]
weights = 0.25, 0.25, 0.25, 0.25
variances = 0.2, 0.4, 0.6, 0.8
gaussian_reference = true
)";

constexpr const char* kCommonTail = R"(
[monte_carlo]
trials = 1000000
seed = 20140601
chunk_size = 65536

[output]
engines = analytic, bound, monte_carlo
)";

std::string make_preset(const std::string& title, const std::string& scenario,
                        const std::string& constraints, const std::string& sweep) {
    return "# " + title + "\n[scenario]\n" + scenario + kCommonScenario + "\n[constraints]\n" +
           constraints + "mean_gain_to_primary = 1\n\n[sweep]\n" + sweep + kCommonTail;
}

const std::map<std::string, std::string>& presets() {
    static const std::map<std::string, std::string> table = {
        {"fig1", make_preset("SSS: SEP and optimal powers vs average interference limit",
                             "scheme = sss\nmodulation = 2x1, 2x2, 8x1, 8x2\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = average\np_pk_db = 4\n",
                             "axis = q_avg_db\nstart = -20\nstop = 0\nstep = 1\n")},
        {"fig2", make_preset("OSA: SEP and power vs average interference limit",
                             "scheme = osa\nmodulation = 2x1, 2x2, 8x1, 8x2\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = average\np_pk_db = 4\n",
                             "axis = q_avg_db\nstart = -20\nstop = 0\nstep = 1\n")},
        {"fig3", make_preset("SSS and OSA: SEP vs detection probability, average interference",
                             "scheme = sss, osa\nmodulation = 2x2, 8x1\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = average\np_pk_db = 4\nq_avg_db = -10\n",
                             "axis = p_detect\nstart = 0.5\nstop = 1\nstep = 0.05\n")},
        {"fig4", make_preset("SSS and OSA: SEP vs false-alarm probability, average interference",
                             "scheme = sss, osa\nmodulation = 2x2, 8x1\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = average\np_pk_db = 4\nq_avg_db = -10\n",
                             "axis = p_false_alarm\nstart = 0\nstop = 1\nstep = 0.05\n")},
        {"fig5", make_preset("SSS: SEP vs peak power under a peak interference limit",
                             "scheme = sss\nmodulation = 2x1, 2x2, 8x1, 8x2\np_detect = 0.9, 1\np_false_alarm = 0.05, 0\n",
                             "mode = peak\nq_pk_db = 4\n",
                             "axis = p_pk_db\nstart = 0\nstop = 20\nstep = 1\n")},
        {"fig6", make_preset("OSA: SEP vs peak power under a peak interference limit",
                             "scheme = osa\nmodulation = 2x1, 2x2, 8x1, 8x2\np_detect = 0.9, 1\np_false_alarm = 0.05, 0\n",
                             "mode = peak\nq_pk_db = 4\n",
                             "axis = p_pk_db\nstart = 0\nstop = 20\nstep = 1\n")},
        {"fig7", make_preset("SSS and OSA: SEP vs detection probability, peak interference",
                             "scheme = sss, osa\nmodulation = 2x2, 8x1\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = peak\np_pk_db = 4\nq_pk_db = 0\n",
                             "axis = p_detect\nstart = 0.5\nstop = 1\nstep = 0.05\n")},
        {"fig8", make_preset("SSS and OSA: SEP vs false-alarm probability, peak interference",
                             "scheme = sss, osa\nmodulation = 2x2, 8x1\np_detect = 0.9\np_false_alarm = 0.05\n",
                             "mode = peak\np_pk_db = 4\nq_pk_db = 0\n",
                             "axis = p_false_alarm\nstart = 0\nstop = 1\nstep = 0.05\n")},
    };
    return table;
}

}  // namespace

std::string preset_text(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw std::invalid_argument("unknown preset '" + name + "'");
    return it->second;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, text] : presets()) names.push_back(name);
    return names;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

std::vector<Series> expand_series(const ExperimentConfig& config) {
    std::vector<std::pair<std::string, GaussianMixture>> models = {{"mixture", config.mixture}};
    if (config.gaussian_reference)
        models.emplace_back("gaussian", GaussianMixture::gaussian(mixture_total_variance(config.mixture)));

    std::vector<Series> out;
    for (Scheme scheme : config.schemes)
        for (const SensingPair& pair : config.sensing)
            for (const auto& [name, mix] : models)
                for (const Modulation& mod : config.modulations) {
                    const std::string label = std::string(to_string(scheme)) + "/" + mod.label() + "/" +
                                              name + "/pd=" + format_number(pair.p_detect) +
                                              "/pf=" + format_number(pair.p_false_alarm);
                    out.push_back({label, scheme, mod, pair, name, mix});
                }
    return out;
}

Scenario build_scenario(const ExperimentConfig& config, const Series& series, double sweep_value) {
    Scenario s;
    s.scheme = series.scheme;
    s.modulation = series.modulation;
    s.sensing = {series.sensing.p_detect, series.sensing.p_false_alarm, config.prior_busy};
    s.noise_variance = config.noise_variance;
    s.interference = series.interference;

    double p_pk_db = config.p_pk_db;
    std::optional<double> q_avg_db = config.q_avg_db;
    switch (config.axis) {
        case SweepAxis::q_avg_db: q_avg_db = sweep_value; break;
        case SweepAxis::p_pk_db: p_pk_db = sweep_value; break;
        case SweepAxis::p_detect: s.sensing.p_detect = sweep_value; break;
        case SweepAxis::p_false_alarm: s.sensing.p_false_alarm = sweep_value; break;
    }
    s.constraints.peak_power = db_to_linear(p_pk_db);
    if (q_avg_db) s.constraints.avg_interference = db_to_linear(*q_avg_db);
    if (config.q_pk_db) s.constraints.peak_interference = db_to_linear(*config.q_pk_db);
    s.constraints.mean_gain_to_primary = config.mean_gain_to_primary;
    s.sensing.validate();

    switch (config.mode) {
        case ConstraintMode::fixed:
            s.p_idle = config.p0.value_or(0.0);
            s.p_busy = s.scheme == Scheme::osa ? 0.0 : config.p1.value_or(0.0);
            break;
        case ConstraintMode::average:
            if (s.scheme == Scheme::sss) {
                const PowerAllocation a = optimize_powers_sss(s.modulation, s.sensing, s.noise_variance,
                                                              s.interference, s.constraints);
                s.p_idle = a.p_idle;
                s.p_busy = a.p_busy;
            } else {
                s.p_idle = max_power_osa(s.constraints, s.sensing.p_detect);
                s.p_busy = 0.0;
            }
            break;
        case ConstraintMode::peak: {
            s.policy = PowerPolicy::peak_interference;
            const double mean_power = mean_peak_policy_power(s.constraints);
            s.p_idle = mean_power;
            s.p_busy = s.scheme == Scheme::osa ? 0.0 : mean_power;
            break;
        }
    }
    s.validate();
    return s;
}

ResultRow evaluate_point(const ExperimentConfig& config, const Series& series, std::size_t sweep_index,
                         double sweep_value, unsigned mc_workers) {
    ResultRow row;
    row.series = series.label;
    row.scheme = series.scheme;
    row.modulation = series.modulation;
    row.interference = series.interference_name;
    row.p_detect = config.axis == SweepAxis::p_detect ? sweep_value : series.sensing.p_detect;
    row.p_false_alarm = config.axis == SweepAxis::p_false_alarm ? sweep_value : series.sensing.p_false_alarm;
    row.sweep_value = sweep_value;
    try {
        const Scenario s = build_scenario(config, series, sweep_value);
        row.p0 = s.p_idle;
        row.p1 = s.p_busy;
        const bool peak = s.policy == PowerPolicy::peak_interference;
        if (config.engines.analytic) row.sep_analytic = peak ? sep_peak_interference_exact(s) : sep_rayleigh(s);
        if (config.engines.bound) row.sep_bound = peak ? sep_peak_interference(s) : sep_upper_bound(s);
        if (config.engines.monte_carlo) {
            MonteCarloConfig mc = config.monte_carlo;
            mc.master_seed = mix_seed(config.monte_carlo.master_seed, sweep_index);
            mc.workers = mc_workers;
            const SepEstimate est = run_monte_carlo(s, mc);
            row.sep_mc = est.sep;
            row.mc_ci95 = est.ci95_half_width;
            row.skip_fraction = est.skip_fraction();
            row.trials = est.trials;
        }
    } catch (const std::exception& e) {
        row.status = e.what();
    }
    return row;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
    if (const auto diags = validate(config); !diags.empty())
        throw std::invalid_argument("invalid experiment: " + format_diagnostic(diags.front()));
    const std::vector<Series> series = expand_series(config);
    const std::vector<double> sweep = config.sweep_values();
    std::vector<ResultRow> rows(series.size() * sweep.size());
    parallel_for(rows.size(), config.monte_carlo.workers, [&](std::size_t i) {
        const std::size_t si = i / sweep.size();
        const std::size_t pi = i % sweep.size();
        rows[i] = evaluate_point(config, series[si], pi, sweep[pi], 1);
    });
    return rows;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& columns() {
    static const std::vector<std::string> cols = {
        "series", "scheme", "modulation", "interference", "p_detect", "p_false_alarm", "sweep_value",
        "p0", "p1", "sep_analytic", "sep_bound", "sep_mc", "mc_ci95", "skip_fraction", "trials", "status"};
    return cols;
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> cells(const ResultRow& r) {
    return {r.series,
            to_string(r.scheme),
            r.modulation.label(),
            r.interference,
            format_number(r.p_detect),
            format_number(r.p_false_alarm),
            format_number(r.sweep_value),
            opt(r.p0),
            opt(r.p1),
            opt(r.sep_analytic),
            opt(r.sep_bound),
            opt(r.sep_mc),
            opt(r.mc_ci95),
            opt(r.skip_fraction),
            r.trials ? std::to_string(*r.trials) : std::string(),
            r.status};
}

}  // namespace

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out;
    for (std::size_t i = 0; i < columns().size(); ++i) out += (i ? "," : "") + columns()[i];
    out += '\n';
    for (const ResultRow& r : rows) {
        const auto c = cells(r);
        for (std::size_t i = 0; i < c.size(); ++i) out += (i ? "," : "") + csv_escape(c[i]);
        out += '\n';
    }
    return out;
}

std::string to_json(const std::vector<ResultRow>& rows) {
    // Numbers go through the same 9-digit rounding as the CSV.
    auto num = [](const std::optional<double>& v) -> nlohmann::json {
        if (!v) return nullptr;
        return std::stod(format_number(*v));
    };
    nlohmann::json doc;
    doc["columns"] = columns();
    doc["rows"] = nlohmann::json::array();
    for (const ResultRow& r : rows) {
        nlohmann::json j;
        j["series"] = r.series;
        j["scheme"] = to_string(r.scheme);
        j["modulation"] = r.modulation.label();
        j["interference"] = r.interference;
        j["p_detect"] = num(r.p_detect);
        j["p_false_alarm"] = num(r.p_false_alarm);
        j["sweep_value"] = num(r.sweep_value);
        j["p0"] = num(r.p0);
        j["p1"] = num(r.p1);
        j["sep_analytic"] = num(r.sep_analytic);
        j["sep_bound"] = num(r.sep_bound);
        j["sep_mc"] = num(r.sep_mc);
        j["mc_ci95"] = num(r.mc_ci95);
        j["skip_fraction"] = num(r.skip_fraction);
        j["trials"] = r.trials ? nlohmann::json(*r.trials) : nlohmann::json(nullptr);
        j["status"] = r.status;
        doc["rows"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

}  // namespace crsep
