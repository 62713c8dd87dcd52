#include "regchrom/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "regchrom/asymptotics.hpp"
#include "regchrom/coloring.hpp"
#include "regchrom/errors.hpp"
#include "regchrom/genfunc.hpp"
#include "regchrom/montecarlo.hpp"
#include "regchrom/pairing.hpp"
#include "regchrom/rational.hpp"
#include "regchrom/rng.hpp"
#include "regchrom/spectral.hpp"
#include "regchrom/variational.hpp"

#ifndef REGCHROM_VERSION
#define REGCHROM_VERSION "unknown"
#endif
#ifndef REGCHROM_BUILD_TYPE
#define REGCHROM_BUILD_TYPE "unknown"
#endif
#ifndef REGCHROM_COMPILER
#define REGCHROM_COMPILER "unknown"
#endif

namespace regchrom {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommonKeys = {"seed", "workers", "out", "format"};

const std::map<std::string, std::string>& descriptions() {
    static const std::map<std::string, std::string> d = {
        {"predict", "Predicted chromatic number of random d-regular graphs"},
        {"theory", "Asymptotic formula values for (n, d, k)"},
        {"sample", "Draw one random pairing and its multigraph"},
        {"color", "Chromatic number (and balanced colouring count) of a multigraph file"},
        {"exact", "Exact rational E[Y], E[Y^2] or coefficient"},
        {"moments", "Monte Carlo moment estimates with standard errors"},
        {"chifreq", "Chromatic number frequencies over simple random regular graphs"},
        {"converge", "Exact versus asymptotic E[Y] for a list of n"},
        {"verify", "Numerical verification of the eigenvector and determinant lemmas"},
        {"optimize-phi", "Maximise phi over the Birkhoff polytope"},
    };
    return d;
}

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
    static const std::map<std::string, std::vector<ParamSpec>> s = {
        {"predict",
         {{"d", "", "degree", true}, {"d-range", "", "inclusive degree range a..b", true}}},
        {"theory",
         {{"n", "", "number of vertices"},
          {"d", "", "degree"},
          {"k", "", "number of colours"},
          {"m-max", "4", "largest cycle length for the correction factors"}}},
        {"sample",
         {{"n", "", "number of vertices"},
          {"d", "", "degree"},
          {"stream", "0", "RNG stream index"},
          {"m-max", "4", "largest cycle length to count"}}},
        {"color",
         {{"input", "-", "multigraph text file, - for standard input"},
          {"k", "0", "also count balanced k-colourings when k > 0"}}},
        {"exact",
         {{"n", "", "number of vertices"},
          {"d", "", "degree"},
          {"k", "", "number of colours"},
          {"what", "ey", "ey | ey2 | coeff"},
          {"c", "", "comma separated exponents for coeff (default dn/k each)", true}}},
        {"moments",
         {{"n", "", "number of vertices"},
          {"d", "", "degree"},
          {"k", "", "number of colours"},
          {"samples", "10000", "number of pairings"},
          {"cycles", "1:1;2:1;3:1", "products of [X_m]_p, e.g. 1:1;2:1,3:2"}}},
        {"chifreq",
         {{"n", "", "number of vertices"}, {"d", "", "degree"}, {"samples", "500", "number of pairings"}}},
        {"converge",
         {{"d", "", "degree"}, {"k", "", "number of colours"}, {"ns", "", "comma separated list of n"}}},
        {"verify",
         {{"lemmas", "evec2,evec3,gaussdet", "comma separated subset of evec2,evec3,gaussdet"},
          {"k-range", "3..12", "inclusive k range a..b"},
          {"trials", "1000", "random matrices per k for evec3"},
          {"r", "1,2", "scales for gaussdet"}}},
        {"optimize-phi",
         {{"k", "", "matrix size"},
          {"d", "", "degree"},
          {"restarts", "50", "random restarts"},
          {"tol", "1e-12", "sup-norm step tolerance"},
          {"max-iterations", "200000", "iteration cap per restart"}}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || text.empty())
        throw InputError("parameter '" + key + "': cannot parse '" + text + "'");
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw InputError("parameter '" + key + "': cannot parse '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

class Params {
public:
    explicit Params(const RunConfig& c) : c_(c) {}

    const std::string& str(const std::string& key) const {
        const auto it = c_.params.find(key);
        if (it == c_.params.end()) throw InputError("missing parameter '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const {
        const auto it = c_.params.find(key);
        return it != c_.params.end() && !it->second.empty();
    }
    long integer(const std::string& key, long lo, long hi = std::numeric_limits<long>::max()) const {
        const long v = parse_number<long>(key, str(key));
        if (v < lo || v > hi)
            throw InputError("parameter '" + key + "' = " + std::to_string(v) + " outside [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "]");
        return v;
    }
    int small(const std::string& key, int lo, int hi = 1 << 20) const {
        return static_cast<int>(integer(key, lo, hi));
    }
    double real(const std::string& key) const { return parse_double(key, str(key)); }
    std::vector<int> int_list(const std::string& key, int lo) const {
        std::vector<int> out;
        for (const auto& item : split(str(key), ',')) {
            const int v = parse_number<int>(key, item);
            if (v < lo) throw InputError("parameter '" + key + "': entry " + item + " below " + std::to_string(lo));
            out.push_back(v);
        }
        if (out.empty()) throw InputError("parameter '" + key + "' is empty");
        return out;
    }
    std::pair<long, long> range(const std::string& key, long lo) const {
        const std::string& t = str(key);
        const auto dots = t.find("..");
        if (dots == std::string::npos) throw InputError("parameter '" + key + "': expected a..b, got '" + t + "'");
        const long a = parse_number<long>(key, t.substr(0, dots));
        const long b = parse_number<long>(key, t.substr(dots + 2));
        if (a < lo || b < a) throw InputError("parameter '" + key + "': invalid range '" + t + "'");
        return {a, b};
    }

private:
    const RunConfig& c_;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json rational_json(const Rational& q) { return json{{"value", to_string(q)}, {"decimal", to_double(q)}}; }

json logreal_json(const LogReal& r) {
    json j{{"log", static_cast<double>(r.log)}};
    j["value"] = r.value ? json(*r.value) : json(nullptr);
    return j;
}

struct Output {
    json body;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::optional<std::string> graph_text;
};

std::vector<std::string> verdict_strings(const std::vector<long>& v) {
    std::vector<std::string> s;
    for (long x : v) s.push_back(std::to_string(x));
    return s;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

json prediction_json(long d, std::vector<std::string>& row) {
    const ChromaticPrediction p = predict_chromatic(d);
    const long q = p.k - 2;
    const MolloyReedCheck mr = molloy_reed_excludes(d, q);
    row = {std::to_string(d),           std::to_string(p.k),       join(verdict_strings(p.verdict), ","),
           p.second_condition ? "true" : "false", std::to_string(q), mr.excludes ? "true" : "false",
           mr.weak_criterion ? "true" : "false"};
    return json{{"d", d},
                {"k", p.k},
                {"verdict", p.verdict},
                {"second_condition", p.second_condition},
                {"molloy_reed", {{"q", q}, {"excludes", mr.excludes}, {"weak_criterion", mr.weak_criterion}}}};
}

Output cmd_predict(const Params& p) {
    if (p.has("d") == p.has("d-range")) throw InputError("give exactly one of --d and --d-range");
    Output o;
    o.header = {"d", "k", "verdict", "second_condition", "mr_q", "mr_excludes", "mr_weak_criterion"};
    if (p.has("d")) {
        std::vector<std::string> row;
        o.body = prediction_json(p.integer("d", 3), row);
        o.rows.push_back(row);
        return o;
    }
    const auto [a, b] = p.range("d-range", 3);
    if (b - a >= 100000) throw GuardError("d-range spans more than 100000 degrees");
    o.body = json::array();
    for (long d = a; d <= b; ++d) {
        std::vector<std::string> row;
        o.body.push_back(prediction_json(d, row));
        o.rows.push_back(row);
    }
    return o;
}

template <class F>
json attempt(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return json{{"error", e.code()}, {"message", e.what()}};
    }
}

Output cmd_theory(const Params& p) {
    const long n = p.integer("n", 1);
    const int d = p.small("d", 1);
    const int k = p.small("k", 2);
    const int m_max = p.small("m-max", 1, 64);
    json j{{"n", n}, {"d", d}, {"k", k}};
    j["colourability_threshold"] = colourability_threshold(k);
    j["below_threshold"] = k >= 3 ? json(below_colourability_threshold(d, k)) : json(nullptr);
    j["prediction"] = attempt([&] {
        const ChromaticPrediction pr = predict_chromatic(d);
        return json{{"k", pr.k}, {"verdict", pr.verdict}};
    });
    // E[Y] asymptotics hold for any fixed d, k >= 3; the variance argument only for k = k(d).
    j["outside_predicted_k"] = attempt([&] { return json(predict_chromatic(d).k != k); });
    j["ey_asym"] = attempt([&] { return logreal_json(ey_asym(n, d, k)); });
    j["ey2_asym"] = attempt([&] { return logreal_json(ey2_asym(n, d, k)); });
    j["s1_reassembled"] = attempt([&] { return logreal_json(s1_reassembled(n, d, k)); });
    j["second_moment_ratio"] = attempt([&] { return json(static_cast<double>(second_moment_ratio(d, k))); });
    j["sum_lambda_delta_sq"] = attempt([&] { return json(static_cast<double>(sum_lambda_delta_sq(d, k))); });
    j["sum_lambda_delta_sq_series"] =
        attempt([&] { return json(static_cast<double>(sum_lambda_delta_sq_series(d, k))); });
    j["coeff_asym_s0"] = attempt([&] { return logreal_json(coeff_asym(n, d, k, 0)); });
    j["gamma"] = attempt([&] { return logreal_json(gamma_const(k)); });
    j["det_H"] = attempt([&] { return logreal_json(det_H(d, k)); });
    json cycles = json::array();
    Output o;
    o.header = {"quantity", "value"};
    for (int m = 1; m <= m_max; ++m) {
        const CycleCorrection c = cycle_correction(d, k, m);
        cycles.push_back({{"m", m},
                          {"lambda", rational_json(c.lambda)},
                          {"delta", rational_json(c.delta)},
                          {"multiplier", rational_json(c.multiplier())}});
    }
    j["cycle_corrections"] = cycles;
    for (const auto& [key, value] : j.items()) {
        if (key == "cycle_corrections") continue;
        if (value.is_object() && value.contains("log"))
            o.rows.push_back({key + ".log", fmt(value["log"].get<double>())});
        else if (value.is_object())
            o.rows.push_back({key, value.dump()});
        else
            o.rows.push_back({key, value.is_number_float() ? fmt(value.get<double>()) : value.dump()});
    }
    for (const auto& c : cycles) {
        const std::string m = std::to_string(c["m"].get<int>());
        o.rows.push_back({"lambda_" + m, c["lambda"]["value"].get<std::string>()});
        o.rows.push_back({"delta_" + m, c["delta"]["value"].get<std::string>()});
    }
    o.body = std::move(j);
    return o;
}

json edges_json(const Multigraph& g) {
    json e = json::array();
    for (const auto& edge : g.edges()) e.push_back({edge.u, edge.v});
    return e;
}

Output cmd_sample(const Params& p, const RunConfig& c) {
    const int n = p.small("n", 1);
    const int d = p.small("d", 0);
    const auto stream = static_cast<std::uint64_t>(p.integer("stream", 0));
    const int m_max = p.small("m-max", 1, kMaxCycleLength);
    const Pairing pairing = sample_pairing(n, d, c.seed, stream);
    const Multigraph g = to_multigraph(pairing);
    const CycleCounts counts = count_cycles(g, m_max);
    Output o;
    json cyc = json::object();
    for (int m = 1; m <= m_max; ++m) cyc[std::to_string(m)] = counts[m];
    o.body = json{{"n", n}, {"d", d}, {"seed", c.seed}, {"stream", stream}, {"mates", pairing.mates()},
                  {"edges", edges_json(g)}, {"simple", is_simple(g)}, {"cycles", cyc}};
    o.header = {"u", "v"};
    for (const auto& e : g.edges()) o.rows.push_back({std::to_string(e.u), std::to_string(e.v)});
    std::ostringstream text;
    write_multigraph(text, g);
    o.graph_text = text.str();
    return o;
}

Output cmd_color(const Params& p) {
    const std::string& path = p.str("input");
    Multigraph g = [&] {
        if (path == "-") return read_multigraph(std::cin);
        std::ifstream in(path);
        if (!in) throw InputError("cannot open '" + path + "'");
        return read_multigraph(in);
    }();
    const int k = p.small("k", 0);
    Output o;
    o.body = json{{"n", g.n()}, {"edges", g.edge_count()}, {"simple", is_simple(g)}, {"chi", chromatic_number(g)}};
    o.header = {"n", "edges", "chi", "k", "balanced_colourings"};
    std::vector<std::string> row = {std::to_string(g.n()), std::to_string(g.edge_count()),
                                    std::to_string(o.body["chi"].get<int>()), "", ""};
    if (k > 0) {
        const Integer y = count_balanced_colourings(g, k);
        o.body["k"] = k;
        o.body["balanced_colourings"] = to_string(y);
        row[3] = std::to_string(k);
        row[4] = to_string(y);
    }
    o.rows.push_back(row);
    return o;
}

Output cmd_exact(const Params& p) {
    const int n = p.small("n", 1);
    const int d = p.small("d", 1);
    const int k = p.small("k", 2);
    const std::string& what = p.str("what");
    Rational value;
    json j{{"n", n}, {"d", d}, {"k", k}, {"what", what}};
    if (what == "ey") {
        value = exact_expected_Y(n, d, k);
    } else if (what == "ey2") {
        value = exact_second_moment(n, d, k);
    } else if (what == "coeff") {
        std::vector<int> c;
        if (p.has("c")) {
            c = p.int_list("c", 0);
            if (static_cast<int>(c.size()) != k) throw InputError("--c needs exactly k entries");
        } else {
            if ((d * n) % k != 0) throw InputError("dn/k is not an integer");
            c.assign(static_cast<std::size_t>(k), d * n / k);
        }
        j["c"] = c;
        value = coeff_single(k, c);
    } else {
        throw InputError("--what must be ey, ey2 or coeff");
    }
    j["value"] = to_string(value);
    j["decimal"] = to_double(value);
    Output o;
    o.header = {"n", "d", "k", "what", "value", "decimal"};
    o.rows.push_back({std::to_string(n), std::to_string(d), std::to_string(k), what, to_string(value),
                      fmt(to_double(value))});
    o.body = std::move(j);
    return o;
}

json estimate_json(const Estimate& e) { return json{{"mean", e.mean}, {"se", e.se}}; }

Output cmd_moments(const Params& p, const RunConfig& c) {
    const int n = p.small("n", 1);
    const int d = p.small("d", 1);
    const int k = p.small("k", 2);
    const long samples = p.integer("samples", 1);
    const CycleSpec spec = parse_cycle_spec(p.str("cycles"));
    const MomentReport r = estimate_moments(n, d, k, samples, spec, c.seed, c.workers);

    auto opt_rational = [](const std::optional<Rational>& q) { return q ? rational_json(*q) : json(nullptr); };
    auto opt_log = [](const std::optional<LogReal>& q) { return q ? logreal_json(*q) : json(nullptr); };
    json j{{"n", n}, {"d", d}, {"k", k}, {"samples", samples}, {"seed", c.seed}};
    j["sum_y"] = to_string(r.sum_y);
    j["sum_y2"] = to_string(r.sum_y2);
    j["ey"] = {{"estimate", estimate_json(r.ey)}, {"exact", opt_rational(r.exact_ey)}, {"theory", opt_log(r.theory_ey)}};
    j["ey2"] = {{"estimate", estimate_json(r.ey2)},
                {"exact", opt_rational(r.exact_ey2)},
                {"theory", opt_log(r.theory_ey2)}};
    std::optional<double> exact_ratio;
    if (r.exact_ey && r.exact_ey2 && *r.exact_ey != 0) exact_ratio = to_double(*r.exact_ey2 / (*r.exact_ey * *r.exact_ey));
    j["ratio"] = {{"estimate", estimate_json(r.ratio)},
                  {"exact", exact_ratio ? json(*exact_ratio) : json(nullptr)},
                  {"theory", r.theory_ratio ? json(*r.theory_ratio) : json(nullptr)}};

    Output o;
    o.header = {"quantity", "estimate", "se", "exact", "theory"};
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
    o.rows.push_back({"E[Y]", fmt(r.ey.mean), fmt(r.ey.se), r.exact_ey ? to_string(*r.exact_ey) : "",
                      r.theory_ey && r.theory_ey->value ? fmt(*r.theory_ey->value) : ""});
    o.rows.push_back({"E[Y^2]", fmt(r.ey2.mean), fmt(r.ey2.se), r.exact_ey2 ? to_string(*r.exact_ey2) : "",
                      r.theory_ey2 && r.theory_ey2->value ? fmt(*r.theory_ey2->value) : ""});
    o.rows.push_back({"E[Y^2]/E[Y]^2", fmt(r.ratio.mean), fmt(r.ratio.se), opt(exact_ratio), opt(r.theory_ratio)});

    json joint = json::array();
    for (const auto& row : r.joint) {
        const std::string label = format_cycle_product(row.product);
        joint.push_back({{"product", label},
                         {"sum", to_string(row.sum)},
                         {"moment", estimate_json(row.moment)},
                         {"ratio", estimate_json(row.ratio)},
                         {"theory", row.theory},
                         {"exact_moment", opt_rational(row.exact_moment)},
                         {"exact_ratio", opt_rational(row.exact_ratio)}});
        o.rows.push_back({"E[Y F]/E[Y] F=" + label, fmt(row.ratio.mean), fmt(row.ratio.se),
                          row.exact_ratio ? to_string(*row.exact_ratio) : "", fmt(row.theory)});
    }
    j["joint"] = joint;
    json cycles = json::array();
    for (const auto& row : r.cycles) {
        cycles.push_back({{"m", row.m}, {"mean", estimate_json(row.mean)}, {"lambda", row.lambda}});
        o.rows.push_back({"E[X_" + std::to_string(row.m) + "]", fmt(row.mean.mean), fmt(row.mean.se), "",
                          fmt(row.lambda)});
    }
    j["cycles"] = cycles;
    o.body = std::move(j);
    return o;
}

Output cmd_chifreq(const Params& p, const RunConfig& c) {
    const int n = p.small("n", 1);
    const int d = p.small("d", 0);
    const long samples = p.integer("samples", 1);
    const ChiFrequencyTable t = chi_frequency(n, d, samples, c.seed, c.workers);
    Output o;
    json counts = json::object();
    o.header = {"chi", "count"};
    for (const auto& [chi, count] : t.counts) {
        counts[std::to_string(chi)] = count;
        o.rows.push_back({std::to_string(chi), std::to_string(count)});
    }
    o.rows.push_back({"rejected", std::to_string(t.rejections)});
    o.body = json{{"n", n},           {"d", d},
                  {"samples", samples}, {"seed", c.seed},
                  {"counts", counts},  {"rejections", t.rejections},
                  {"predicted", t.predicted}};
    return o;
}

Output cmd_converge(const Params& p) {
    const int d = p.small("d", 1);
    const int k = p.small("k", 3);
    const auto rows = convergence_study(d, k, p.int_list("ns", 1));
    Output o;
    o.header = {"n", "exact_ey", "exact_ey_decimal", "asymptotic_ey_log", "ratio", "coefficient_ratio"};
    o.body = json{{"d", d}, {"k", k}, {"rows", json::array()}};
    for (const auto& r : rows) {
        o.body["rows"].push_back({{"n", r.n},
                                  {"exact_ey", rational_json(r.exact_ey)},
                                  {"asymptotic_ey", logreal_json(r.asymptotic_ey)},
                                  {"ratio", r.ratio},
                                  {"coefficient", rational_json(r.coefficient)},
                                  {"coefficient_asymptotic", logreal_json(r.coefficient_asymptotic)},
                                  {"coefficient_ratio", r.coefficient_ratio}});
        o.rows.push_back({std::to_string(r.n), to_string(r.exact_ey), fmt(to_double(r.exact_ey)),
                          fmt(static_cast<double>(r.asymptotic_ey.log)), fmt(r.ratio), fmt(r.coefficient_ratio)});
    }
    return o;
}

json eig_json(const EigReport& r) {
    json claims = json::array();
    for (const auto& c : r.claims)
        claims.push_back({{"value", c.value},
                          {"claimed_multiplicity", c.claimed_multiplicity},
                          {"basis_multiplicity", c.basis_multiplicity},
                          {"nullity", c.nullity}});
    return json{{"label", r.label},
                {"passed", r.passed},
                {"max_residual", r.max_residual},
                {"orthonormality_defect", r.orthonormality_defect},
                {"smallest_eigenvalue", r.smallest_eigenvalue},
                {"claims", claims}};
}

Eigen::MatrixXd random_zero_sum(int k, Philox& rng) {
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        a.data()[i] = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
    }
    const Eigen::VectorXd rows = a.rowwise().mean();
    const Eigen::RowVectorXd cols = a.colwise().mean();
    const double all = a.mean();
    a.colwise() -= rows;
    a.rowwise() -= cols;
    a.array() += all;
    return a;
}

Output cmd_verify(const Params& p, const RunConfig& c, bool& all_passed) {
    const auto [k_lo, k_hi] = p.range("k-range", 3);
    if (k_hi > 40) throw GuardError("k-range upper end exceeds 40");
    const long trials = p.integer("trials", 1, 1000000);
    std::set<std::string> lemmas;
    for (const auto& l : split(p.str("lemmas"), ',')) {
        if (l != "evec2" && l != "evec3" && l != "gaussdet") throw InputError("unknown lemma '" + l + "'");
        lemmas.insert(l);
    }
    std::vector<double> scales;
    for (const auto& s : split(p.str("r"), ',')) scales.push_back(parse_double("r", s));

    Output o;
    o.header = {"lemma", "k", "r", "passed", "max_residual"};
    json results = json::array();
    all_passed = true;
    for (int k = static_cast<int>(k_lo); k <= k_hi; ++k) {
        if (lemmas.count("evec2")) {
            const Evec2Report r = verify_evec2(k);
            all_passed = all_passed && r.passed();
            const double res = std::max(r.shifted_difference.max_residual, r.sum_square.max_residual);
            results.push_back({{"lemma", "evec2"},
                               {"k", k},
                               {"passed", r.passed()},
                               {"shifted_difference", eig_json(r.shifted_difference)},
                               {"sum_square", eig_json(r.sum_square)}});
            o.rows.push_back({"evec2", std::to_string(k), "", r.passed() ? "true" : "false", fmt(res)});
        }
        if (lemmas.count("evec3")) {
            Philox rng(c.seed, static_cast<std::uint64_t>(k));
            double worst = 0;
            bool passed = true;
            for (long t = 0; t < trials; ++t) {
                const Evec3Report r = evec3_identities(random_zero_sum(k, rng));
                worst = std::max(worst, r.max_residual());
                passed = passed && r.passed;
            }
            all_passed = all_passed && passed;
            results.push_back(
                {{"lemma", "evec3"}, {"k", k}, {"trials", trials}, {"passed", passed}, {"max_residual", worst}});
            o.rows.push_back({"evec3", std::to_string(k), "", passed ? "true" : "false", fmt(worst)});
        }
        if (lemmas.count("gaussdet")) {
            for (double r : scales) {
                const GaussDetReport g = gaussian_det_check(k, r);
                all_passed = all_passed && g.passed;
                json entry{{"lemma", "gaussdet"}, {"k", k},          {"r", r},
                           {"passed", g.passed}, {"numeric_det", g.numeric_det}, {"formula_det", g.formula_det},
                           {"det_rel_error", g.det_rel_error}};
                entry["quadrature"] = g.quadrature ? json(*g.quadrature) : json(nullptr);
                entry["closed_form"] = g.closed_form ? json(*g.closed_form) : json(nullptr);
                entry["quad_rel_error"] = g.quad_rel_error ? json(*g.quad_rel_error) : json(nullptr);
                results.push_back(entry);
                const double res = std::max(g.det_rel_error, g.quad_rel_error.value_or(0.0));
                o.rows.push_back({"gaussdet", std::to_string(k), fmt(r), g.passed ? "true" : "false", fmt(res)});
            }
        }
    }
    o.body = json{{"passed", all_passed}, {"tolerance", kSpectralTolerance}, {"results", results}};
    return o;
}

Output cmd_optimize_phi(const Params& p, const RunConfig& c) {
    const int k = p.small("k", 2, 64);
    const int d = p.small("d", 0);
    PhiOptions opts;
    opts.restarts = p.small("restarts", 1);
    opts.tol = p.real("tol");
    if (!(opts.tol > 0)) throw InputError("--tol must be positive");
    opts.max_iterations = p.small("max-iterations", 1, 1 << 30);
    opts.seed = c.seed;
    opts.workers = c.workers;
    const PhiOptimum r = maximize_phi(d, k, opts);
    json m = json::array();
    std::vector<std::string> flat;
    for (int i = 0; i < k; ++i) {
        json row = json::array();
        for (int j = 0; j < k; ++j) {
            row.push_back(r.m(i, j));
            flat.push_back(fmt(r.m(i, j)));
        }
        m.push_back(row);
    }
    long iterations = 0;
    for (const auto& t : r.trace) iterations += t.iterations;
    Output o;
    o.body = json{{"k", k},
                  {"d", d},
                  {"restarts", opts.restarts},
                  {"tol", opts.tol},
                  {"M", m},
                  {"phi", r.phi},
                  {"phi_center", r.phi_center},
                  {"gap_to_center", r.phi - r.phi_center},
                  {"distance_to_center", r.distance_to_center},
                  {"converged", r.converged},
                  {"below_threshold", r.below_threshold},
                  {"beats_center", r.beats_center},
                  {"iterations", iterations}};
    o.header = {"k", "d", "phi", "phi_center", "gap_to_center", "distance_to_center", "converged", "M"};
    o.rows.push_back({std::to_string(k), std::to_string(d), fmt(r.phi), fmt(r.phi_center),
                      fmt(r.phi - r.phi_center), fmt(r.distance_to_center), r.converged ? "true" : "false",
                      join(flat, " ")});
    return o;
}

Output run_command(const RunConfig& c, bool& verification_passed) {
    const Params p(c);
    verification_passed = true;
    const std::string& s = c.subcommand;
    if (s == "predict") return cmd_predict(p);
    if (s == "theory") return cmd_theory(p);
    if (s == "sample") return cmd_sample(p, c);
    if (s == "color") return cmd_color(p);
    if (s == "exact") return cmd_exact(p);
    if (s == "moments") return cmd_moments(p, c);
    if (s == "chifreq") return cmd_chifreq(p, c);
    if (s == "converge") return cmd_converge(p);
    if (s == "verify") return cmd_verify(p, c, verification_passed);
    if (s == "optimize-phi") return cmd_optimize_phi(p, c);
    throw InputError("unknown subcommand '" + s + "'");
}

std::string to_csv(const Output& o) {
    std::string out;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + csv_field(fields[i]);
        out += "\r\n";
    };
    line(o.header);
    for (const auto& r : o.rows) line(r);
    return out;
}

std::string render_output(const RunConfig& c, const Output& o) {
    if (c.format == "csv") return to_csv(o);
    if (c.format == "graph") return *o.graph_text;
    return o.body.dump(2) + "\n";
}

void write_atomically(const std::string& path, const std::string& data) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("io", "cannot open '" + tmp.string() + "' for writing");
        f << data;
        f.flush();
        if (!f) throw Error("io", "write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("io", "cannot rename onto '" + path + "': " + ec.message());
    }
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const GuardError*>(&e)) return 3;
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const InfeasibleError*>(&e))
        return 2;
    return 1;
}

void report_error(std::ostream& err, const std::string& code, const std::string& message) {
    err << json{{"code", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"predict", "theory",   "sample", "color",  "exact",
                                                   "moments", "chifreq", "converge", "verify", "optimize-phi"};
    return names;
}

const std::vector<ParamSpec>& schema(const std::string& subcommand) {
    const auto it = schemas().find(subcommand);
    if (it == schemas().end()) throw InputError("unknown subcommand '" + subcommand + "'");
    return it->second;
}

std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char ch : value) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(number) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InputError("config line " + std::to_string(number) + ": empty key");
        if (!out.emplace(key, trim(line.substr(eq + 1))).second)
            throw InputError("config line " + std::to_string(number) + ": duplicate key '" + key + "'");
    }
    return out;
}

RunConfig resolve_config(const std::string& subcommand, const std::map<std::string, std::string>& config_file,
                         const std::map<std::string, std::string>& flags, const std::string& env_seed) {
    const auto& spec = schema(subcommand);
    std::map<std::string, std::string> merged;
    for (const auto& p : spec)
        if (!p.default_value.empty()) merged[p.key] = p.default_value;
    merged["seed"] = env_seed.empty() ? "1" : env_seed;
    merged["workers"] = "1";
    merged["format"] = "json";
    auto known = [&](const std::string& key) {
        if (std::find(kCommonKeys.begin(), kCommonKeys.end(), key) != kCommonKeys.end()) return true;
        return std::any_of(spec.begin(), spec.end(), [&](const ParamSpec& p) { return p.key == key; });
    };
    for (const auto* layer : {&config_file, &flags})
        for (const auto& [key, value] : *layer) {
            if (!known(key)) throw InputError("unknown key '" + key + "' for subcommand " + subcommand);
            merged[key] = value;
        }
    for (const auto& p : spec)
        if (!p.optional && merged.find(p.key) == merged.end())
            throw InputError("missing required parameter --" + p.key);

    RunConfig c;
    c.subcommand = subcommand;
    c.seed = parse_number<std::uint64_t>("seed", merged["seed"]);
    c.workers = parse_number<int>("workers", merged["workers"]);
    if (c.workers < 1 || c.workers > 1024) throw InputError("workers must be in 1..1024");
    c.format = merged["format"];
    if (c.format != "json" && c.format != "csv" && !(c.format == "graph" && subcommand == "sample"))
        throw InputError("unsupported format '" + c.format + "'");
    if (merged.count("out")) c.out = merged["out"];
    for (const auto& key : kCommonKeys) merged.erase(key);
    c.params = std::move(merged);
    return c;
}

std::string render(const RunConfig& config) {
    bool passed = true;
    return render_output(config, run_command(config, passed));
}

int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        bool passed = true;
        const Output o = run_command(config, passed);
        const std::string data = render_output(config, o);
        if (config.out.empty())
            out << data;
        else
            write_atomically(config.out, data);
        return passed ? 0 : 1;
    } catch (const Error& e) {
        report_error(err, e.code(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return 1;
    }
}

std::string version_string() {
    return std::string("regchrom ") + REGCHROM_VERSION + " (build " + REGCHROM_BUILD_TYPE + ", " +
           REGCHROM_COMPILER + ")";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chromatic number of random regular graphs: exact oracles, asymptotics and Monte Carlo"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    struct Slot {
        CLI::App* app = nullptr;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
        std::string config;
        CLI::Option* config_option = nullptr;
    };
    std::map<std::string, Slot> slots;
    for (const auto& name : subcommands()) {
        Slot& slot = slots[name];
        slot.app = app.add_subcommand(name, descriptions().at(name));
        for (const auto& p : schema(name)) {
            std::string help = p.help;
            if (!p.default_value.empty()) help += " (default " + p.default_value + ")";
            slot.options[p.key] = slot.app->add_option("--" + p.key, slot.values[p.key], help);
        }
        slot.options["seed"] = slot.app->add_option("--seed", slot.values["seed"], "RNG seed (default $REGCHROM_SEED or 1)");
        slot.options["workers"] = slot.app->add_option("--workers", slot.values["workers"], "worker threads (default 1)");
        slot.options["out"] = slot.app->add_option("--out", slot.values["out"], "output file, written atomically");
        slot.options["format"] = slot.app->add_option("--format", slot.values["format"], "json | csv (default json)");
        slot.config_option = slot.app->add_option("--config", slot.config, "flat key = value parameter file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "invalid_input", e.what());
        return 2;
    }

    for (auto& [name, slot] : slots) {
        if (!slot.app->parsed()) continue;
        try {
            std::map<std::string, std::string> file;
            if (slot.config_option->count() > 0) {
                std::ifstream in(slot.config);
                if (!in) throw InputError("cannot open config file '" + slot.config + "'");
                std::ostringstream text;
                text << in.rdbuf();
                file = parse_config_text(text.str());
            }
            std::map<std::string, std::string> flags;
            for (const auto& [key, opt] : slot.options)
                if (opt->count() > 0) flags[key] = slot.values[key];
            const char* env = std::getenv("REGCHROM_SEED");
            const RunConfig config = resolve_config(name, file, flags, env ? env : "");
            return dispatch(config, out, err);
        } catch (const Error& e) {
            report_error(err, e.code(), e.what());
            return exit_code_for(e);
        }
    }
    report_error(err, "invalid_input", "no subcommand given");
    return 2;
}

}  // namespace regchrom
