// nsbox: command-line surface for the non-signaling oracle toolkit.
// Every command is deterministic for fixed flags and seed, prints numbers
// with nine decimal digits, and exits 0 on success, 1 when a verification
// fails, 2 on usage errors.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsbox/nsbox.hpp"
#include "nsbox/serialization.hpp"
#include "presets_data.hpp"

namespace {

using nlohmann::json;
using namespace nsbox;

// ---------------------------------------------------------------------------
// Formatting: nine decimal digits, round-half-even, no negative zero.

std::string fmt9(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", x);
    if (buf[0] == '-' && std::strtod(buf, nullptr) == 0.0) return std::string(buf + 1);
    return std::string(buf);
}

double round9(double x) {
    const double r = std::nearbyint(x * 1e9) / 1e9;
    return r == 0.0 ? 0.0 : r;
}

// ---------------------------------------------------------------------------
// Presets

struct SettingsPair {
    PartySettings alice;
    PartySettings bob;
};

std::map<std::string, SettingsPair> load_presets() {
    json doc;
    if (const char* path = std::getenv("NSBOX_PRESETS")) {
        std::ifstream in(path);
        if (!in) throw ArgumentError(std::string("cannot open NSBOX_PRESETS file: ") + path);
        in >> doc;
    } else {
        doc = json::parse(cli::kPresetsJson);
    }
    if (!doc.contains("presets")) throw ArgumentError("presets file: missing \"presets\"");

    auto party = [](const json& p) {
        const auto theta = p.at("theta").get<std::vector<double>>();
        const auto phi = p.at("phi").get<std::vector<double>>();
        const auto sign = p.at("sign").get<std::vector<int>>();
        if (theta.size() != phi.size() || theta.size() != sign.size()) {
            throw ArgumentError("presets file: theta/phi/sign lengths differ");
        }
        std::vector<BlochDirection> dirs;
        for (std::size_t i = 0; i < theta.size(); ++i) dirs.emplace_back(theta[i], phi[i]);
        return PartySettings(std::move(dirs), sign);
    };

    std::map<std::string, SettingsPair> out;
    for (const auto& [name, body] : doc["presets"].items()) {
        out.emplace(name, SettingsPair{party(body.at("alice")), party(body.at("bob"))});
    }
    return out;
}

SettingsPair resolve_preset(const std::string& name) {
    static const std::map<std::string, SettingsPair> presets = load_presets();
    const auto it = presets.find(name);
    if (it == presets.end()) throw ArgumentError("unknown basis preset: " + name);
    return it->second;
}

// Angle list: theta0,phi0,theta1,phi1 per party, comma separated.
std::vector<PartySettings> parse_angles(const std::string& text, std::size_t parties) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            vals.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ArgumentError("bad angle value: " + tok);
        }
    }
    if (vals.size() != 4 * parties) {
        throw ArgumentError("--angles needs theta0,phi0,theta1,phi1 per party (" +
                            std::to_string(4 * parties) + " values)");
    }
    std::vector<PartySettings> out;
    for (std::size_t k = 0; k < parties; ++k) {
        out.push_back(PartySettings::from_angles(vals[4 * k], vals[4 * k + 1], vals[4 * k + 2],
                                                 vals[4 * k + 3]));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output plumbing

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot open output file: " + path);
    out << body;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

struct CommonOpts {
    std::string format = "csv";
    std::string out_path;
    double tolerance = kPhysicsTol;
};

OracleSpec make_spec(const std::string& oracle, std::size_t parties, const std::string& function) {
    const bool quantum = oracle == "quantum";
    TargetFunction f = TargetFunction::XYZ;
    if (function == "xyplusxz") f = TargetFunction::XYplusXZ;
    else if (function == "svetlichny") f = TargetFunction::Svetlichny;
    else if (function != "xyz") throw ArgumentError("unknown target function: " + function);

    if (parties == 2) return OracleSpec::bipartite(quantum);
    if (parties == 3) return OracleSpec::tripartite(f, quantum);
    if (f != TargetFunction::XYZ) {
        throw ArgumentError("only the xyz box generalizes beyond three parties");
    }
    return OracleSpec::nparty_xyz(parties, quantum);
}

std::vector<int> unpack_bits(std::size_t value, std::size_t n) {
    std::vector<int> bits(n);
    for (std::size_t k = 0; k < n; ++k) bits[k] = static_cast<int>((value >> (n - 1 - k)) & 1);
    return bits;
}

// Uniform direction on the sphere per party input.
std::vector<PartySettings> random_settings(SplitMix64& rng, std::size_t parties) {
    std::vector<PartySettings> out;
    for (std::size_t k = 0; k < parties; ++k) {
        std::vector<BlochDirection> dirs;
        for (int input = 0; input < 2; ++input) {
            const double ct = 1.0 - 2.0 * rng.next_double();
            const double phi = 2.0 * kPi * rng.next_double();
            dirs.emplace_back(std::acos(ct), phi);
        }
        out.push_back(PartySettings(std::move(dirs)));
    }
    return out;
}

double closed_form_chsh(bool quantum, const SettingsPair& s) {
    if (quantum) return std::abs(chsh_closed_form_quantum(s.alice, s.bob));
    return std::abs(chsh_closed_form_classical(s.alice.direction(0).theta(),
                                               s.alice.direction(1).theta(),
                                               s.bob.direction(0).theta(),
                                               s.bob.direction(1).theta()));
}

// ---------------------------------------------------------------------------
// chsh

struct ChshOpts : CommonOpts {
    std::string oracle = "quantum";
    std::vector<std::string> bases = {"computational"};
    std::string angles;
};

int run_chsh(const ChshOpts& opt) {
    const OracleSpec spec = OracleSpec::bipartite(opt.oracle == "quantum");

    std::ostringstream csv;
    csv << "basis,oracle,S,S_closed_form\n";
    json results = json::array();

    auto evaluate = [&](const std::string& label, const SettingsPair& pair) {
        const PartySettings settings[] = {pair.alice, pair.bob};
        const double s = chsh_score(behavior_from_oracle(spec, settings));
        const double closed = closed_form_chsh(spec.is_quantum(), pair);
        std::cout << label << " S=" << fmt9(s) << "\n";
        csv << label << ',' << opt.oracle << ',' << fmt9(s) << ',' << fmt9(closed) << '\n';
        results.push_back(
            {{"basis", label}, {"S", round9(s)}, {"S_closed_form", round9(closed)}});
    };

    if (!opt.angles.empty()) {
        const auto settings = parse_angles(opt.angles, 2);
        evaluate("custom", {settings[0], settings[1]});
    } else {
        for (const auto& name : opt.bases) evaluate(name, resolve_preset(name));
    }

    if (!opt.out_path.empty() || opt.format == "json") {
        const std::string body =
            opt.format == "json"
                ? dump_json({{"command", "chsh"}, {"oracle", opt.oracle}, {"results", results}})
                : csv.str();
        if (!opt.out_path.empty()) write_text(opt.out_path, body);
        else if (opt.format == "json") std::cout << body;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOpts : CommonOpts {
    std::string sweep = "theta";
    std::size_t grid = 181;
    double theta = kPi / 2.0;
    double phi = 0.0;
};

int run_sweep(const SweepOpts& opt) {
    if (opt.grid < 2) throw ArgumentError("sweep: --grid must be at least 2");
    const bool over_theta = opt.sweep == "theta";
    if (!over_theta && opt.sweep != "phi") throw ArgumentError("sweep: --sweep must be theta or phi");

    const OracleSpec quantum = OracleSpec::bipartite(true);
    const OracleSpec classical = OracleSpec::bipartite(false);

    std::ostringstream csv;
    csv << "theta,phi,S_quantum,S_classical,S_closedform\n";
    json rows = json::array();

    for (std::size_t i = 0; i < opt.grid; ++i) {
        // theta spans [0, pi] inclusive; phi spans [0, 2pi) periodic
        const double theta = over_theta
                                 ? kPi * static_cast<double>(i) / static_cast<double>(opt.grid - 1)
                                 : opt.theta;
        const double phi = over_theta
                               ? opt.phi
                               : 2.0 * kPi * static_cast<double>(i) / static_cast<double>(opt.grid);
        const PartySettings shared = PartySettings::shared(BlochDirection(theta, phi));
        const PartySettings settings[] = {shared, shared};
        const double sq = chsh_score(behavior_from_oracle(quantum, settings));
        const double sc = chsh_score(behavior_from_oracle(classical, settings));
        const double closed = closed_form_chsh(true, {shared, shared});
        csv << fmt9(theta) << ',' << fmt9(phi) << ',' << fmt9(sq) << ',' << fmt9(sc) << ','
            << fmt9(closed) << '\n';
        rows.push_back({{"theta", round9(theta)},
                        {"phi", round9(phi)},
                        {"S_quantum", round9(sq)},
                        {"S_classical", round9(sc)},
                        {"S_closedform", round9(closed)}});
    }

    const std::string body =
        opt.format == "json" ? dump_json({{"command", "sweep"}, {"rows", rows}}) : csv.str();
    write_text(opt.out_path, body);
    return 0;
}

// ---------------------------------------------------------------------------
// nosig

struct NosigOpts : CommonOpts {
    std::string oracle = "quantum";
    std::size_t parties = 2;
    std::string function = "xyz";
    std::string basis;  // empty = random settings
    std::size_t samples = 100;
    std::uint64_t seed = 12345;
    bool unsafe_free_inputs = false;
};

int run_nosig(const NosigOpts& opt) {
    if (opt.unsafe_free_inputs) {
        // The same CNOT with a freely prepared control is a one-bit
        // channel; the check must flag it.
        const Behavior demo = signaling_cnot_demo_behavior();
        const NSReport report = no_signaling_check(demo, opt.tolerance);
        std::cout << "free-input CNOT demo: max_violation=" << fmt9(report.max_violation) << "\n";
        const bool as_expected = std::abs(report.max_violation - 1.0) <= kAlgebraTol;
        std::cout << (as_expected ? "signaling demonstrated (violation 1)"
                                  : "unexpected violation magnitude")
                  << "\n";
        if (!opt.out_path.empty() || opt.format == "json") {
            const json j = {{"command", "nosig"},
                            {"mode", "unsafe-free-inputs"},
                            {"max_violation", round9(report.max_violation)},
                            {"expected_violation", 1.0},
                            {"as_expected", as_expected}};
            const std::string body = opt.format == "json"
                                         ? dump_json(j)
                                         : "mode,max_violation,as_expected\nunsafe-free-inputs," +
                                               fmt9(report.max_violation) + ',' +
                                               (as_expected ? std::string("1") : std::string("0")) +
                                               "\n";
            if (!opt.out_path.empty()) write_text(opt.out_path, body);
            else std::cout << body;
        }
        return as_expected ? 0 : 1;
    }

    const OracleSpec spec = make_spec(opt.oracle, opt.parties, opt.function);
    double max_violation = 0.0;
    if (!opt.basis.empty()) {
        if (spec.parties() != 2) {
            throw ArgumentError("nosig: preset settings apply to bipartite oracles");
        }
        const SettingsPair pair = resolve_preset(opt.basis);
        const PartySettings settings[] = {pair.alice, pair.bob};
        max_violation = no_signaling_check(behavior_from_oracle(spec, settings), opt.tolerance)
                            .max_violation;
    } else {
        SplitMix64 rng(opt.seed);
        for (std::size_t s = 0; s < opt.samples; ++s) {
            const auto settings = random_settings(rng, spec.parties());
            const Behavior b = behavior_from_oracle(spec, settings);
            const NSReport report = no_signaling_check(b, opt.tolerance);
            max_violation = std::max(max_violation, report.max_violation);
        }
    }
    const bool passed = max_violation <= opt.tolerance;
    std::cout << "oracle=" << opt.oracle << " parties=" << opt.parties;
    if (!opt.basis.empty()) std::cout << " basis=" << opt.basis;
    else std::cout << " samples=" << opt.samples;
    std::cout << " max_violation=" << fmt9(max_violation) << " " << (passed ? "PASS" : "FAIL")
              << "\n";

    if (!opt.out_path.empty() || opt.format == "json") {
        const json j = {{"command", "nosig"},          {"oracle", opt.oracle},
                        {"parties", opt.parties},      {"function", opt.function},
                        {"samples", opt.samples},      {"seed", opt.seed},
                        {"max_violation", round9(max_violation)}, {"passed", passed}};
        std::ostringstream csv;
        csv << "oracle,parties,function,samples,seed,max_violation,passed\n"
            << opt.oracle << ',' << opt.parties << ',' << opt.function << ',' << opt.samples << ','
            << opt.seed << ',' << fmt9(max_violation) << ',' << (passed ? 1 : 0) << '\n';
        const std::string body = opt.format == "json" ? dump_json(j) : csv.str();
        if (!opt.out_path.empty()) write_text(opt.out_path, body);
        else std::cout << body;
    }
    return passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// prbases

struct PrbasesOpts : CommonOpts {
    std::string oracle = "quantum";
    std::size_t grid = 0;
};

int run_prbases(const PrbasesOpts& opt) {
    const OracleSpec spec = OracleSpec::bipartite(opt.oracle == "quantum");
    const auto families = enumerate_pr_families(spec, opt.tolerance);

    json jfam = json::array();
    for (const auto& fam : families) {
        std::cout << "family: " << fam.name() << " (" << fam.parameter_description() << ")\n";
        jfam.push_back({{"name", fam.name()}, {"parameters", fam.parameter_description()}});
    }

    if (opt.grid == 0) {
        if (!opt.out_path.empty() || opt.format == "json") {
            const json j = {{"command", "prbases"}, {"oracle", opt.oracle}, {"families", jfam}};
            std::ostringstream csv;
            csv << "family,parameters\n";
            for (const auto& fam : families) {
                csv << fam.name() << ",\"" << fam.parameter_description() << "\"\n";
            }
            const std::string body = opt.format == "json" ? dump_json(j) : csv.str();
            if (!opt.out_path.empty()) write_text(opt.out_path, body);
            else std::cout << body;
        }
        return 0;
    }

    const auto hits = pr_grid_search(spec, opt.grid, opt.grid, opt.tolerance);
    std::size_t off_family = 0;
    std::ostringstream csv;
    csv << "theta,phi_a,phi_b,r1,r2,on_family\n";
    json jhits = json::array();
    for (const auto& h : hits) {
        const bool on = hit_on_known_family(h, spec.is_quantum());
        if (!on) ++off_family;
        csv << fmt9(h.theta) << ',' << fmt9(h.phi_a) << ',' << fmt9(h.phi_b) << ',' << fmt9(h.r1)
            << ',' << fmt9(h.r2) << ',' << (on ? 1 : 0) << '\n';
        jhits.push_back({{"theta", round9(h.theta)},
                         {"phi_a", round9(h.phi_a)},
                         {"phi_b", round9(h.phi_b)},
                         {"r1", round9(h.r1)},
                         {"r2", round9(h.r2)},
                         {"on_family", on}});
    }
    std::cout << "grid " << opt.grid << "^3: " << hits.size() << " PR points, " << off_family
              << " off the known families\n";

    const std::string body = opt.format == "json"
                                 ? dump_json({{"command", "prbases"},
                                              {"oracle", opt.oracle},
                                              {"families", jfam},
                                              {"grid", opt.grid},
                                              {"hits", jhits}})
                                 : csv.str();
    if (!opt.out_path.empty()) write_text(opt.out_path, body);
    else if (opt.format == "json") std::cout << body;
    return off_family == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// multiparty

struct MultipartyOpts : CommonOpts {
    std::string oracle = "quantum";
    std::string function = "xyz";
    std::size_t n = 3;
};

int run_multiparty(const MultipartyOpts& opt) {
    const OracleSpec spec = make_spec(opt.oracle, opt.n, opt.function);
    if (spec.parties() < 3 && opt.function != "xyz") {
        throw ArgumentError("multiparty: bipartite case supports xyz only");
    }
    TargetFunction f = TargetFunction::XYZ;
    if (opt.function == "xyplusxz") f = TargetFunction::XYplusXZ;
    else if (opt.function == "svetlichny") f = TargetFunction::Svetlichny;

    const std::size_t n = spec.parties();
    const std::vector<PartySettings> settings(n, PartySettings::shared(BlochDirection::z_axis()));
    const Behavior b = behavior_from_oracle(spec, settings);
    const BoxCheckReport box = multiparty_box_check(b, f, opt.tolerance);
    const NSReport ns = no_signaling_check(b, opt.tolerance);

    std::cout << "box=" << opt.function << " n=" << n << " oracle=" << opt.oracle << "\n"
              << "box identity: " << (box.passed ? "PASS" : "FAIL")
              << " (max deviation " << fmt9(box.max_deviation) << ")\n"
              << "no-signaling: " << (ns.passed ? "PASS" : "FAIL") << " (max violation "
              << fmt9(ns.max_violation) << ")\n";

    std::ostringstream csv;
    for (std::size_t k = 0; k < n; ++k) csv << 'x' << (k + 1) << ',';
    for (std::size_t k = 0; k < n; ++k) csv << 'a' << (k + 1) << ',';
    csv << "p\n";
    for (std::size_t i = 0; i < b.num_input_tuples(); ++i) {
        const auto in = unpack_bits(i, n);
        for (std::size_t o = 0; o < b.num_output_tuples(); ++o) {
            const auto out = unpack_bits(o, n);
            for (const int v : in) csv << v << ',';
            for (const int v : out) csv << v << ',';
            csv << fmt9(b.prob_flat(i, o)) << '\n';
        }
    }

    if (!opt.out_path.empty() || opt.format == "json") {
        const json j = {{"command", "multiparty"},
                        {"oracle", opt.oracle},
                        {"function", opt.function},
                        {"n", n},
                        {"box_passed", box.passed},
                        {"box_max_deviation", round9(box.max_deviation)},
                        {"ns_passed", ns.passed},
                        {"ns_max_violation", round9(ns.max_violation)},
                        {"behavior", behavior_to_json(b)}};
        const std::string body = opt.format == "json" ? dump_json(j) : csv.str();
        if (!opt.out_path.empty()) write_text(opt.out_path, body);
        else std::cout << body;
    } else {
        std::cout << csv.str();
    }
    return (box.passed && ns.passed) ? 0 : 1;
}

// ---------------------------------------------------------------------------
// experiment

struct ExperimentOpts : CommonOpts {
    std::string state = "oracle";
    std::string oracle = "quantum";
    std::string basis;
    double visibility = 1.0;
    std::uint64_t shots = 1000000;
    std::uint64_t seed = 1;
};

int run_experiment(const ExperimentOpts& opt) {
    std::string basis = opt.basis;
    if (basis.empty()) basis = (opt.state == "source") ? "tsirelson-source" : "computational";
    const SettingsPair pair = resolve_preset(basis);
    const PartySettings settings[] = {pair.alice, pair.bob};

    Behavior behavior = [&] {
        if (opt.state == "source") {
            // polarization source state (|01> + |10>)/sqrt(2)
            const double s = 1.0 / std::sqrt(2.0);
            const StateVector psi_plus(
                2, {Cplx(0, 0), Cplx(s, 0), Cplx(s, 0), Cplx(0, 0)});
            return noisy_state_behavior(DensityMatrix::from_pure(psi_plus), settings,
                                        opt.visibility);
        }
        if (opt.state != "oracle") throw ArgumentError("--state must be oracle or source");
        return noisy_oracle_behavior(OracleSpec::bipartite(opt.oracle == "quantum"), settings,
                                     opt.visibility);
    }();

    const double s_analytic = chsh_score(behavior);
    std::optional<ChshEstimate> estimate;
    if (opt.shots > 0) {
        const CountsTable counts = sample_counts(behavior, opt.shots, opt.seed);
        estimate = chsh_from_counts(counts);
        if (!opt.out_path.empty()) {
            std::ostringstream csv;
            counts.write_csv(csv);
            write_text(opt.out_path, csv.str());
        }
    }

    if (opt.format == "json") {
        json j = {{"command", "experiment"}, {"state", opt.state},
                  {"basis", basis},          {"visibility", round9(opt.visibility)},
                  {"shots", opt.shots},      {"seed", opt.seed},
                  {"S_analytic", round9(s_analytic)}};
        if (estimate) {
            j["S_sampled"] = round9(estimate->score);
            j["stderr"] = round9(estimate->stderr_);
        }
        std::cout << dump_json(j);
    } else {
        std::cout << "state=" << opt.state << " basis=" << basis
                  << " visibility=" << fmt9(opt.visibility) << "\n"
                  << "S_analytic=" << fmt9(s_analytic) << "\n";
        if (estimate) {
            std::cout << "S_sampled=" << fmt9(estimate->score) << " stderr="
                      << fmt9(estimate->stderr_) << " shots=" << opt.shots << " seed=" << opt.seed
                      << "\n";
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// behavior-dump

struct DumpOpts : CommonOpts {
    std::string oracle = "quantum";
    std::size_t parties = 2;
    std::string function = "xyz";
    std::string basis = "computational";
    std::string angles;
};

int run_behavior_dump(const DumpOpts& opt) {
    const OracleSpec spec = make_spec(opt.oracle, opt.parties, opt.function);
    const std::size_t n = spec.parties();

    std::vector<PartySettings> settings;
    if (!opt.angles.empty()) {
        settings = parse_angles(opt.angles, n);
    } else if (n == 2) {
        const SettingsPair pair = resolve_preset(opt.basis);
        settings = {pair.alice, pair.bob};
    } else {
        if (opt.basis != "computational") {
            throw ArgumentError("multiparty dumps support the computational preset or --angles");
        }
        settings.assign(n, PartySettings::shared(BlochDirection::z_axis()));
    }

    const Behavior b = behavior_from_oracle(spec, settings);
    if (opt.format == "csv") {
        std::ostringstream csv;
        for (std::size_t k = 0; k < n; ++k) csv << 'x' << (k + 1) << ',';
        for (std::size_t k = 0; k < n; ++k) csv << 'a' << (k + 1) << ',';
        csv << "p\n";
        for (std::size_t i = 0; i < b.num_input_tuples(); ++i) {
            for (std::size_t o = 0; o < b.num_output_tuples(); ++o) {
                for (const int v : unpack_bits(i, n)) csv << v << ',';
                for (const int v : unpack_bits(o, n)) csv << v << ',';
                csv << fmt9(b.prob_flat(i, o)) << '\n';
            }
        }
        write_text(opt.out_path, csv.str());
    } else {
        json j = behavior_to_json(b);
        // round table entries for stable output
        std::size_t pos = 0;
        std::vector<int> dims = b.inputs_per_party();
        dims.insert(dims.end(), b.outputs_per_party().begin(), b.outputs_per_party().end());
        std::vector<double> rounded;
        rounded.reserve(b.table().size());
        for (const double p : b.table()) rounded.push_back(round9(p));
        j["table"] = nsbox::detail::nested_from_flat(dims, 0, rounded, pos);
        write_text(opt.out_path, dump_json(j));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulate and analyze non-signaling oracle correlations"};
    app.require_subcommand(1);

    auto add_common = [](CLI::App* cmd, CommonOpts& opt) {
        cmd->add_option("--format", opt.format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out", opt.out_path, "write machine-readable output to this file");
        cmd->add_option("--tolerance", opt.tolerance, "numeric tolerance for checks");
    };

    ChshOpts chsh_opt;
    CLI::App* chsh_cmd = app.add_subcommand("chsh", "CHSH score in one or more preset bases");
    chsh_cmd->add_option("--oracle", chsh_opt.oracle)->check(CLI::IsMember({"quantum", "classical"}));
    chsh_cmd->add_option("--basis", chsh_opt.bases, "preset name(s)");
    chsh_cmd->add_option("--angles", chsh_opt.angles, "theta0,phi0,theta1,phi1 per party");
    add_common(chsh_cmd, chsh_opt);

    SweepOpts sweep_opt;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "CHSH versus a shared measurement angle");
    sweep_cmd->add_option("--sweep", sweep_opt.sweep, "swept angle: theta or phi")
        ->check(CLI::IsMember({"theta", "phi"}));
    sweep_cmd->add_option("--grid", sweep_opt.grid, "number of grid points");
    sweep_cmd->add_option("--theta", sweep_opt.theta, "fixed polar angle for phi sweeps");
    sweep_cmd->add_option("--phi", sweep_opt.phi, "fixed azimuth for theta sweeps");
    add_common(sweep_cmd, sweep_opt);

    NosigOpts nosig_opt;
    CLI::App* nosig_cmd = app.add_subcommand("nosig", "no-signaling verification");
    nosig_cmd->add_option("--oracle", nosig_opt.oracle)
        ->check(CLI::IsMember({"quantum", "classical"}));
    nosig_cmd->add_option("--parties", nosig_opt.parties, "party count (2..cap)");
    nosig_cmd->add_option("--function", nosig_opt.function)
        ->check(CLI::IsMember({"xyz", "xyplusxz", "svetlichny"}));
    nosig_cmd->add_option("--basis", nosig_opt.basis,
                          "check one preset instead of random settings");
    nosig_cmd->add_option("--samples", nosig_opt.samples, "random settings to test");
    nosig_cmd->add_option("--seed", nosig_opt.seed);
    nosig_cmd->add_flag("--unsafe-free-inputs", nosig_opt.unsafe_free_inputs,
                        "run the signaling free-input CNOT demonstration instead");
    add_common(nosig_cmd, nosig_opt);

    PrbasesOpts prbases_opt;
    CLI::App* prbases_cmd = app.add_subcommand("prbases", "PR measurement-basis families");
    prbases_cmd->add_option("--oracle", prbases_opt.oracle)
        ->check(CLI::IsMember({"quantum", "classical"}));
    prbases_cmd->add_option("--grid", prbases_opt.grid,
                            "points per angle for grid rediscovery (0 = families only)");
    add_common(prbases_cmd, prbases_opt);

    MultipartyOpts multi_opt;
    CLI::App* multi_cmd = app.add_subcommand("multiparty", "multipartite box verification");
    multi_cmd->add_option("--oracle", multi_opt.oracle)
        ->check(CLI::IsMember({"quantum", "classical"}));
    multi_cmd->add_option("--function", multi_opt.function)
        ->check(CLI::IsMember({"xyz", "xyplusxz", "svetlichny"}));
    multi_cmd->add_option("--n", multi_opt.n, "party count");
    add_common(multi_cmd, multi_opt);

    ExperimentOpts exp_opt;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "visibility noise + finite counts");
    exp_cmd->add_option("--state", exp_opt.state, "oracle or source")
        ->check(CLI::IsMember({"oracle", "source"}));
    exp_cmd->add_option("--oracle", exp_opt.oracle)->check(CLI::IsMember({"quantum", "classical"}));
    exp_cmd->add_option("--basis", exp_opt.basis, "preset name");
    exp_cmd->add_option("--visibility", exp_opt.visibility)->check(CLI::Range(0.0, 1.0));
    exp_cmd->add_option("--shots", exp_opt.shots, "shots per input pair (0 = analytic only)");
    exp_cmd->add_option("--seed", exp_opt.seed);
    add_common(exp_cmd, exp_opt);

    DumpOpts dump_opt;
    CLI::App* dump_cmd = app.add_subcommand("behavior-dump", "behavior table as JSON or CSV");
    dump_cmd->add_option("--oracle", dump_opt.oracle)->check(CLI::IsMember({"quantum", "classical"}));
    dump_cmd->add_option("--parties", dump_opt.parties);
    dump_cmd->add_option("--function", dump_opt.function)
        ->check(CLI::IsMember({"xyz", "xyplusxz", "svetlichny"}));
    dump_cmd->add_option("--basis", dump_opt.basis);
    dump_cmd->add_option("--angles", dump_opt.angles, "theta0,phi0,theta1,phi1 per party");
    dump_opt.format = "json";
    add_common(dump_cmd, dump_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (chsh_cmd->parsed()) return run_chsh(chsh_opt);
        if (sweep_cmd->parsed()) return run_sweep(sweep_opt);
        if (nosig_cmd->parsed()) return run_nosig(nosig_opt);
        if (prbases_cmd->parsed()) return run_prbases(prbases_opt);
        if (multi_cmd->parsed()) return run_multiparty(multi_opt);
        if (exp_cmd->parsed()) return run_experiment(exp_opt);
        if (dump_cmd->parsed()) return run_behavior_dump(dump_opt);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
