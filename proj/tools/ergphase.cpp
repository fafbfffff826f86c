#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ergphase/enumeration.hpp"
#include "ergphase/manifest.hpp"
#include "ergphase/model.hpp"
#include "ergphase/observables.hpp"
#include "ergphase/phase.hpp"
#include "ergphase/sampler.hpp"
#include "ergphase/subgraph.hpp"
#include "ergphase/textio.hpp"
#include "ergphase/version.hpp"

namespace {

using ergphase::BetaPoint;
using ergphase::format_double;
using ordered_json = nlohmann::ordered_json;

ergphase::Error usage_error(const std::string& message) {
    return ergphase::Error("UsageError", message, 2);
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        const std::string piece =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw usage_error(std::string(flag) + " expects comma-joined numbers, got '" +
                              text + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return values;
}

BetaPoint parse_beta(const std::string& text) {
    const std::vector<double> v = parse_double_list(text, "--beta");
    if (v.size() != 3)
        throw usage_error("--beta expects exactly three comma-joined numbers");
    return BetaPoint{v[0], v[1], v[2]};
}

const char* region_name(ergphase::PhaseRegion r) {
    switch (r) {
        case ergphase::PhaseRegion::OffSurface: return "OffSurface";
        case ergphase::PhaseRegion::OnSurface: return "OnSurface";
        case ergphase::PhaseRegion::Critical: return "Critical";
    }
    return "?";
}

struct OutputSpec {
    std::string format = "csv";
    std::string path;
};

// Destination resolution: an explicit --out wins, then $ERGPHASE_OUT_DIR with
// a per-subcommand file name, then standard output.
void emit_payload(const std::string& payload, const OutputSpec& out,
                  const std::string& stem) {
    std::string path = out.path;
    if (path.empty()) {
        if (const char* dir = std::getenv("ERGPHASE_OUT_DIR"); dir && *dir)
            path = std::string(dir) + "/" + stem + "." + out.format;
    }
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw usage_error("cannot open output path '" + path + "'");
    file << payload;
    if (!file) throw usage_error("write failed for '" + path + "'");
}

ordered_json manifest_json(const ergphase::RunManifest& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [key, value] : ergphase::manifest_entries(m)) j[key] = value;
    return j;
}

ergphase::RunManifest make_manifest(const std::string& subcommand, int p, int q,
                                    const OutputSpec& out) {
    ergphase::RunManifest m;
    m.subcommand = subcommand;
    m.p = p;
    m.q = q;
    m.format = out.format;
    return m;
}

void echo_beta(ergphase::RunManifest& m, const BetaPoint& beta) {
    m.parameters.emplace_back("beta1", format_double(beta.beta1));
    m.parameters.emplace_back("beta2", format_double(beta.beta2));
    m.parameters.emplace_back("beta3", format_double(beta.beta3));
}

// Tabular payloads: fixed column list, rows of doubles, optional notes kept
// out of the data block.
struct Dataset {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> notes;
};

std::string render_dataset(const ergphase::RunManifest& m, const Dataset& d) {
    if (m.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        if (!d.notes.empty()) j["notes"] = d.notes;
        j["columns"] = d.columns;
        ordered_json rows = ordered_json::array();
        for (const auto& row : d.rows) {
            ordered_json r = ordered_json::array();
            for (double x : row) r.push_back(x);
            rows.push_back(std::move(r));
        }
        j["rows"] = std::move(rows);
        return j.dump(2) + "\n";
    }
    std::string out = ergphase::manifest_csv_header(m);
    for (const auto& note : d.notes) out += "# note=" + note + "\n";
    for (std::size_t c = 0; c < d.columns.size(); ++c) {
        if (c) out += ",";
        out += d.columns[c];
    }
    out += "\n";
    for (const auto& row : d.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ",";
            out += format_double(row[c]);
        }
        out += "\n";
    }
    return out;
}

// Single-row payloads: (name, preformatted value) pairs in column order.
std::string render_record(const ergphase::RunManifest& m,
                          const std::vector<std::pair<std::string, std::string>>& fields) {
    std::string out = ergphase::manifest_csv_header(m);
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c) out += ",";
        out += fields[c].first;
    }
    out += "\n";
    for (std::size_t c = 0; c < fields.size(); ++c) {
        if (c) out += ",";
        out += fields[c].second;
    }
    out += "\n";
    return out;
}

void run_free_energy(int p, int q, const std::string& beta_text, const OutputSpec& out) {
    const BetaPoint beta = parse_beta(beta_text);
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);
    const ergphase::FreeEnergyResult res = ergphase::free_energy(beta, spec);

    ergphase::RunManifest m = make_manifest("free-energy", p, q, out);
    echo_beta(m, beta);

    const auto is_global = [&](std::size_t i) {
        for (std::size_t g : res.maximizers.globals)
            if (g == i) return true;
        return false;
    };

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["psi"] = res.psi;
        ordered_json locals = ordered_json::array();
        for (std::size_t i = 0; i < res.maximizers.locals.size(); ++i) {
            const auto& lm = res.maximizers.locals[i];
            locals.push_back({{"u", lm.u},
                              {"value", lm.value},
                              {"second_derivative", lm.second_derivative},
                              {"global", is_global(i)}});
        }
        j["maximizers"] = std::move(locals);
        emit_payload(j.dump(2) + "\n", out, "free-energy");
        return;
    }
    std::string payload = ergphase::manifest_csv_header(m);
    payload += "psi,u,value,second_derivative,global\n";
    for (std::size_t i = 0; i < res.maximizers.locals.size(); ++i) {
        const auto& lm = res.maximizers.locals[i];
        payload += format_double(res.psi) + "," + format_double(lm.u) + "," +
                   format_double(lm.value) + "," + format_double(lm.second_derivative) +
                   "," + (is_global(i) ? "1" : "0") + "\n";
    }
    emit_payload(payload, out, "free-energy");
}

Dataset profile_dataset(const BetaPoint& beta, const ergphase::ModelSpec& spec,
                        int resolution) {
    Dataset d;
    d.columns = {"u", "objective", "slope"};
    for (int i = 1; i <= resolution; ++i) {
        const double u = double(i) / (resolution + 1);
        d.rows.push_back({u, ergphase::objective(u, beta, spec, 0),
                          ergphase::objective(u, beta, spec, 1)});
    }
    return d;
}

void run_figure(int id, int p, int q, int resolution, const OutputSpec& out) {
    if (id < 1 || id > 8)
        throw ergphase::UnknownFigure("figure id " + std::to_string(id) +
                                      " is outside the catalogue 1..8");
    if (resolution < 2) throw usage_error("--resolution must be at least 2");
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);

    ergphase::RunManifest m = make_manifest("figure", p, q, out);
    m.parameters.emplace_back("id", std::to_string(id));
    m.parameters.emplace_back("resolution", std::to_string(resolution));

    Dataset d;
    switch (id) {
        case 1: {
            const auto curve = ergphase::critical_curve(spec, resolution);
            d.columns = {"u0", "beta1_c", "beta2_c", "beta3"};
            for (const auto& cp : curve)
                d.rows.push_back({cp.u0, cp.beta1_c, cp.beta2_c, cp.beta3});
            break;
        }
        case 2: {
            const double beta3 = 2.0;
            m.parameters.emplace_back("beta3", format_double(beta3));
            const ergphase::CriticalPoint corner = ergphase::corner_point(beta3, spec);
            d.columns = {"beta1", "lower", "upper", "transition"};
            for (int i = 1; i <= resolution; ++i) {
                const double b1 =
                    corner.beta1_c - 5.0 + 5.0 * double(i) / (resolution + 1);
                const auto region = ergphase::v_region(b1, beta3, spec);
                const auto sp = ergphase::transition_beta2(b1, beta3, spec);
                if (!region || !sp) continue;
                d.rows.push_back({b1, region->lower, region->upper, sp->beta2});
            }
            break;
        }
        case 3: {
            const std::vector<double> slices = {0.0, 1.0, 2.0};
            const double base = ergphase::corner_point(slices.front(), spec).beta1_c;
            std::vector<double> grid;
            for (int i = 1; i <= resolution; ++i)
                grid.push_back(base - 5.0 + 5.0 * double(i) / (resolution + 1));
            const auto trace = ergphase::trace_surface(slices, grid, spec);
            d.columns = {"beta3", "beta1", "beta2",
                         "u_low", "u_high", "jump1", "jump2", "jump3"};
            for (const auto& sp : trace.points)
                d.rows.push_back({sp.beta3, sp.beta1, sp.beta2, sp.u_low, sp.u_high,
                                  sp.jumps[0], sp.jumps[1], sp.jumps[2]});
            d.notes = trace.notes;
            break;
        }
        default: {
            // Profile figures share the slice beta1 = 2, beta3 = 2; the three
            // curve-dependent ones are emitted at the computed boundary or
            // transition value, with the captioned rounding echoed alongside.
            const double beta1 = 2.0;
            const double beta3 = 2.0;
            double beta2 = 0.0;
            double nominal = 0.0;
            if (id == 4) {
                beta2 = nominal = -4.0;
            } else if (id == 7) {
                beta2 = nominal = -2.5;
            } else if (id == 5 || id == 6) {
                const auto region = ergphase::v_region(beta1, beta3, spec);
                if (!region)
                    throw ergphase::DomainError(
                        "no coexistence region at beta1=2, beta3=2 for this exponent pair");
                beta2 = (id == 5) ? region->lower : region->upper;
                nominal = (id == 5) ? -3.24 : -2.70;
            } else {
                const auto sp = ergphase::transition_beta2(beta1, beta3, spec);
                if (!sp)
                    throw ergphase::DomainError(
                        "no transition at beta1=2, beta3=2 for this exponent pair");
                beta2 = sp->beta2;
                nominal = -2.95;
            }
            m.parameters.emplace_back("beta1", format_double(beta1));
            m.parameters.emplace_back("beta2_nominal", format_double(nominal));
            m.parameters.emplace_back("beta2", format_double(beta2));
            m.parameters.emplace_back("beta3", format_double(beta3));
            d = profile_dataset({beta1, beta2, beta3}, spec, resolution);
            break;
        }
    }
    emit_payload(render_dataset(m, d), out, "figure-" + std::to_string(id));
}

void run_surface(int p, int q, const std::string& beta3_text, double b1_min,
                 double b1_max, int b1_count, bool nonneg, const OutputSpec& out) {
    const std::vector<double> beta3_values = parse_double_list(beta3_text, "--beta3");
    if (b1_count < 1) throw usage_error("--beta1-count must be positive");
    if (!(b1_min <= b1_max)) throw usage_error("--beta1-min must not exceed --beta1-max");
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);

    std::vector<double> grid;
    if (b1_count == 1) {
        grid.push_back(b1_min);
    } else {
        for (int i = 0; i < b1_count; ++i)
            grid.push_back(b1_min + (b1_max - b1_min) * double(i) / (b1_count - 1));
    }
    const ergphase::SurfaceTrace trace =
        ergphase::trace_surface(beta3_values, grid, spec, nonneg);

    ergphase::RunManifest m = make_manifest("surface", p, q, out);
    m.parameters.emplace_back("beta3", beta3_text);
    m.parameters.emplace_back("beta1_min", format_double(b1_min));
    m.parameters.emplace_back("beta1_max", format_double(b1_max));
    m.parameters.emplace_back("beta1_count", std::to_string(b1_count));
    m.parameters.emplace_back("nonneg", nonneg ? "1" : "0");

    Dataset d;
    d.columns = {"beta3", "beta1", "beta2", "u_low", "u_high", "jump1", "jump2", "jump3"};
    for (const auto& sp : trace.points)
        d.rows.push_back({sp.beta3, sp.beta1, sp.beta2, sp.u_low, sp.u_high, sp.jumps[0],
                          sp.jumps[1], sp.jumps[2]});
    d.notes = trace.notes;
    emit_payload(render_dataset(m, d), out, "surface");
}

void run_critical_curve(int p, int q, int samples, const OutputSpec& out) {
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);
    const auto curve = ergphase::critical_curve(spec, samples);

    ergphase::RunManifest m = make_manifest("critical-curve", p, q, out);
    m.parameters.emplace_back("samples", std::to_string(samples));

    Dataset d;
    d.columns = {"u0", "beta1_c", "beta2_c", "beta3"};
    for (const auto& cp : curve) d.rows.push_back({cp.u0, cp.beta1_c, cp.beta2_c, cp.beta3});
    emit_payload(render_dataset(m, d), out, "critical-curve");
}

void run_classify(int p, int q, const std::string& beta_text, const OutputSpec& out) {
    const BetaPoint beta = parse_beta(beta_text);
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);
    const ergphase::PhaseClassification pc = ergphase::classify(beta, spec);

    ergphase::RunManifest m = make_manifest("classify", p, q, out);
    echo_beta(m, beta);

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["region"] = region_name(pc.region);
        j["u_star"] = pc.u_star;
        j["u_low"] = pc.u_low;
        j["u_high"] = pc.u_high;
        j["u0"] = pc.u0;
        if (std::isfinite(pc.transition)) j["transition"] = pc.transition;
        emit_payload(j.dump(2) + "\n", out, "classify");
        return;
    }
    emit_payload(render_record(m, {{"region", region_name(pc.region)},
                                   {"u_star", format_double(pc.u_star)},
                                   {"u_low", format_double(pc.u_low)},
                                   {"u_high", format_double(pc.u_high)},
                                   {"u0", format_double(pc.u0)},
                                   {"transition", format_double(pc.transition)}}),
                 out, "classify");
}

void run_observables(int p, int q, const std::string& beta_text, const OutputSpec& out) {
    const BetaPoint beta = parse_beta(beta_text);
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);
    const ergphase::ObservableReport rep = ergphase::observable_report(beta, spec);

    ergphase::RunManifest m = make_manifest("observables", p, q, out);
    echo_beta(m, beta);

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["region"] = region_name(rep.classification.region);
        j["maximizer"] = rep.maximizer;
        j["coexistent"] = rep.first.coexistent;
        j["first_low"] = rep.first.branch_low;
        j["first_high"] = rep.first.branch_high;
        if (rep.has_second) {
            ordered_json h = ordered_json::array();
            for (const auto& row : rep.second) h.push_back(row);
            j["second"] = std::move(h);
        }
        emit_payload(j.dump(2) + "\n", out, "observables");
        return;
    }
    std::vector<std::pair<std::string, std::string>> fields = {
        {"region", region_name(rep.classification.region)},
        {"coexistent", rep.first.coexistent ? "1" : "0"},
        {"maximizer", format_double(rep.maximizer)},
        {"t_edge_low", format_double(rep.first.branch_low[0])},
        {"t_p_low", format_double(rep.first.branch_low[1])},
        {"t_q_low", format_double(rep.first.branch_low[2])},
        {"t_edge_high", format_double(rep.first.branch_high[0])},
        {"t_p_high", format_double(rep.first.branch_high[1])},
        {"t_q_high", format_double(rep.first.branch_high[2])}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c)
            fields.emplace_back("hess_" + std::to_string(r + 1) + std::to_string(c + 1),
                                format_double(rep.has_second ? rep.second[r][c] : nan));
    emit_payload(render_record(m, fields), out, "observables");
}

void run_universality(int p, int q, double beta1, double beta3, const OutputSpec& out) {
    const ergphase::ModelSpec spec = ergphase::validate_spec(p, q);
    const double gap = ergphase::universality_gap(beta1, beta3, spec);
    const auto sp = ergphase::transition_beta2(beta1, beta3, spec);

    ergphase::RunManifest m = make_manifest("universality", p, q, out);
    m.parameters.emplace_back("beta1", format_double(beta1));
    m.parameters.emplace_back("beta3", format_double(beta3));

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["transition"] = sp->beta2;
        j["gap"] = gap;
        emit_payload(j.dump(2) + "\n", out, "universality");
        return;
    }
    emit_payload(render_record(m, {{"beta1", format_double(beta1)},
                                   {"beta3", format_double(beta3)},
                                   {"transition", format_double(sp->beta2)},
                                   {"gap", format_double(gap)}}),
                 out, "universality");
}

void run_exact(int n, const std::string& beta_text, const std::string& h2_text,
               const std::string& h3_text, const OutputSpec& out) {
    const BetaPoint beta = parse_beta(beta_text);
    const ergphase::SubgraphSpec h2 = ergphase::parse_subgraph(h2_text);
    const ergphase::SubgraphSpec h3 = ergphase::parse_subgraph(h3_text);
    const ergphase::ExactEnumerator enumerator(n, h2, h3);
    const double psi = enumerator.psi(beta);
    const std::array<double, 3> means = enumerator.means(beta);

    ergphase::RunManifest m = make_manifest("exact", 0, 0, out);
    m.parameters.emplace_back("n", std::to_string(n));
    echo_beta(m, beta);
    m.parameters.emplace_back("h2", ergphase::format_subgraph(h2));
    m.parameters.emplace_back("h3", ergphase::format_subgraph(h3));

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["psi"] = psi;
        j["mean_edge"] = means[0];
        j["mean_h2"] = means[1];
        j["mean_h3"] = means[2];
        emit_payload(j.dump(2) + "\n", out, "exact");
        return;
    }
    emit_payload(render_record(m, {{"psi", format_double(psi)},
                                   {"mean_edge", format_double(means[0])},
                                   {"mean_h2", format_double(means[1])},
                                   {"mean_h3", format_double(means[2])}}),
                 out, "exact");
}

void run_sample(int n, const std::string& beta_text, const std::string& h2_text,
                const std::string& h3_text, std::int64_t sweeps, std::int64_t burn_in,
                std::int64_t thin, std::uint64_t seed, const OutputSpec& out) {
    ergphase::ChainConfig cfg;
    cfg.n = n;
    cfg.beta = parse_beta(beta_text);
    cfg.h2 = ergphase::parse_subgraph(h2_text);
    cfg.h3 = ergphase::parse_subgraph(h3_text);
    cfg.sweeps = sweeps;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.seed = seed;
    const ergphase::ChainTrace trace = ergphase::run_chain(cfg);

    ergphase::RunManifest m = make_manifest("sample", 0, 0, out);
    m.has_seed = true;
    m.seed = seed;
    m.parameters.emplace_back("n", std::to_string(n));
    echo_beta(m, cfg.beta);
    m.parameters.emplace_back("h2", ergphase::format_subgraph(cfg.h2));
    m.parameters.emplace_back("h3", ergphase::format_subgraph(cfg.h3));
    m.parameters.emplace_back("sweeps", std::to_string(sweeps));
    m.parameters.emplace_back("burn_in", std::to_string(burn_in));
    m.parameters.emplace_back("thin", std::to_string(thin));

    if (out.format == "json") {
        ordered_json j;
        j["manifest"] = manifest_json(m);
        j["rng"] = ergphase::rng_identifier;
        j["columns"] = std::vector<std::string>{"sweep", "t_edge", "t_h2", "t_h3"};
        ordered_json rows = ordered_json::array();
        for (std::size_t r = 0; r < trace.samples.size(); ++r)
            rows.push_back({trace.sample_sweeps[r], trace.samples[r][0],
                            trace.samples[r][1], trace.samples[r][2]});
        j["rows"] = std::move(rows);
        j["updates"] = trace.updates;
        j["flips"] = trace.flips;
        emit_payload(j.dump(2) + "\n", out, "sample");
        return;
    }
    std::ostringstream body;
    ergphase::write_trace_csv(body, cfg, trace);
    emit_payload(ergphase::manifest_csv_header(m) + body.str(), out, "sample");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact phase diagram of three-parameter exponential random graph models"};
    app.require_subcommand(1);
    app.fallthrough();

    OutputSpec out;
    app.add_option("--format", out.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out.path,
                   "output file (default: stdout, or $ERGPHASE_OUT_DIR/<subcommand>)");

    int p = 3;
    int q = 5;
    std::string beta_text;
    int figure_id = 0;
    int resolution = 200;
    std::string beta3_text = "0,1,2";
    double b1_min = 0.0;
    double b1_max = 0.0;
    int b1_count = 50;
    bool nonneg = false;
    int samples = 100;
    double beta1 = 0.0;
    double beta3 = 0.0;
    int n_vertices = 0;
    std::string h2_text = "3; 0-1,1-2,0-2";
    std::string h3_text = "5; 0-1,1-2,2-3,3-4,0-4";
    std::int64_t sweeps = 0;
    std::int64_t burn_in = 0;
    std::int64_t thin = 1;
    std::uint64_t seed = 0;

    const auto add_pq = [&](CLI::App* sub) {
        sub->add_option("--p", p, "smaller interaction exponent")->capture_default_str();
        sub->add_option("--q", q, "larger interaction exponent")->capture_default_str();
    };
    const auto add_beta = [&](CLI::App* sub) {
        sub->add_option("--beta", beta_text, "beta1,beta2,beta3")->required();
    };

    CLI::App* fe = app.add_subcommand("free-energy", "limiting free energy and maximizers");
    add_pq(fe);
    add_beta(fe);

    CLI::App* fig = app.add_subcommand("figure", "dataset behind one catalogued figure");
    fig->add_option("--id", figure_id, "figure number, 1..8")->required();
    add_pq(fig);
    fig->add_option("--resolution", resolution, "points per curve or profile")
        ->capture_default_str();

    CLI::App* surf = app.add_subcommand("surface", "first-order transition surface slices");
    add_pq(surf);
    surf->add_option("--beta3", beta3_text, "comma-joined slice values")
        ->capture_default_str();
    surf->add_option("--beta1-min", b1_min, "grid start")->required();
    surf->add_option("--beta1-max", b1_max, "grid end")->required();
    surf->add_option("--beta1-count", b1_count, "grid size")->capture_default_str();
    surf->add_flag("--nonneg", nonneg, "keep only points with beta2 >= 0");

    CLI::App* crit = app.add_subcommand("critical-curve", "second-order critical curve");
    add_pq(crit);
    crit->add_option("--samples", samples, "number of curve samples")->capture_default_str();

    CLI::App* cls = app.add_subcommand("classify", "phase region of one parameter point");
    add_pq(cls);
    add_beta(cls);

    CLI::App* obs = app.add_subcommand("observables", "limiting derivatives at one point");
    add_pq(obs);
    add_beta(obs);

    CLI::App* uni = app.add_subcommand("universality", "transition offset from -beta1-beta3");
    add_pq(uni);
    uni->add_option("--beta1", beta1, "edge coupling")->required();
    uni->add_option("--beta3", beta3, "third coupling")->required();

    CLI::App* exa = app.add_subcommand("exact", "finite-n enumeration of the free energy");
    exa->add_option("--n", n_vertices, "vertex count, 2..6")->required();
    add_beta(exa);
    exa->add_option("--h2", h2_text, "second subgraph")->capture_default_str();
    exa->add_option("--h3", h3_text, "third subgraph")->capture_default_str();

    CLI::App* smp = app.add_subcommand("sample", "heat-bath chain trace");
    smp->add_option("--n", n_vertices, "vertex count, 2..64")->required();
    add_beta(smp);
    smp->add_option("--h2", h2_text, "second subgraph")->capture_default_str();
    smp->add_option("--h3", h3_text, "third subgraph")->capture_default_str();
    smp->add_option("--sweeps", sweeps, "total sweeps")->required();
    smp->add_option("--burn-in", burn_in, "sweeps discarded before recording")
        ->capture_default_str();
    smp->add_option("--thin", thin, "record every thin-th sweep")->capture_default_str();
    smp->add_option("--seed", seed, "rng seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (fe->parsed()) run_free_energy(p, q, beta_text, out);
        else if (fig->parsed()) run_figure(figure_id, p, q, resolution, out);
        else if (surf->parsed()) run_surface(p, q, beta3_text, b1_min, b1_max, b1_count, nonneg, out);
        else if (crit->parsed()) run_critical_curve(p, q, samples, out);
        else if (cls->parsed()) run_classify(p, q, beta_text, out);
        else if (obs->parsed()) run_observables(p, q, beta_text, out);
        else if (uni->parsed()) run_universality(p, q, beta1, beta3, out);
        else if (exa->parsed()) run_exact(n_vertices, beta_text, h2_text, h3_text, out);
        else if (smp->parsed())
            run_sample(n_vertices, beta_text, h2_text, h3_text, sweeps, burn_in, thin,
                       seed, out);
    } catch (const ergphase::Error& e) {
        std::cerr << "error: kind=" << e.kind() << " message=" << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: kind=NumericalFailure message=" << e.what() << "\n";
        return 4;
    }
    return 0;
}
