#include "phaseloom/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "phaseloom/analysis.hpp"
#include "phaseloom/errors.hpp"
#include "phaseloom/forward_model.hpp"
#include "phaseloom/io.hpp"
#include "phaseloom/projectors.hpp"
#include "phaseloom/rng.hpp"
#include "phaseloom/zernike.hpp"

namespace phaseloom {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::uint64_t kDataSeedTag = 0xDA7Aull;

void diag(std::vector<Diagnostic>& out, std::string path, std::string message) {
    out.push_back({std::move(path), std::move(message)});
}

bool require_object(const json& j, const std::string& path, std::vector<Diagnostic>& out) {
    if (j.is_object()) return true;
    diag(out, path, "expected an object");
    return false;
}

bool known_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> keys, std::vector<Diagnostic>& out) {
    bool ok = true;
    for (const auto& item : j.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
                return item.key() == k;
            }) == keys.end()) {
            diag(out, path + "/" + item.key(), "unknown key");
            ok = false;
        }
    }
    return ok;
}

bool positive_number(const json& j) { return j.is_number() && j.get<double>() > 0.0; }

bool valid_solver_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

void validate_stage(const json& stage, const std::string& path,
                    std::vector<Diagnostic>& out, bool check_keys = true) {
    if (!require_object(stage, path, out)) return;
    if (check_keys) known_keys(stage, path, {"kind", "relax", "iters"}, out);
    OperatorKind kind = OperatorKind::AP;
    bool kind_ok = false;
    if (!stage.contains("kind") || !stage["kind"].is_string()) {
        diag(out, path + "/kind", "operator kind is required (AP|DR|KMDR|HIO|RAAR|DRAP)");
    } else {
        try {
            kind = operator_kind_from_name(stage["kind"].get<std::string>());
            kind_ok = true;
        } catch (const ParameterError& e) {
            diag(out, path + "/kind", e.what());
        }
    }
    if (!stage.contains("iters") || !stage["iters"].is_number_unsigned() ||
        stage["iters"].get<std::uint64_t>() == 0) {
        diag(out, path + "/iters", "iteration count must be a positive integer");
    }
    double relax = 0.0;
    if (stage.contains("relax")) {
        if (!stage["relax"].is_number()) {
            diag(out, path + "/relax", "relaxation must be a number");
            return;
        }
        relax = stage["relax"].get<double>();
    }
    if (kind_ok) {
        try {
            SolverSpec probe(kind, relax, 1);
        } catch (const ParameterError& e) {
            diag(out, path + "/relax", e.what());
        }
    }
}

void validate_truth(const json& truth, const std::filesystem::path& base_dir,
                    std::vector<Diagnostic>& out) {
    if (!require_object(truth, "/truth", out)) return;
    known_keys(truth, "/truth", {"phase", "amplitude"}, out);
    if (!truth.contains("phase")) {
        diag(out, "/truth/phase", "truth phase is required");
    } else {
        const json& phase = truth["phase"];
        if (!phase.is_object()) {
            diag(out, "/truth/phase",
                 "expected {\"zernike\": [...]}, {\"file\": ...} or {\"random_zernike\": {...}}");
        } else if (phase.contains("zernike")) {
            known_keys(phase, "/truth/phase", {"zernike"}, out);
            const json& z = phase["zernike"];
            if (!z.is_array() || z.empty() || z.size() > kMaxFringeMode)
                diag(out, "/truth/phase/zernike", "expected 1..37 Fringe coefficients");
            else
                for (std::size_t i = 0; i < z.size(); ++i)
                    if (!z[i].is_number())
                        diag(out, "/truth/phase/zernike/" + std::to_string(i),
                             "coefficient must be a number");
        } else if (phase.contains("file")) {
            known_keys(phase, "/truth/phase", {"file"}, out);
            if (!phase["file"].is_string())
                diag(out, "/truth/phase/file", "expected a file path");
            else if (!std::filesystem::exists(base_dir / phase["file"].get<std::string>()))
                diag(out, "/truth/phase/file", "file not found");
        } else if (phase.contains("random_zernike")) {
            known_keys(phase, "/truth/phase", {"random_zernike"}, out);
            const json& r = phase["random_zernike"];
            if (!require_object(r, "/truth/phase/random_zernike", out)) return;
            known_keys(r, "/truth/phase/random_zernike", {"modes", "rms", "seed", "max_abs"},
                       out);
            if (r.contains("modes") &&
                (!r["modes"].is_number_unsigned() || r["modes"].get<std::uint64_t>() < 2 ||
                 r["modes"].get<std::uint64_t>() > kMaxFringeMode))
                diag(out, "/truth/phase/random_zernike/modes", "modes must be in 2..37");
            if (r.contains("rms") && !positive_number(r["rms"]))
                diag(out, "/truth/phase/random_zernike/rms", "rms must be positive");
            if (r.contains("max_abs") && !positive_number(r["max_abs"]))
                diag(out, "/truth/phase/random_zernike/max_abs", "max_abs must be positive");
            if (r.contains("seed") && !r["seed"].is_number_unsigned())
                diag(out, "/truth/phase/random_zernike/seed",
                     "seed must be an unsigned integer");
        } else {
            diag(out, "/truth/phase", "expected one of: zernike, file, random_zernike");
        }
    }
    if (truth.contains("amplitude")) {
        const json& a = truth["amplitude"];
        if (a.is_string()) {
            if (a.get<std::string>() != "uniform")
                diag(out, "/truth/amplitude", "expected \"uniform\" or {\"file\": ...}");
        } else if (a.is_object() && a.contains("file") && a["file"].is_string()) {
            known_keys(a, "/truth/amplitude", {"file"}, out);
            if (!std::filesystem::exists(base_dir / a["file"].get<std::string>()))
                diag(out, "/truth/amplitude/file", "file not found");
        } else {
            diag(out, "/truth/amplitude", "expected \"uniform\" or {\"file\": ...}");
        }
    }
}

}  // namespace

std::vector<Diagnostic> validate_config(const json& config,
                                        const std::filesystem::path& base_dir) {
    std::vector<Diagnostic> out;
    if (!config.is_object()) {
        diag(out, "/", "config must be a JSON object");
        return out;
    }
    known_keys(config, "",
               {"grid", "diversities", "truth", "noise", "solvers", "seeds", "outputs",
                "report", "record_timing", "previews"},
               out);

    if (!config.contains("grid")) {
        diag(out, "/grid", "grid is required");
    } else if (require_object(config["grid"], "/grid", out)) {
        const json& grid = config["grid"];
        known_keys(grid, "/grid", {"side", "aperture"}, out);
        std::size_t side = 0;
        if (!grid.contains("side") || !grid["side"].is_number_unsigned() ||
            grid["side"].get<std::uint64_t>() == 0)
            diag(out, "/grid/side", "side must be a positive integer");
        else
            side = grid["side"].get<std::size_t>();
        if (!grid.contains("aperture") || !grid["aperture"].is_object()) {
            diag(out, "/grid/aperture", "aperture parameters are required");
        } else {
            const json& ap = grid["aperture"];
            double radius = 0.0;
            if (ap.contains("radius_px")) {
                known_keys(ap, "/grid/aperture", {"radius_px"}, out);
                if (!positive_number(ap["radius_px"]))
                    diag(out, "/grid/aperture/radius_px", "radius_px must be positive");
                else
                    radius = ap["radius_px"].get<double>();
            } else {
                known_keys(ap, "/grid/aperture", {"na", "wavelength_um", "pixel_um"}, out);
                bool physical_ok = true;
                for (const char* k : {"na", "wavelength_um", "pixel_um"})
                    if (!ap.contains(k) || !positive_number(ap[k])) {
                        diag(out, std::string("/grid/aperture/") + k,
                             "must be a positive number");
                        physical_ok = false;
                    }
                if (physical_ok && side > 0)
                    radius = ap["na"].get<double>() * ap["pixel_um"].get<double>() *
                             static_cast<double>(side) / ap["wavelength_um"].get<double>();
            }
            if (radius > 0.0 && side > 0) {
                try {
                    Grid probe(side, radius);
                } catch (const Error& e) {
                    diag(out, "/grid/aperture", e.what());
                }
            }
        }
    }

    if (!config.contains("diversities") || !config["diversities"].is_array()) {
        diag(out, "/diversities", "a list of defocus values or phase-field files is required");
    } else {
        const json& div = config["diversities"];
        if (div.size() < 2)
            diag(out, "/diversities", "at least 2 diversity images are required");
        const bool numbers = !div.empty() && div[0].is_number();
        for (std::size_t i = 0; i < div.size(); ++i) {
            const std::string p = "/diversities/" + std::to_string(i);
            if (numbers && !div[i].is_number())
                diag(out, p, "mixed entry types; use all numbers or all file paths");
            else if (!numbers && !div[i].is_string())
                diag(out, p, "mixed entry types; use all numbers or all file paths");
            else if (div[i].is_string() &&
                     !std::filesystem::exists(base_dir / div[i].get<std::string>()))
                diag(out, p, "file not found");
        }
    }

    if (!config.contains("truth"))
        diag(out, "/truth", "truth description is required");
    else
        validate_truth(config["truth"], base_dir, out);

    if (config.contains("noise")) {
        const json& n = config["noise"];
        if (require_object(n, "/noise", out)) {
            known_keys(n, "/noise", {"poisson", "gaussian", "snr_db", "peak_photons", "seed"},
                       out);
            for (const char* k : {"poisson", "gaussian"})
                if (n.contains(k) && !n[k].is_boolean())
                    diag(out, std::string("/noise/") + k, "must be a boolean");
            if (n.contains("snr_db") && !n["snr_db"].is_number())
                diag(out, "/noise/snr_db", "must be a number");
            if (n.contains("peak_photons") && !positive_number(n["peak_photons"]))
                diag(out, "/noise/peak_photons", "must be a positive number");
            if (n.contains("seed") && !n["seed"].is_number_unsigned())
                diag(out, "/noise/seed", "seed must be an unsigned integer");
        }
    }

    if (!config.contains("solvers") || !config["solvers"].is_array() ||
        config["solvers"].empty()) {
        diag(out, "/solvers", "at least one solver is required");
    } else {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < config["solvers"].size(); ++i) {
            const std::string path = "/solvers/" + std::to_string(i);
            const json& s = config["solvers"][i];
            if (!require_object(s, path, out)) continue;
            if (!s.contains("name") || !s["name"].is_string() ||
                !valid_solver_name(s["name"].get<std::string>())) {
                diag(out, path + "/name",
                     "solver name is required (letters, digits, '-', '_')");
            } else {
                const std::string name = s["name"].get<std::string>();
                if (std::find(names.begin(), names.end(), name) != names.end())
                    diag(out, path + "/name", "duplicate solver name");
                names.push_back(name);
            }
            if (s.contains("schedule")) {
                known_keys(s, path, {"name", "schedule"}, out);
                if (!s["schedule"].is_array() || s["schedule"].empty())
                    diag(out, path + "/schedule", "schedule must be a non-empty stage list");
                else
                    for (std::size_t k = 0; k < s["schedule"].size(); ++k)
                        validate_stage(s["schedule"][k],
                                       path + "/schedule/" + std::to_string(k), out);
            } else {
                known_keys(s, path, {"name", "kind", "relax", "iters"}, out);
                validate_stage(s, path, out, /*check_keys=*/false);
            }
        }
    }

    if (config.contains("seeds")) {
        const json& seeds = config["seeds"];
        if (!seeds.is_array() || seeds.empty())
            diag(out, "/seeds", "seeds must be a non-empty list");
        else
            for (std::size_t i = 0; i < seeds.size(); ++i)
                if (!seeds[i].is_number_unsigned())
                    diag(out, "/seeds/" + std::to_string(i),
                         "seed must be an unsigned integer");
    }

    if (config.contains("outputs") &&
        (!config["outputs"].is_string() || config["outputs"].get<std::string>().empty()))
        diag(out, "/outputs", "outputs must be a non-empty directory path");

    if (config.contains("report")) {
        const json& rep = config["report"];
        if (require_object(rep, "/report", out)) {
            known_keys(rep, "/report", {"zernike_modes", "reference_metrics"}, out);
            if (rep.contains("zernike_modes") &&
                (!rep["zernike_modes"].is_number_unsigned() ||
                 rep["zernike_modes"].get<std::uint64_t>() < 1 ||
                 rep["zernike_modes"].get<std::uint64_t>() > kMaxFringeMode))
                diag(out, "/report/zernike_modes", "must be in 1..37");
            if (rep.contains("reference_metrics") && !rep["reference_metrics"].is_boolean())
                diag(out, "/report/reference_metrics", "must be a boolean");
        }
    }

    for (const char* k : {"record_timing", "previews"})
        if (config.contains(k) && !config[k].is_boolean())
            diag(out, std::string("/") + k, "must be a boolean");

    return out;
}

std::vector<Diagnostic> validate_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json parsed;
    try {
        parsed = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t line =
            1 + static_cast<std::size_t>(std::count(
                    text.begin(), text.begin() + std::min(text.size(), e.byte), '\n'));
        return {{"/", "JSON parse error at line " + std::to_string(line) + ": " + e.what()}};
    }
    if (parsed.is_object() && parsed.contains("config") && parsed.contains("runs"))
        parsed = parsed["config"];  // accept a summary.json for re-runs
    return validate_config(parsed, path.parent_path());
}

ExperimentConfig resolve_config(const json& config, const std::filesystem::path& base_dir) {
    ExperimentConfig out;
    const json& grid = config["grid"];
    out.grid.side = grid["side"].get<std::size_t>();
    const json& ap = grid["aperture"];
    if (ap.contains("radius_px")) {
        out.grid.physical = false;
        out.grid.radius_px = ap["radius_px"].get<double>();
    } else {
        out.grid.physical = true;
        out.grid.na = ap["na"].get<double>();
        out.grid.wavelength_um = ap["wavelength_um"].get<double>();
        out.grid.pixel_um = ap["pixel_um"].get<double>();
    }

    const json& div = config["diversities"];
    out.diversities_from_files = !div.empty() && div[0].is_string();
    for (const json& d : div) {
        if (out.diversities_from_files)
            out.diversity_files.push_back(base_dir / d.get<std::string>());
        else
            out.diversity_z.push_back(d.get<double>());
    }

    const json& phase = config["truth"]["phase"];
    if (phase.contains("zernike")) {
        out.truth_phase.kind = TruthPhaseConfig::Kind::Zernike;
        out.truth_phase.coefficients = phase["zernike"].get<std::vector<double>>();
    } else if (phase.contains("file")) {
        out.truth_phase.kind = TruthPhaseConfig::Kind::File;
        out.truth_phase.file = base_dir / phase["file"].get<std::string>();
    } else {
        out.truth_phase.kind = TruthPhaseConfig::Kind::RandomZernike;
        const json& r = phase["random_zernike"];
        if (r.contains("modes")) out.truth_phase.random_modes = r["modes"].get<std::size_t>();
        if (r.contains("rms")) out.truth_phase.random_rms = r["rms"].get<double>();
        if (r.contains("max_abs")) out.truth_phase.random_max_abs = r["max_abs"].get<double>();
        if (r.contains("seed")) out.truth_phase.random_seed = r["seed"].get<std::uint64_t>();
    }

    if (config["truth"].contains("amplitude") && config["truth"]["amplitude"].is_object()) {
        out.amplitude_uniform = false;
        out.amplitude_file = base_dir / config["truth"]["amplitude"]["file"].get<std::string>();
    }

    if (config.contains("noise")) {
        const json& n = config["noise"];
        if (n.contains("poisson")) out.noise.poisson_enabled = n["poisson"].get<bool>();
        if (n.contains("gaussian")) out.noise.gaussian_enabled = n["gaussian"].get<bool>();
        if (n.contains("snr_db")) out.noise.snr_db = n["snr_db"].get<double>();
        if (n.contains("peak_photons")) out.noise.peak_photons = n["peak_photons"].get<double>();
        if (n.contains("seed")) out.noise.seed = n["seed"].get<std::uint64_t>();
    }

    for (const json& s : config["solvers"]) {
        SolverConfig solver;
        solver.name = s["name"].get<std::string>();
        const auto read_stage = [](const json& stage) {
            StageConfig sc;
            sc.kind = operator_kind_from_name(stage["kind"].get<std::string>());
            sc.relax = stage.contains("relax") ? stage["relax"].get<double>() : 0.0;
            sc.iters = stage["iters"].get<std::size_t>();
            return sc;
        };
        if (s.contains("schedule"))
            for (const json& stage : s["schedule"]) solver.stages.push_back(read_stage(stage));
        else
            solver.stages.push_back(read_stage(s));
        out.solvers.push_back(std::move(solver));
    }

    if (config.contains("seeds"))
        out.seeds = config["seeds"].get<std::vector<std::uint64_t>>();
    else
        out.seeds = {1};

    out.outputs = base_dir / (config.contains("outputs")
                                  ? config["outputs"].get<std::string>()
                                  : std::string("out"));

    if (config.contains("report")) {
        const json& rep = config["report"];
        if (rep.contains("zernike_modes"))
            out.report_zernike_modes = rep["zernike_modes"].get<std::size_t>();
        if (rep.contains("reference_metrics"))
            out.report_reference_metrics = rep["reference_metrics"].get<bool>();
    }
    if (config.contains("record_timing")) out.record_timing = config["record_timing"].get<bool>();
    if (config.contains("previews")) out.previews = config["previews"].get<bool>();
    return out;
}

ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["grid"]["side"] = grid.side;
    if (grid.physical) {
        j["grid"]["aperture"]["na"] = grid.na;
        j["grid"]["aperture"]["wavelength_um"] = grid.wavelength_um;
        j["grid"]["aperture"]["pixel_um"] = grid.pixel_um;
    } else {
        j["grid"]["aperture"]["radius_px"] = grid.radius_px;
    }
    if (diversities_from_files) {
        auto arr = ordered_json::array();
        for (const auto& f : diversity_files) arr.push_back(f.string());
        j["diversities"] = arr;
    } else {
        j["diversities"] = diversity_z;
    }
    switch (truth_phase.kind) {
        case TruthPhaseConfig::Kind::Zernike:
            j["truth"]["phase"]["zernike"] = truth_phase.coefficients;
            break;
        case TruthPhaseConfig::Kind::File:
            j["truth"]["phase"]["file"] = truth_phase.file.string();
            break;
        case TruthPhaseConfig::Kind::RandomZernike:
            j["truth"]["phase"]["random_zernike"]["modes"] = truth_phase.random_modes;
            j["truth"]["phase"]["random_zernike"]["rms"] = truth_phase.random_rms;
            j["truth"]["phase"]["random_zernike"]["max_abs"] = truth_phase.random_max_abs;
            j["truth"]["phase"]["random_zernike"]["seed"] = truth_phase.random_seed;
            break;
    }
    if (amplitude_uniform)
        j["truth"]["amplitude"] = "uniform";
    else
        j["truth"]["amplitude"]["file"] = amplitude_file.string();
    j["noise"]["poisson"] = noise.poisson_enabled;
    j["noise"]["gaussian"] = noise.gaussian_enabled;
    j["noise"]["snr_db"] = noise.snr_db;
    j["noise"]["peak_photons"] = noise.peak_photons;
    j["noise"]["seed"] = noise.seed;
    auto solver_arr = ordered_json::array();
    for (const SolverConfig& s : solvers) {
        ordered_json sj;
        sj["name"] = s.name;
        auto stages = ordered_json::array();
        for (const StageConfig& st : s.stages) {
            ordered_json stage;
            stage["kind"] = operator_kind_name(st.kind);
            stage["relax"] = st.relax;
            stage["iters"] = st.iters;
            stages.push_back(stage);
        }
        sj["schedule"] = stages;
        solver_arr.push_back(sj);
    }
    j["solvers"] = solver_arr;
    j["seeds"] = seeds;
    j["outputs"] = outputs.string();
    j["report"]["zernike_modes"] = report_zernike_modes;
    j["report"]["reference_metrics"] = report_reference_metrics;
    j["record_timing"] = record_timing;
    j["previews"] = previews;
    return j;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("PHASELOOM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

RealField build_truth_phase(const TruthPhaseConfig& cfg, const Grid& grid) {
    if (cfg.kind == TruthPhaseConfig::Kind::File) {
        RealField phase = read_cxf_real(cfg.file);
        if (phase.size() != grid.pixel_count())
            throw DimensionError("truth phase file does not match the grid");
        phase.shape = {grid.side(), grid.side()};
        return phase;
    }
    RealField phase = RealField::grid(grid.side());
    if (cfg.kind == TruthPhaseConfig::Kind::Zernike) {
        for (std::size_t j = 0; j < cfg.coefficients.size(); ++j) {
            if (cfg.coefficients[j] == 0.0) continue;
            const RealField mode = zernike(j + 1, grid);
            for (std::size_t i = 0; i < phase.size(); ++i)
                phase[i] += cfg.coefficients[j] * mode[i];
        }
        return phase;
    }
    // Random smooth phase: gaussian Fringe coefficients (piston excluded),
    // scaled to the target aperture rms but kept clear of the pi wrap.
    CounterRng rng(cfg.random_seed, 0x74727574ull);
    const auto basis = zernike_basis(cfg.random_modes, grid);
    for (std::size_t j = 1; j < basis.size(); ++j) {
        const double c = rng.next_gaussian();
        for (std::size_t i = 0; i < phase.size(); ++i) phase[i] += c * basis[j][i];
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        if (grid.inside(i)) mean += phase[i];
    mean /= static_cast<double>(grid.aperture_pixel_count());
    double rms = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        if (grid.inside(i)) {
            const double v = phase[i] - mean;
            rms += v * v;
            max_abs = std::max(max_abs, std::abs(v));
        }
    rms = std::sqrt(rms / static_cast<double>(grid.aperture_pixel_count()));
    const double scale =
        max_abs > 0.0 ? std::min(cfg.random_rms / rms, cfg.random_max_abs / max_abs) : 0.0;
    for (std::size_t i = 0; i < phase.size(); ++i)
        phase[i] = grid.inside(i) ? (phase[i] - mean) * scale : 0.0;
    return phase;
}

struct RunOutcome {
    bool diverged = false;
    bool failed = false;
    bool io_failed = false;
    std::string error;
    std::size_t iterations = 0;
    std::vector<std::size_t> stage_ends;
    std::optional<double> final_dist;
    std::optional<double> final_rms_raw;
    std::optional<double> final_rms_smoothed;
    std::optional<double> rate;
    double wall_s = 0.0;
    std::string trace_path;
};

ordered_json outcome_row(const ExperimentConfig& cfg, std::size_t solver_idx,
                         std::size_t seed_idx, const RunOutcome& o) {
    ordered_json row;
    row["solver"] = cfg.solvers[solver_idx].name;
    row["seed"] = cfg.seeds[seed_idx];
    row["iterations"] = o.iterations;
    row["stage_ends"] = o.stage_ends;
    row["diverged"] = o.diverged;
    row["final_dist_opt"] = o.final_dist ? ordered_json(*o.final_dist) : ordered_json();
    row["final_rms_raw"] = o.final_rms_raw ? ordered_json(*o.final_rms_raw) : ordered_json();
    row["final_rms_smoothed"] =
        o.final_rms_smoothed ? ordered_json(*o.final_rms_smoothed) : ordered_json();
    row["empirical_rate"] = o.rate ? ordered_json(*o.rate) : ordered_json();
    row["wall_time_s"] = o.wall_s;
    row["trace"] = o.trace_path;
    if (!o.error.empty()) row["error"] = o.error;
    return row;
}

int run_experiment_impl(const ExperimentConfig& cfg, ordered_json* summary_out) {
    namespace fs = std::filesystem;
    const Grid grid = cfg.grid.physical
                          ? Grid::from_physical(cfg.grid.side, cfg.grid.na,
                                                cfg.grid.wavelength_um, cfg.grid.pixel_um)
                          : Grid(cfg.grid.side, cfg.grid.radius_px);

    std::vector<RealField> diversity_fields;
    if (cfg.diversities_from_files) {
        for (const auto& path : cfg.diversity_files) {
            RealField phi = read_cxf_real(path);
            if (phi.size() != grid.pixel_count())
                throw DimensionError("diversity field does not match the grid: " +
                                     path.string());
            phi.shape = {grid.side(), grid.side()};
            diversity_fields.push_back(std::move(phi));
        }
    } else {
        diversity_fields = make_diversities(cfg.diversity_z, grid);
    }
    const PropagationSpec spec(grid, std::move(diversity_fields));
    const std::size_t m = spec.image_count();
    const std::size_t n = spec.pupil_size();

    const RealField truth_phase = build_truth_phase(cfg.truth_phase, grid);
    RealField amplitude =
        cfg.amplitude_uniform ? grid.mask_field() : read_cxf_real(cfg.amplitude_file);
    if (amplitude.size() != n) throw DimensionError("amplitude does not match the grid");
    amplitude.shape = {grid.side(), grid.side()};

    ComplexField x_hat = ComplexField::grid(grid.side());
    for (std::size_t i = 0; i < n; ++i)
        if (amplitude[i] > 0.0) x_hat[i] = std::polar(amplitude[i], truth_phase[i]);

    fs::create_directories(cfg.outputs / "truth");
    fs::create_directories(cfg.outputs / "measurements");
    fs::create_directories(cfg.outputs / "traces");
    fs::create_directories(cfg.outputs / "restored");
    if (cfg.previews) fs::create_directories(cfg.outputs / "previews");

    write_cxf(cfg.outputs / "truth" / "phase.cxf", truth_phase);
    write_cxf(cfg.outputs / "truth" / "amplitude.cxf", amplitude);
    write_cxf(cfg.outputs / "truth" / "pupil.cxf", x_hat);
    if (cfg.previews)
        write_pgm16(cfg.outputs / "previews" / "truth_phase.pgm", truth_phase, grid.side(),
                    grid.side());

    // One measurement per seed entry, shared by all solvers so operator
    // comparisons see the same data realization.
    const std::vector<RealField> psfs = simulate_psfs(amplitude, truth_phase, spec);
    std::vector<Measurement> measurements;
    measurements.reserve(cfg.seeds.size());
    for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
        NoiseSpec noise = cfg.noise;
        noise.seed = hash64(cfg.noise.seed, kDataSeedTag, cfg.seeds[si]);
        const std::vector<RealField> noisy = add_noise(psfs, noise);
        RealField r({m, grid.side(), grid.side()});
        for (std::size_t d = 0; d < m; ++d)
            for (std::size_t i = 0; i < n; ++i)
                r[d * n + i] = noisy[d][i] / static_cast<double>(m);
        write_cxf(cfg.outputs / "measurements" /
                      ("meas_seed" + std::to_string(cfg.seeds[si]) + ".cxf"),
                  r);
        measurements.emplace_back(std::move(r));
    }

    const Prior prior = Prior::none();

    struct Task {
        std::size_t solver_idx;
        std::size_t seed_idx;
    };
    std::vector<Task> tasks;
    for (std::size_t j = 0; j < cfg.solvers.size(); ++j)
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) tasks.push_back({j, si});
    std::vector<RunOutcome> outcomes(tasks.size());

    auto execute = [&](const Task& task, RunOutcome& out) {
        const SolverConfig& solver = cfg.solvers[task.solver_idx];
        const std::uint64_t seed_value = cfg.seeds[task.seed_idx];
        const std::string run_name = solver.name + "_seed" + std::to_string(seed_value);
        try {
            std::vector<SolverSpec> stages;
            for (const StageConfig& st : solver.stages)
                stages.emplace_back(st.kind, st.relax, st.iters);
            const Schedule schedule(std::move(stages));
            const Measurement& meas = measurements[task.seed_idx];
            const SolveEnv env{spec, prior, meas};

            const std::uint64_t init_seed =
                hash64(cfg.noise.seed, task.solver_idx, seed_value);
            const ComplexField y0 = init_random(spec, prior, grid, init_seed);

            RunOptions opts;
            if (cfg.report_reference_metrics) {
                opts.reference = &x_hat;
                opts.truth_phase = &truth_phase;
                opts.grid = &grid;
            }
            opts.record_timing = cfg.record_timing;

            const auto t0 = std::chrono::steady_clock::now();
            RunResult res;
            try {
                res = run(schedule, y0, env, opts);
            } catch (const DivergenceError& e) {
                out.diverged = true;
                out.error = e.what();
                return;
            }
            if (cfg.record_timing)
                out.wall_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();

            out.iterations = res.trace.size();
            out.stage_ends = res.stage_ends;
            const fs::path trace_file = cfg.outputs / "traces" / (run_name + ".csv");
            write_trace_csv(trace_file, res.trace);
            out.trace_path = "traces/" + run_name + ".csv";

            const ComplexField x_rec = spec.apply_adjoint(res.y_final);
            RealField phase_rec = RealField::grid(grid.side());
            const cdouble alpha = cfg.report_reference_metrics
                                      ? optimal_phase(x_rec, x_hat)
                                      : cdouble(1.0, 0.0);
            for (std::size_t i = 0; i < x_rec.size(); ++i)
                phase_rec[i] = grid.inside(i) ? std::arg(alpha * x_rec[i]) : 0.0;
            write_cxf(cfg.outputs / "restored" / (run_name + "_phase.cxf"), phase_rec);

            std::optional<RealField> smoothed;
            try {
                smoothed = zernike_smooth(phase_rec, cfg.report_zernike_modes, grid);
                write_cxf(cfg.outputs / "restored" / (run_name + "_smoothed.cxf"), *smoothed);
            } catch (const ConditioningError& e) {
                out.error = e.what();
            }
            if (cfg.previews) {
                write_pgm16(cfg.outputs / "previews" / (run_name + "_phase.pgm"), phase_rec,
                            grid.side(), grid.side());
                if (smoothed)
                    write_pgm16(cfg.outputs / "previews" / (run_name + "_smoothed.pgm"),
                                *smoothed, grid.side(), grid.side());
            }

            if (cfg.report_reference_metrics) {
                out.final_dist = res.trace.empty() ? 0.0 : res.trace.back().dist_opt;
                try {
                    out.final_rms_raw = rms_error(phase_rec, truth_phase, grid);
                    if (smoothed)
                        out.final_rms_smoothed = rms_error(*smoothed, truth_phase, grid);
                } catch (const DomainError&) {
                    // zero reference phase: relative rms undefined, left null
                }
                try {
                    out.rate = contraction_estimate(res.trace, res.trace.size() / 2);
                } catch (const EstimationError&) {
                }
            }
        } catch (const IoError& e) {
            out.failed = out.io_failed = true;
            out.error = e.what();
        } catch (const Error& e) {
            out.failed = true;
            out.error = e.what();
        }
    };

    const std::size_t workers = std::min(worker_count(), tasks.size());
    if (workers <= 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) execute(tasks[t], outcomes[t]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t t = next.fetch_add(1);
                    if (t >= tasks.size()) return;
                    execute(tasks[t], outcomes[t]);
                }
            });
        for (auto& th : pool) th.join();
    }

    ordered_json summary;
    summary["config"] = cfg.to_json();
    if (cfg.report_reference_metrics && 2 * n <= 512) {
        try {
            const SpectralReport rep = spectral_report(x_hat, spec);
            summary["sigma2"] = rep.sigma2;
        } catch (const AssumptionError&) {
            summary["sigma2"] = nullptr;
        }
    } else {
        summary["sigma2"] = nullptr;
    }
    auto rows = ordered_json::array();
    for (std::size_t t = 0; t < tasks.size(); ++t)
        rows.push_back(outcome_row(cfg, tasks[t].solver_idx, tasks[t].seed_idx, outcomes[t]));
    summary["runs"] = rows;

    {
        std::ofstream out(cfg.outputs / "summary.json", std::ios::trunc);
        if (!out) throw IoError("cannot write summary.json");
        out << summary.dump(2) << "\n";
    }
    {
        std::ofstream out(cfg.outputs / "resolved_config.json", std::ios::trunc);
        if (!out) throw IoError("cannot write resolved_config.json");
        out << cfg.to_json().dump(2) << "\n";
    }

    if (summary_out != nullptr) *summary_out = summary;
    for (const RunOutcome& o : outcomes)
        if (o.io_failed) return 1;
    for (const RunOutcome& o : outcomes)
        if (o.failed) return 1;
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
    try {
        return run_experiment_impl(config, nullptr);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_experiment_file(const std::filesystem::path& config_path) {
    std::vector<Diagnostic> diags;
    try {
        diags = validate_config_file(config_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (!diags.empty()) {
        for (const Diagnostic& d : diags)
            std::cerr << "config error: " << d.path << ": " << d.message << "\n";
        return 2;
    }
    std::ifstream in(config_path);
    json parsed = json::parse(
        std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
    if (parsed.is_object() && parsed.contains("config") && parsed.contains("runs"))
        parsed = parsed["config"];
    const ExperimentConfig cfg = resolve_config(parsed, config_path.parent_path());
    try {
        return run_experiment_impl(cfg, nullptr);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

SweepParam sweep_param_from_name(const std::string& name) {
    if (name == "lambda") return SweepParam::Lambda;
    if (name == "snr") return SweepParam::Snr;
    if (name == "m") return SweepParam::DiversityCount;
    throw ParameterError("unknown sweep parameter: " + name + " (expected lambda|snr|m)");
}

namespace {

std::string sanitize_token(const std::string& v) {
    std::string out;
    for (char c : v)
        out.push_back(
            (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_');
    return out;
}

}  // namespace

int sweep_file(const std::filesystem::path& config_path, SweepParam param,
               const std::vector<std::string>& values) {
    if (values.empty()) {
        std::cerr << "usage error: sweep needs a non-empty value list\n";
        return 2;
    }
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config: " << config_path << "\n";
        return 1;
    }
    json base;
    try {
        base = json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>()));
    } catch (const json::parse_error& e) {
        std::cerr << "config error: /: " << e.what() << "\n";
        return 2;
    }
    if (base.is_object() && base.contains("config") && base.contains("runs"))
        base = base["config"];

    if (param == SweepParam::Lambda) {
        if (!base.contains("solvers") || !base["solvers"].is_array() ||
            base["solvers"].size() != 1) {
            std::cerr << "usage error: a lambda sweep needs exactly one solver\n";
            return 2;
        }
    }

    const std::filesystem::path base_dir = config_path.parent_path();
    const std::string base_outputs =
        base.contains("outputs") ? base["outputs"].get<std::string>() : std::string("out");

    const char* param_name = param == SweepParam::Lambda ? "lambda"
                             : param == SweepParam::Snr  ? "snr"
                                                         : "m";
    auto merged_rows = ordered_json::array();
    int exit_code = 0;

    for (const std::string& value : values) {
        json cfg = base;
        try {
            switch (param) {
                case SweepParam::Lambda: {
                    const double v = std::stod(value);
                    json& solver = cfg["solvers"][0];
                    if (solver.contains("schedule"))
                        for (json& stage : solver["schedule"]) stage["relax"] = v;
                    else
                        solver["relax"] = v;
                    break;
                }
                case SweepParam::Snr: {
                    if (value == "inf" || value == "Inf" || value == "INF") {
                        cfg["noise"]["gaussian"] = false;
                    } else {
                        cfg["noise"]["snr_db"] = std::stod(value);
                        cfg["noise"]["gaussian"] = true;
                    }
                    break;
                }
                case SweepParam::DiversityCount: {
                    const long k = std::stol(value);
                    if (!cfg.contains("diversities") || !cfg["diversities"].is_array() ||
                        k < 2 || static_cast<std::size_t>(k) > cfg["diversities"].size()) {
                        std::cerr << "usage error: m value " << value
                                  << " is outside 2..#diversities\n";
                        return 2;
                    }
                    json trimmed = json::array();
                    for (long i = 0; i < k; ++i) trimmed.push_back(cfg["diversities"][i]);
                    cfg["diversities"] = trimmed;
                    break;
                }
            }
        } catch (const std::exception&) {
            std::cerr << "usage error: cannot parse sweep value '" << value << "'\n";
            return 2;
        }
        cfg["outputs"] = base_outputs + "/sweep_" + param_name + "_" + sanitize_token(value);

        const std::vector<Diagnostic> diags = validate_config(cfg, base_dir);
        if (!diags.empty()) {
            for (const Diagnostic& d : diags)
                std::cerr << "config error (value " << value << "): " << d.path << ": "
                          << d.message << "\n";
            return 2;
        }
        ordered_json summary;
        try {
            const int rc = run_experiment_impl(resolve_config(cfg, base_dir), &summary);
            exit_code = std::max(exit_code, rc);
        } catch (const Error& e) {
            std::cerr << "error (value " << value << "): " << e.what() << "\n";
            return 1;
        }
        for (const auto& row : summary["runs"]) {
            ordered_json merged;
            merged[param_name] = value;
            for (const auto& item : row.items()) merged[item.key()] = item.value();
            merged_rows.push_back(merged);
        }
    }

    ordered_json sweep_summary;
    sweep_summary["param"] = param_name;
    sweep_summary["values"] = values;
    sweep_summary["rows"] = merged_rows;
    const std::filesystem::path out_path =
        base_dir / base_outputs / (std::string("sweep_") + param_name + "_summary.json");
    std::filesystem::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    out << sweep_summary.dump(2) << "\n";

    std::cout << param_name
              << ",solver,seed,final_dist_opt,final_rms_smoothed,empirical_rate\n";
    for (const auto& row : merged_rows) {
        std::cout << row[param_name].get<std::string>() << ","
                  << row["solver"].get<std::string>() << "," << row["seed"] << ","
                  << (row["final_dist_opt"].is_null()
                          ? ""
                          : format_double(row["final_dist_opt"].get<double>()))
                  << ","
                  << (row["final_rms_smoothed"].is_null()
                          ? ""
                          : format_double(row["final_rms_smoothed"].get<double>()))
                  << ","
                  << (row["empirical_rate"].is_null()
                          ? ""
                          : format_double(row["empirical_rate"].get<double>()))
                  << "\n";
    }
    return exit_code;
}

}  // namespace phaseloom
