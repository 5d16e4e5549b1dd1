#pragma once

// Experiment orchestration: run configuration, manifests, the sweep worker
// pool and the CSV writers used by the command-line driver.

#include "pxp/pxp.hpp"

#include "json.hpp"
#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace pxp {

inline constexpr char kArtifactVersion[] = "1.0.0";

namespace csv {
inline constexpr char kEigenstudyHeader[] = "L,lambda,thermal_index,E,W,Q,S_vN,f_Q,I2,I3";
inline constexpr char kTrajectoryHeader[] = "L,theta,t,E_A,W,Q,S_vN";
inline constexpr char kSummaryHeader[] = "L,theta,W_bar,Q_bar,S_bar,max_dE_A";
inline constexpr char kAnalyticsHeader[] = "theta,f,lambda1,lambda2,xi,h,p1,p2,p3,p4,e_analytic,e_numeric,L_numeric";
inline constexpr char kSeparationHeader[] = "L,shell_dim,w1,w2,z2_scar,z2_thermal_max,T_scar,I_scar";

/// Shortest round-trip representation; identical inputs give identical bytes.
inline std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string join(std::initializer_list<std::string> fields) {
    std::string out;
    for (auto const& f : fields) {
        if (!out.empty()) out += ',';
        out += f;
    }
    return out;
}

inline std::vector<std::string> split(std::string const& line, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}
} // namespace csv

/// Linearly spaced grid with n points on [a, b].
inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linspace: need at least one point");
    if (n == 1) return {a};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    out.back() = b;
    return out;
}

/// "0,0.5,1" or "a:b:n" (linspace). The token "pi" is accepted as a factor,
/// e.g. "0:pi/2:9" or "pi/4".
inline double parse_scalar(std::string token) {
    token.erase(std::remove_if(token.begin(), token.end(), ::isspace), token.end());
    if (token.empty()) throw std::invalid_argument("empty number");
    auto const pos = token.find("pi");
    if (pos == std::string::npos) {
        std::size_t used = 0;
        double const v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument("bad number '" + token + "'");
        return v;
    }
    std::string const head = token.substr(0, pos);
    std::string const tail = token.substr(pos + 2);
    double factor = 1.0;
    if (!head.empty()) {
        if (head.back() != '*') throw std::invalid_argument("bad number '" + token + "'");
        factor = parse_scalar(head.substr(0, head.size() - 1));
    }
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail.front() != '/') throw std::invalid_argument("bad number '" + token + "'");
        divisor = parse_scalar(tail.substr(1));
    }
    return factor * std::numbers::pi / divisor;
}

inline std::vector<double> parse_grid(std::string const& text) {
    if (text.find(':') != std::string::npos) {
        auto const parts = csv::split(text, ':');
        if (parts.size() != 3) throw std::invalid_argument("grid '" + text + "': expected a:b:n");
        return linspace(parse_scalar(parts[0]), parse_scalar(parts[1]), std::stoi(parts[2]));
    }
    std::vector<double> out;
    for (auto const& t : csv::split(text)) out.push_back(parse_scalar(t));
    if (out.empty()) throw std::invalid_argument("empty grid");
    return out;
}

struct RunConfig {
    std::string experiment = "eigenstudy";
    std::vector<int> sizes;
    std::vector<double> lambda_grid = linspace(0.0, 1.0, 11);
    std::vector<double> theta_grid;
    double dt = 0.5;
    double t_max = 1000.0;
    std::array<double, 2> window{100.0, 1000.0};
    double shell_tol = kDefaultShellTolerance;
    std::size_t max_thermal = 200;
    std::uint64_t seed = 20240613;
    std::string out = "results";
    int jobs = 1;
    int numeric_length = 16; // analytics comparison size

    /// Fills experiment-specific defaults for fields left empty.
    void apply_defaults() {
        if (sizes.empty()) {
            if (experiment == "quench") sizes = {12, 16};
            else if (experiment != "analytics") sizes = {10, 12, 14, 16};
        }
        if (experiment == "analytics" && !sizes.empty()) numeric_length = sizes.front();
        if (theta_grid.empty()) {
            theta_grid = experiment == "analytics" ? linspace(0.0, std::numbers::pi / 2, 101)
                                                   : linspace(0.0, std::numbers::pi / 2, 9);
        }
    }

    void validate() const {
        if (experiment == "eigenstudy" || experiment == "separate") {
            if (sizes.empty()) throw std::invalid_argument("config: L list is empty");
            for (int l : sizes)
                if (l < 4 || l % 2 != 0) throw std::invalid_argument("config: eigenstudy sizes must be even and >= 4");
            if (lambda_grid.empty()) throw std::invalid_argument("config: lambda grid is empty");
            for (double x : lambda_grid)
                if (x < 0.0 || x > 1.0) throw std::invalid_argument("config: lambda outside [0, 1]");
        }
        if (experiment == "quench") {
            if (sizes.empty()) throw std::invalid_argument("config: L list is empty");
            for (int l : sizes)
                if (l < 4 || l % 4 != 0) throw std::invalid_argument("config: quench sizes must be multiples of 4");
            if (theta_grid.empty()) throw std::invalid_argument("config: theta grid is empty");
            if (!(dt > 0.0) || t_max < 0.0) throw std::invalid_argument("config: need dt > 0 and tmax >= 0");
            if (window[0] > window[1] || window[1] > t_max + 1e-12)
                throw std::invalid_argument("config: window must satisfy t1 <= t2 <= tmax");
        }
        if (experiment == "analytics") {
            if (theta_grid.empty()) throw std::invalid_argument("config: theta grid is empty");
            if (numeric_length < 4 || numeric_length % 4 != 0)
                throw std::invalid_argument("config: analytics comparison L must be a positive multiple of 4");
        }
        if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
    }
};

inline void to_json(nlohmann::json& j, RunConfig const& c) {
    j = nlohmann::json{{"experiment", c.experiment}, {"L", c.sizes},          {"lambda_grid", c.lambda_grid},
                       {"theta_grid", c.theta_grid}, {"dt", c.dt},            {"tmax", c.t_max},
                       {"window", c.window},         {"shell_tol", c.shell_tol}, {"max_thermal", c.max_thermal},
                       {"seed", c.seed},             {"out", c.out},          {"jobs", c.jobs},
                       {"L_numeric", c.numeric_length}};
}

/// Reads keys present in `j` into `c`; unknown keys are rejected.
inline void merge_config(RunConfig& c, nlohmann::json const& j) {
    static std::vector<std::string> const known{"experiment", "L",           "lambda_grid", "theta_grid", "dt",
                                                "tmax",       "window",      "shell_tol",   "max_thermal", "seed",
                                                "out",        "jobs",        "L_numeric"};
    for (auto const& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");
    auto grid = [](nlohmann::json const& v) {
        return v.is_string() ? parse_grid(v.get<std::string>()) : v.get<std::vector<double>>();
    };
    if (j.contains("experiment")) c.experiment = j["experiment"].get<std::string>();
    if (j.contains("L")) c.sizes = j["L"].get<std::vector<int>>();
    if (j.contains("lambda_grid")) c.lambda_grid = grid(j["lambda_grid"]);
    if (j.contains("theta_grid")) c.theta_grid = grid(j["theta_grid"]);
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("tmax")) c.t_max = j["tmax"].get<double>();
    if (j.contains("window")) c.window = j["window"].get<std::array<double, 2>>();
    if (j.contains("shell_tol")) c.shell_tol = j["shell_tol"].get<double>();
    if (j.contains("max_thermal")) c.max_thermal = j["max_thermal"].get<std::size_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("L_numeric")) c.numeric_length = j["L_numeric"].get<int>();
}

inline RunConfig load_config(std::filesystem::path const& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open config " + file.string());
    RunConfig c;
    merge_config(c, nlohmann::json::parse(in));
    return c;
}

inline std::uint32_t file_crc32(std::filesystem::path const& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    uLong crc = crc32(0L, Z_NULL, 0);
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        auto const n = in.gcount();
        if (n > 0) crc = crc32(crc, reinterpret_cast<Bytef const*>(buf.data()), static_cast<uInt>(n));
    }
    return static_cast<std::uint32_t>(crc);
}

/// manifest.json in the output directory: written with status "running"
/// before any work and rewritten with checksums when the run finishes.
class RunManifest {
public:
    RunManifest(RunConfig const& config, std::filesystem::path dir) : dir_(std::move(dir)), start_(clock::now()) {
        std::filesystem::create_directories(dir_);
        doc_["experiment"] = config.experiment;
        doc_["version"] = kArtifactVersion;
        doc_["config"] = config;
        doc_["seed"] = config.seed;
        doc_["started"] = timestamp();
        doc_["status"] = "running";
        doc_["outputs"] = nlohmann::json::object();
        doc_["errors"] = nlohmann::json::array();
        doc_["notes"] = nlohmann::json::object();
        write();
    }

    void add_output(std::filesystem::path const& file) {
        std::lock_guard lock(mutex_);
        outputs_.push_back(file);
    }
    void add_error(std::string const& what) {
        std::lock_guard lock(mutex_);
        doc_["errors"].push_back(what);
    }
    void note(std::string const& key, nlohmann::json value) {
        std::lock_guard lock(mutex_);
        doc_["notes"][key] = std::move(value);
    }

    void finalize() {
        std::lock_guard lock(mutex_);
        std::sort(outputs_.begin(), outputs_.end());
        for (auto const& f : outputs_) {
            char hex[9];
            std::snprintf(hex, sizeof hex, "%08x", file_crc32(f));
            doc_["outputs"][f.filename().string()] = {{"crc32", hex}, {"bytes", std::filesystem::file_size(f)}};
        }
        doc_["finished"] = timestamp();
        doc_["wall_seconds"] = std::chrono::duration<double>(clock::now() - start_).count();
        doc_["status"] = doc_["errors"].empty() ? "complete" : "complete_with_errors";
        write();
    }

    nlohmann::json const& document() const noexcept { return doc_; }
    std::filesystem::path path() const { return dir_ / "manifest.json"; }

private:
    using clock = std::chrono::steady_clock;

    static std::string timestamp() {
        auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    void write() const {
        std::ofstream out(path());
        out << doc_.dump(2) << '\n';
    }

    std::filesystem::path dir_;
    clock::time_point start_;
    nlohmann::json doc_;
    std::vector<std::filesystem::path> outputs_;
    std::mutex mutex_;
};

/// Runs task(i) for i in [0, n) on at most `jobs` threads. The first
/// exception is rethrown after all workers stop.
inline void parallel_for(std::size_t n, int jobs, std::function<void(std::size_t)> const& task) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < std::min<int>(jobs, static_cast<int>(n)); ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- eigenstudy

/// Diagonalized full periodic space at one L with the scar split out.
struct ShellAnalysis {
    int length = 0;
    ConstrainedBasis basis;
    SpectralDecomposition spectrum;
    std::vector<std::size_t> shell;
    ScarSplit split;
    std::vector<std::size_t> thermal_indices; // columns of split.thermal used in the ensemble

    RealVector thermal(std::size_t n) const { return split.thermal.col(static_cast<Eigen::Index>(thermal_indices[n])); }
};

/// Uniform subset of [0, count) of size min(count, limit), returned sorted.
inline std::vector<std::size_t> sample_indices(std::size_t count, std::size_t limit, std::uint64_t seed) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (count <= limit) return idx;
    std::mt19937_64 rng(seed);
    // partial Fisher-Yates with explicit modulo draws, stable across standard libraries
    for (std::size_t k = 0; k < limit; ++k) {
        std::size_t const j = k + static_cast<std::size_t>(rng() % (count - k));
        std::swap(idx[k], idx[j]);
    }
    idx.resize(limit);
    std::sort(idx.begin(), idx.end());
    return idx;
}

inline ShellAnalysis analyse_shell(int length, double shell_tol = kDefaultShellTolerance, std::size_t max_thermal = 200,
                                   std::uint64_t seed = 0) {
    ShellAnalysis a{length, build_chain_basis(length, Boundary::Periodic), {}, {}, {}, {}};
    a.spectrum = dense_eigh(pxp_hamiltonian(a.basis));
    check_shell_gap(a.spectrum);
    a.shell = zero_energy_shell(a.spectrum, shell_tol);
    if (a.shell.size() < 2)
        throw std::runtime_error("L = " + std::to_string(length) + ": zero-energy shell has " +
                                 std::to_string(a.shell.size()) + " states, need a scar and a thermal complement");
    a.split = separate_scar(shell_vectors(a.spectrum, a.shell), fsa_basis(a.basis));
    a.thermal_indices = sample_indices(static_cast<std::size_t>(a.split.thermal.cols()), max_thermal,
                                       seed ^ static_cast<std::uint64_t>(length));
    return a;
}

struct EigenstudyRow {
    int length = 0;
    double lambda = 0.0;
    int thermal_index = 0; // -1 marks the ensemble mean
    double energy = 0.0;
    double ergotropy = 0.0;
    double bound_energy = 0.0;
    double entropy = 0.0;
    double qfi = 0.0;
    double mutual_information = 0.0;
    double tripartite = 0.0;

    std::string to_csv() const {
        return csv::join({std::to_string(length), csv::number(lambda), std::to_string(thermal_index),
                          csv::number(energy), csv::number(ergotropy), csv::number(bound_energy), csv::number(entropy),
                          csv::number(qfi), csv::number(mutual_information), csv::number(tripartite)});
    }
};

/// Precomputed cuts for the half-chain and the quarter regions A, B, C.
class EigenstateProbe {
public:
    explicit EigenstateProbe(ConstrainedBasis const& basis) : basis_(&basis), model_(basis.length() / 2) {
        int const L = basis.length();
        auto const a = CutGeometry::quarter(L, 0), b = CutGeometry::quarter(L, 1), c = CutGeometry::quarter(L, 2);
        half_.emplace(basis, CutGeometry::half_chain(L));
        std::vector<std::vector<Interval>> const regions{{a}, {b}, {c}, {a, b}, {b, c}, {a, c}, {a, b, c}};
        for (auto const& r : regions) cuts_.emplace_back(basis, CutGeometry(L, r));
    }

    template <typename Scalar>
    EigenstudyRow measure(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) const {
        EigenstudyRow row;
        row.length = basis_->length();
        auto const rho = reduced_density(*half_, state);
        auto const erg = ergotropy(rho, model_);
        row.energy = erg.energy;
        row.ergotropy = erg.ergotropy;
        row.bound_energy = erg.bound_energy;
        row.entropy = entropy(entanglement_spectrum(rho));
        row.qfi = qfi_density(*basis_, state);
        std::array<double, 7> s{};
        for (std::size_t k = 0; k < cuts_.size(); ++k) s[k] = entropy(entanglement_spectrum(cuts_[k], state));
        // s = {A, B, C, AB, BC, AC, ABC}
        row.mutual_information = s[0] + s[2] - s[5];
        row.tripartite = s[0] + s[1] + s[2] - s[3] - s[4] - s[5] + s[6];
        return row;
    }

    SubsystemModel const& model() const noexcept { return model_; }

private:
    ConstrainedBasis const* basis_;
    SubsystemModel model_;
    std::optional<Bipartition> half_;
    std::vector<Bipartition> cuts_;
};

/// The ensemble state at interpolation parameter lambda: lambda = 0 is the
/// pure scar and lambda = 1 the pure thermal state.
inline RealVector ensemble_state(RealVector const& scar, RealVector const& thermal, double lambda) {
    return interpolate(scar, thermal, 1.0 - lambda);
}

/// Per-thermal rows for every lambda followed by one ensemble-mean row
/// (thermal_index = -1) per lambda.
inline std::vector<EigenstudyRow> eigenstudy_rows(ShellAnalysis const& a, std::vector<double> const& lambda_grid) {
    EigenstateProbe const probe(a.basis);
    std::vector<EigenstudyRow> rows;
    for (double lambda : lambda_grid) {
        EigenstudyRow mean;
        mean.length = a.length;
        mean.lambda = lambda;
        mean.thermal_index = -1;
        auto const n_thermal = a.thermal_indices.size();
        for (std::size_t n = 0; n < n_thermal; ++n) {
            auto row = probe.measure(ensemble_state(a.split.scar, a.thermal(n), lambda));
            row.lambda = lambda;
            row.thermal_index = static_cast<int>(a.thermal_indices[n]);
            mean.energy += row.energy;
            mean.ergotropy += row.ergotropy;
            mean.bound_energy += row.bound_energy;
            mean.entropy += row.entropy;
            mean.qfi += row.qfi;
            mean.mutual_information += row.mutual_information;
            mean.tripartite += row.tripartite;
            rows.push_back(row);
        }
        auto const inv = 1.0 / static_cast<double>(n_thermal);
        mean.energy *= inv;
        mean.ergotropy *= inv;
        mean.bound_energy *= inv;
        mean.entropy *= inv;
        mean.qfi *= inv;
        mean.mutual_information *= inv;
        mean.tripartite *= inv;
        rows.push_back(mean);
    }
    return rows;
}

inline void write_lines(std::filesystem::path const& file, char const* header, std::vector<std::string> const& lines) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << header << '\n';
    for (auto const& l : lines) out << l << '\n';
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

inline std::vector<EigenstudyRow> read_eigenstudy_csv(std::filesystem::path const& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    std::string line;
    std::getline(in, line);
    if (line != csv::kEigenstudyHeader) throw std::runtime_error(file.string() + ": unexpected header '" + line + "'");
    std::vector<EigenstudyRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto const f = csv::split(line);
        if (f.size() != 10) throw std::runtime_error(file.string() + ": malformed row '" + line + "'");
        rows.push_back({std::stoi(f[0]), std::stod(f[1]), std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]),
                        std::stod(f[5]), std::stod(f[6]), std::stod(f[7]), std::stod(f[8]), std::stod(f[9])});
    }
    return rows;
}

/// Ensemble-level quantities at one (L, lambda).
struct EnsembleSummary {
    double ergotropy_density = 0.0; // mean W / L
    double entropy = 0.0;           // mean S_vN
    double sq_over_q = 0.0;         // mean(S^2) / mean(Q)
    double qfi = 0.0;
};

inline std::map<std::pair<int, double>, EnsembleSummary> summarize(std::vector<EigenstudyRow> const& rows) {
    struct Acc {
        double w = 0, s = 0, s2 = 0, q = 0, f = 0;
        int n = 0;
    };
    std::map<std::pair<int, double>, Acc> acc;
    for (auto const& r : rows) {
        if (r.thermal_index < 0) continue;
        auto& a = acc[{r.length, r.lambda}];
        a.w += r.ergotropy;
        a.s += r.entropy;
        a.s2 += r.entropy * r.entropy;
        a.q += r.bound_energy;
        a.f += r.qfi;
        ++a.n;
    }
    std::map<std::pair<int, double>, EnsembleSummary> out;
    for (auto const& [key, a] : acc) {
        double const n = a.n;
        out[key] = {a.w / n / key.first, a.s / n, (a.s2 / n) / (a.q / n), a.f / n};
    }
    return out;
}

inline nlohmann::json fit_to_json(FitResult const& f) {
    nlohmann::json coeffs = nlohmann::json::object();
    for (std::size_t k = 0; k < f.names.size(); ++k)
        coeffs[f.names[k]] = {{"value", f.coefficients[k]},
                              {"stderr", std::isfinite(f.standard_errors[k]) ? nlohmann::json(f.standard_errors[k])
                                                                             : nlohmann::json(nullptr)}};
    return {{"model", f.model}, {"coefficients", coeffs}, {"residual_norm", f.residual_norm},
            {"r_squared", f.r_squared}, {"samples", f.samples}};
}

/// All scaling fits over the sizes present in `rows`. Fits needing more
/// sizes than are available are reported as skipped.
inline nlohmann::json fit_eigenstudy(std::vector<EigenstudyRow> const& rows) {
    auto const table = summarize(rows);
    std::map<double, SizeSeries> sq, ent, wl, fq;
    for (auto const& [key, s] : table) {
        auto const L = static_cast<double>(key.first);
        sq[key.second].emplace_back(L, s.sq_over_q);
        ent[key.second].emplace_back(L, s.entropy);
        wl[key.second].emplace_back(L, s.ergotropy_density);
        fq[key.second].emplace_back(L, s.qfi);
    }
    nlohmann::json out;
    out["sq_over_q"] = nlohmann::json::array();
    out["entropy_scaling"] = nlohmann::json::array();
    out["ergotropy_extrapolation"] = nlohmann::json::array();
    out["qfi_slope"] = nlohmann::json::array();
    out["skipped"] = nlohmann::json::array();
    auto attempt = [&](char const* name, double lambda, auto&& body) {
        try {
            body();
        } catch (std::invalid_argument const& e) {
            out["skipped"].push_back({{"fit", name}, {"lambda", lambda}, {"reason", e.what()}});
        }
    };
    for (auto const& [lambda, data] : sq) {
        attempt("sq_over_q", lambda, [&] {
            auto j = fit_to_json(fit_sq_over_q(data));
            j["lambda"] = lambda;
            out["sq_over_q"].push_back(j);
        });
        attempt("entropy_scaling", lambda, [&] {
            auto j = fit_to_json(fit_entropy_scaling(ent.at(lambda)));
            j["lambda"] = lambda;
            out["entropy_scaling"].push_back(j);
        });
        attempt("qfi_slope", lambda, [&] {
            out["qfi_slope"].push_back({{"lambda", lambda}, {"slope", linear_slope(fq.at(lambda))}});
        });
    }
    for (auto const& [lambda, regime] : {std::pair{0.0, Regime::Scar}, std::pair{1.0, Regime::Thermal}}) {
        auto it = wl.find(lambda);
        if (it == wl.end()) continue;
        attempt("ergotropy_extrapolation", lambda, [&] {
            auto const e = extrapolate_ergotropy_density(it->second, regime);
            out["ergotropy_extrapolation"].push_back(
                {{"lambda", lambda},
                 {"regime", to_string(regime)},
                 {"w_inf", e.limit},
                 {"w_inf_stderr", std::isfinite(e.limit_error) ? nlohmann::json(e.limit_error) : nlohmann::json(nullptr)},
                 {"w_inf_without_smallest_L",
                  std::isfinite(e.drop_smallest_limit) ? nlohmann::json(e.drop_smallest_limit) : nlohmann::json(nullptr)},
                 {"correction_term_added", e.correction_term_added},
                 {"fit", fit_to_json(e.fit)}});
        });
    }
    return out;
}

inline std::filesystem::path eigenstudy_file(std::filesystem::path const& dir, int L) {
    return dir / ("eigenstudy_L" + std::to_string(L) + ".csv");
}

inline void write_json(std::filesystem::path const& file, nlohmann::json const& j) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << j.dump(2) << '\n';
}

inline void run_eigenstudy(RunConfig const& config) {
    std::filesystem::path const dir = config.out;
    RunManifest manifest(config, dir);
    std::vector<std::vector<EigenstudyRow>> per_size(config.sizes.size());
    parallel_for(config.sizes.size(), config.jobs, [&](std::size_t i) {
        int const L = config.sizes[i];
        auto const a = analyse_shell(L, config.shell_tol, config.max_thermal, config.seed);
        per_size[i] = eigenstudy_rows(a, config.lambda_grid);
        std::vector<std::string> lines;
        for (auto const& r : per_size[i]) lines.push_back(r.to_csv());
        auto const file = eigenstudy_file(dir, L);
        write_lines(file, csv::kEigenstudyHeader, lines);
        manifest.add_output(file);
        manifest.note("L" + std::to_string(L),
                      {{"shell_dim", a.shell.size()},
                       {"thermal_used", a.thermal_indices.size()},
                       {"top_fsa_weight", a.split.fsa_weights[0]},
                       {"subsystem_ground_energy", SubsystemModel(L / 2).ground_energy()},
                       {"warning", a.split.warning}});
    });
    std::vector<EigenstudyRow> all;
    for (auto const& v : per_size) all.insert(all.end(), v.begin(), v.end());
    auto const fits_file = dir / "eigenstudy_fits.json";
    write_json(fits_file, fit_eigenstudy(all));
    manifest.add_output(fits_file);
    manifest.finalize();
}

/// Refits from eigenstudy_L*.csv files already in `dir`.
inline nlohmann::json run_fit(RunConfig const& config) {
    std::filesystem::path const dir = config.out;
    std::vector<std::filesystem::path> files;
    for (auto const& entry : std::filesystem::directory_iterator(dir)) {
        auto const name = entry.path().filename().string();
        if (name.rfind("eigenstudy_L", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    if (files.empty()) throw std::runtime_error("fit: no eigenstudy_L*.csv in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<EigenstudyRow> all;
    for (auto const& f : files) {
        auto rows = read_eigenstudy_csv(f);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    auto const fits = fit_eigenstudy(all);
    write_json(dir / "eigenstudy_fits.json", fits);
    return fits;
}

// ------------------------------------------------------------------ separate

struct SeparationReport {
    int length = 0;
    std::size_t shell_dim = 0;
    double top_weight = 0.0;
    double second_weight = 0.0;
    double z2_scar = 0.0;        // |<Z2|scar>|^2
    double z2_thermal_max = 0.0; // max_n |<Z2|thermal_n>|^2
    double translation = 0.0;    // <scar|T|scar>
    double inversion = 0.0;      // <scar|I|scar>
    std::string warning;

    std::string to_csv() const {
        return csv::join({std::to_string(length), std::to_string(shell_dim), csv::number(top_weight),
                          csv::number(second_weight), csv::number(z2_scar), csv::number(z2_thermal_max),
                          csv::number(translation), csv::number(inversion)});
    }
};

inline SeparationReport separation_report(ShellAnalysis const& a) {
    SeparationReport r;
    r.length = a.length;
    r.shell_dim = a.shell.size();
    r.top_weight = a.split.fsa_weights[0];
    r.second_weight = a.split.fsa_weights.size() > 1 ? a.split.fsa_weights[1] : 0.0;
    auto const z2 = static_cast<Eigen::Index>(a.basis.index_of(z2_config(a.length)));
    r.z2_scar = a.split.scar[z2] * a.split.scar[z2];
    for (Eigen::Index n = 0; n < a.split.thermal.cols(); ++n)
        r.z2_thermal_max = std::max(r.z2_thermal_max, a.split.thermal(z2, n) * a.split.thermal(z2, n));
    r.translation = expectation(translation_operator(a.basis), a.split.scar);
    r.inversion = expectation(inversion_operator(a.basis), a.split.scar);
    r.warning = a.split.warning;
    return r;
}

inline void run_separate(RunConfig const& config) {
    std::filesystem::path const dir = config.out;
    RunManifest manifest(config, dir);
    std::vector<std::string> lines(config.sizes.size());
    parallel_for(config.sizes.size(), config.jobs, [&](std::size_t i) {
        auto const report = separation_report(analyse_shell(config.sizes[i], config.shell_tol, config.max_thermal, config.seed));
        lines[i] = report.to_csv();
        if (!report.warning.empty()) manifest.add_error("L = " + std::to_string(report.length) + ": " + report.warning);
    });
    auto const file = dir / "separation.csv";
    write_lines(file, csv::kSeparationHeader, lines);
    manifest.add_output(file);
    manifest.finalize();
}

// -------------------------------------------------------------------- quench

struct QuenchSummary {
    int length = 0;
    double theta = 0.0;
    SteadyState steady;
    double max_energy_drift = 0.0;

    std::string to_csv() const {
        return csv::join({std::to_string(length), csv::number(theta), csv::number(steady.ergotropy),
                          csv::number(steady.bound_energy), csv::number(steady.entropy), csv::number(max_energy_drift)});
    }
};

inline std::vector<std::string> trajectory_lines(TimeSeries const& s) {
    std::vector<std::string> lines;
    lines.reserve(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
        lines.push_back(csv::join({std::to_string(s.length), csv::number(s.theta), csv::number(s.times[k]),
                                   csv::number(s.energy[k]), csv::number(s.ergotropy[k]), csv::number(s.bound_energy[k]),
                                   csv::number(s.entropy[k])}));
    return lines;
}

inline std::filesystem::path trajectory_file(std::filesystem::path const& dir, int L, std::size_t theta_index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "quench_L%d_theta%03zu.csv", L, theta_index);
    return dir / buf;
}

inline void run_quench(RunConfig const& config) {
    std::filesystem::path const dir = config.out;
    RunManifest manifest(config, dir);
    QuenchOptions options;
    options.dt = config.dt;
    options.t_max = config.t_max;
    std::size_t const n_theta = config.theta_grid.size();
    std::size_t const cells = config.sizes.size() * n_theta;
    std::vector<std::optional<QuenchSummary>> summaries(cells);
    parallel_for(cells, config.jobs, [&](std::size_t cell) {
        int const L = config.sizes[cell / n_theta];
        std::size_t const it = cell % n_theta;
        double const theta = config.theta_grid[it];
        try {
            auto const series = quench_series(L, theta, options);
            auto const file = trajectory_file(dir, L, it);
            write_lines(file, csv::kTrajectoryHeader, trajectory_lines(series));
            manifest.add_output(file);
            summaries[cell] = QuenchSummary{L, theta, steady_average(series, config.window[0], config.window[1]),
                                            max_energy_drift(series)};
            manifest.note(file.filename().string(), {{"method", series.method}, {"theta", theta}});
        } catch (std::runtime_error const& e) {
            // a failed propagation only loses its own (L, theta) cell
            manifest.add_error("L = " + std::to_string(L) + ", theta = " + csv::number(theta) + ": " + e.what());
        }
    });
    std::vector<std::string> lines;
    for (auto const& s : summaries)
        if (s) lines.push_back(s->to_csv());
    auto const file = dir / "quench_summary.csv";
    write_lines(file, csv::kSummaryHeader, lines);
    manifest.add_output(file);
    manifest.finalize();
}

// ----------------------------------------------------------------- analytics

struct AnalyticsRow {
    TransferAnalytics closed;
    double e_analytic = 0.0;
    double e_numeric = 0.0;
    int numeric_length = 0;

    std::string to_csv() const {
        auto const& c = closed;
        return csv::join({csv::number(c.theta), csv::number(c.f), csv::number(c.lambda1), csv::number(c.lambda2),
                          csv::number(c.xi), csv::number(c.h), csv::number(c.two_cut[0]), csv::number(c.two_cut[1]),
                          csv::number(c.two_cut[2]), csv::number(c.two_cut[3]), csv::number(e_analytic),
                          csv::number(e_numeric), std::to_string(numeric_length)});
    }
};

/// <psi(theta)|H|psi(theta)> / L on the full periodic basis.
inline double numeric_energy_density(ConstrainedBasis const& basis, SparseOperator const& h, double theta) {
    return expectation(h, rotated_state(basis, theta).state) / basis.length();
}

struct AnalyticNumericComparison {
    std::vector<AnalyticsRow> rows;
    double max_energy_deviation = 0.0;
    double max_spectrum_deviation = 0.0; // top four half-chain values vs the two-cut set
};

/// Per theta: analytic vs numeric energy density at `length` and, when
/// `with_spectrum`, the numeric half-chain spectrum against the two-cut set.
inline AnalyticNumericComparison compare_analytic_numeric(std::vector<double> const& thetas, int length,
                                                          bool with_spectrum = true) {
    if (length % 4 != 0) throw std::invalid_argument("compare_analytic_numeric: L must be a multiple of 4");
    auto const basis = build_chain_basis(length, Boundary::Periodic);
    auto const h = pxp_hamiltonian(basis);
    std::optional<Bipartition> cut;
    if (with_spectrum) cut.emplace(basis, CutGeometry::half_chain(length));
    AnalyticNumericComparison out;
    for (double theta : thetas) {
        AnalyticsRow row;
        row.closed = transfer_analytics(theta);
        row.e_analytic = analytic_energy_density(theta, length);
        auto const state = rotated_state(basis, theta).state;
        row.e_numeric = expectation(h, state) / length;
        row.numeric_length = length;
        out.max_energy_deviation = std::max(out.max_energy_deviation, std::abs(row.e_analytic - row.e_numeric));
        if (cut) {
            auto spec = entanglement_spectrum(*cut, state).probabilities;
            spec.resize(std::max<std::size_t>(spec.size(), 4), 0.0);
            auto expected = row.closed.two_cut;
            std::sort(expected.begin(), expected.end(), std::greater<>());
            for (std::size_t k = 0; k < 4; ++k)
                out.max_spectrum_deviation = std::max(out.max_spectrum_deviation, std::abs(spec[k] - expected[k]));
        }
        out.rows.push_back(row);
    }
    return out;
}

inline void run_analytics(RunConfig const& config) {
    std::filesystem::path const dir = config.out;
    RunManifest manifest(config, dir);
    std::vector<std::string> lines;
    auto const cmp = compare_analytic_numeric(config.theta_grid, config.numeric_length);
    for (auto const& r : cmp.rows) lines.push_back(r.to_csv());
    manifest.note("max_energy_deviation", cmp.max_energy_deviation);
    manifest.note("max_spectrum_deviation", cmp.max_spectrum_deviation);
    manifest.note("energy_trace_prefactor", kEnergyTracePrefactor);
    auto const file = dir / "analytics.csv";
    write_lines(file, csv::kAnalyticsHeader, lines);
    manifest.add_output(file);
    manifest.finalize();
}

} // namespace pxp
