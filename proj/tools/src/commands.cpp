#include "commands.hpp"

#include "svg.hpp"

#include "nodeid/csv.hpp"
#include "nodeid/diffusion.hpp"
#include "nodeid/graph.hpp"
#include "nodeid/random.hpp"
#include "nodeid/randomwave.hpp"
#include "nodeid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

namespace nodeid::cli {

namespace fs = std::filesystem;

std::string error_line(const std::string& command, const std::string& code, const std::string& message,
                       const std::string& key) {
    std::string quoted;
    for (char c : message) {
        if (c == '"' || c == '\\') quoted += '\\';
        quoted += c == '\n' ? ' ' : c;
    }
    std::string line = "error command=" + command + " code=" + code;
    if (!key.empty()) line += " key=" + key;
    return line + " message=\"" + quoted + "\"";
}

namespace {

// Collects failed internal checks for one command run.
class Checks {
public:
    Checks(std::string command, std::ostream& diag) : command_(std::move(command)), diag_(diag) {}

    void require(bool ok, const std::string& name, const std::string& detail) {
        if (ok) return;
        ++failed_;
        diag_ << error_line(command_, "assertion", detail, name) << '\n';
    }
    int exit_code() const { return failed_ ? kExitAssertion : kExitOk; }

private:
    std::string command_;
    std::ostream& diag_;
    int failed_ = 0;
};

// Renders into memory first so a failed run never leaves a partial file.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& render) {
    std::ostringstream buffer;
    render(buffer);
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandError(kExitRuntime, "io", "cannot open output file " + path);
    const std::string data = buffer.str();
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw CommandError(kExitRuntime, "io", "failed writing " + path);
}

std::string out_dir_file(const std::string& dir, const std::string& name) {
    if (dir.empty()) throw CommandError(kExitUsage, "usage", "--out directory is required");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CommandError(kExitRuntime, "io", "cannot create directory " + dir + ": " + ec.message());
    return (fs::path(dir) / name).string();
}

Graph load_connected(const std::string& path) {
    Graph g;
    try {
        g = read_edge_list(path);
    } catch (const std::exception& e) {
        throw CommandError(kExitRuntime, "io", "cannot load graph " + path + ": " + e.what());
    }
    if (!g.is_connected()) throw CommandError(kExitUsage, "disconnected", "graph " + path + " is not connected");
    return g;
}

int report_issues(const std::string& command, const KeyValueConfig& kv, std::ostream& diag) {
    for (const auto& issue : kv.issues()) diag << error_line(command, "config", issue.message, issue.key) << '\n';
    return kExitUsage;
}

}  // namespace

SeparationConfig separation_config(KeyValueConfig& kv, std::optional<std::uint64_t> seed_override,
                                   std::optional<unsigned> threads_override) {
    kv.reject_unknown({"n_values", "r", "k_values", "trials", "seed", "m", "t", "tail_eps", "exact_ablation",
                       "threads"});
    SeparationConfig c;
    c.r = static_cast<int>(kv.integer("r", c.r, 3));
    c.n_values = kv.size_list("n_values", c.n_values);
    c.k_values = kv.size_list("k_values", c.k_values);
    c.trials = static_cast<std::size_t>(kv.integer("trials", 500, 1));
    c.m = static_cast<std::size_t>(kv.integer("m", 8, 1));
    c.t = kv.real("t", c.t, true);
    c.tail_eps = kv.real("tail_eps", c.tail_eps, true);
    c.exact_ablation = kv.boolean("exact_ablation", c.exact_ablation);
    c.threads = static_cast<unsigned>(kv.integer("threads", 1, 1));
    if (threads_override) c.threads = *threads_override;
    if (seed_override) {
        c.seed = *seed_override;
    } else if (kv.has("seed")) {
        c.seed = kv.unsigned_integer("seed", 0);
    } else {
        kv.add_issue("seed", "seed is required (config key or --seed)");
    }
    if (c.tail_eps > 1e-3) kv.add_issue("tail_eps", "must lie in (0, 1e-3]");
    if (c.threads == 0) kv.add_issue("threads", "must be at least 1");
    for (std::size_t n : c.n_values) {
        if (n <= std::size_t(c.r)) kv.add_issue("n_values", "n=" + std::to_string(n) + " must exceed r");
        if ((n * std::size_t(c.r)) % 2) kv.add_issue("n_values", "n*r must be even (n=" + std::to_string(n) + ")");
        if (c.m + 1 >= n) kv.add_issue("m", "m must be below n - 1 for n=" + std::to_string(n));
    }
    if (!std::is_sorted(c.n_values.begin(), c.n_values.end()))
        kv.add_issue("n_values", "must be ascending");
    return c;
}

InjectivityConfig injectivity_config(KeyValueConfig& kv, std::optional<std::uint64_t> seed_override,
                                     std::optional<unsigned> threads_override) {
    kv.reject_unknown({"M_values", "eps_values", "pairs", "n_values", "C", "trials", "seed", "threads"});
    InjectivityConfig c;
    c.M_values = kv.size_list("M_values", c.M_values);
    c.eps_values = kv.real_list("eps_values", c.eps_values);
    c.pairs = static_cast<std::size_t>(kv.integer("pairs", std::int64_t(c.pairs), 1));
    c.n_values = kv.size_list("n_values", c.n_values);
    c.C = kv.real("C", c.C, true);
    c.trials = static_cast<std::size_t>(kv.integer("trials", std::int64_t(c.trials), 1));
    c.threads = static_cast<unsigned>(kv.integer("threads", 1, 1));
    if (threads_override) c.threads = *threads_override;
    if (seed_override) {
        c.seed = *seed_override;
    } else if (kv.has("seed")) {
        c.seed = kv.unsigned_integer("seed", 0);
    } else {
        kv.add_issue("seed", "seed is required (config key or --seed)");
    }
    if (c.threads == 0) kv.add_issue("threads", "must be at least 1");
    for (std::size_t M : c.M_values)
        if (M == 0) kv.add_issue("M_values", "entries must be at least 1");
    if (!std::is_sorted(c.M_values.begin(), c.M_values.end())) kv.add_issue("M_values", "must be ascending");
    for (double eps : c.eps_values)
        if (!(eps > 0)) kv.add_issue("eps_values", "entries must be positive");
    for (std::size_t n : c.n_values)
        if (n < 2 || n > 8192) kv.add_issue("n_values", "entries must lie in [2, 8192]");
    if (!std::is_sorted(c.n_values.begin(), c.n_values.end())) kv.add_issue("n_values", "must be ascending");
    return c;
}

int cmd_gen(const GenOptions& opts, std::ostream& diag) {
    if (!opts.seed) throw CommandError(kExitUsage, "usage", "--seed is required", "seed");
    Graph g;
    try {
        g = generate_random_regular(opts.n, opts.r, *opts.seed);
    } catch (const std::invalid_argument& e) {
        throw CommandError(kExitUsage, "invalid_argument", e.what());
    } catch (const std::runtime_error& e) {
        throw CommandError(kExitRuntime, "retry_cap", e.what());
    }
    Checks checks("gen", diag);
    const auto report = audit(g);
    checks.require(report.ok, "audit", report.ok ? "" : report.problems.front());
    checks.require(g.regular_degree() == opts.r, "degree", "generated graph is not r-regular");
    write_file(opts.out, [&](std::ostream& out) { write_edge_list(out, g); });
    diag << "gen: n=" << g.node_count() << " r=" << opts.r << " edges=" << g.edge_count() << " -> " << opts.out
         << '\n';
    return checks.exit_code();
}

int cmd_pe(const PeOptions& opts, std::ostream& diag) {
    const Graph g = load_connected(opts.graph);
    if (opts.M < 1) throw CommandError(kExitUsage, "usage", "M must be at least 1", "M");
    const std::size_t n = g.node_count();
    if (n < 2) throw CommandError(kExitUsage, "usage", "graph needs at least two nodes");
    const std::size_t M = std::min(opts.M, n - 1);
    if (M < opts.M) diag << "warning: M=" << opts.M << " exceeds n-1; clamped to " << M << '\n';
    const auto dec = graph_spectrum(g, M + 1);
    const auto pe = build_psi(dec, M);

    Checks checks("pe", diag);
    double worst_identity = 0, min_entry = 0;
    for (Eigen::Index v = 0; v < pe.values.rows(); ++v) {
        min_entry = std::min(min_entry, pe.values.row(v).tail(Eigen::Index(pe.dim() - M)).minCoeff());
        for (std::size_t j = 1; j <= M; ++j)
            for (std::size_t k = j + 1; k <= M; ++k) {
                const double u = pe.values(v, Eigen::Index(pe.u_index(j, k)));
                const double sj = pe.values(v, Eigen::Index(pe.s_offset() + j - 1));
                const double sk = pe.values(v, Eigen::Index(pe.s_offset() + k - 1));
                worst_identity = std::max(worst_identity, std::abs(u * u - sj * sk));
            }
    }
    checks.require(min_entry >= 0, "nonnegative", "negative s/u entry " + format_real(min_entry));
    checks.require(worst_identity <= 1e-12, "cross_term_identity",
                   "u^2 - s_j s_k reached " + format_real(worst_identity));
    if (dec.last_group_partial) diag << "warning: eigenvalue lambda_" << M << " is degenerate past M\n";
    write_file(opts.out, [&](std::ostream& out) { write_pe_csv(out, pe); });
    diag << "pe: n=" << n << " M=" << M << " dim=" << pe.dim() << " -> " << opts.out << '\n';
    return checks.exit_code();
}

int cmd_treekernel(const TreeKernelOptions& opts, std::ostream& diag) {
    TreeKernelTable table;
    try {
        table = tree_radial_kernel(opts.r, opts.t, opts.d_max, opts.tail_eps);
    } catch (const std::invalid_argument& e) {
        throw CommandError(kExitUsage, "invalid_argument", e.what());
    }
    Checks checks("treekernel", diag);
    checks.require(table.psi[0] == 0.0, "psi_zero", "psi[0] = " + format_real(table.psi[0]));
    const int strict = std::min(table.strict_limit, table.d_max);
    for (int d = 1; d <= strict; ++d) {
        checks.require(table.psi[d] > table.psi[d - 1], "psi_increasing", "psi not increasing at d=" + std::to_string(d));
        checks.require(table.p[d] < table.p[d - 1], "p_decreasing", "p not decreasing at d=" + std::to_string(d));
    }
    for (int d = strict + 1; d <= table.d_max; ++d)
        checks.require(table.psi[d] >= table.psi[d - 1], "psi_monotone",
                       "psi decreases at d=" + std::to_string(d));
    if (strict < table.d_max)
        diag << "warning: psi saturates in double precision beyond d=" << strict << '\n';
    double shell_mass = 0;
    for (int d = 0; d <= table.d_max; ++d) shell_mass += table.p[d] * shell_size(opts.r, d);
    checks.require(shell_mass <= 1 + 1e-9, "shell_mass", "tabulated shell mass " + format_real(shell_mass));
    checks.require(std::abs(table.total_mass_t - 1) <= table.tail_eps + 1e-9, "total_mass",
                   "radial mass " + format_real(table.total_mass_t));
    write_file(opts.out, [&](std::ostream& out) { write_tree_kernel_csv(out, table); });
    diag << "treekernel: r=" << opts.r << " t=" << format_real(opts.t) << " d_max=" << opts.d_max
         << " terms=" << table.series_terms << " shell_mass=" << format_real(shell_mass) << " -> " << opts.out
         << '\n';
    return checks.exit_code();
}

int cmd_separation(const SeparationOptions& opts, std::ostream& diag) {
    KeyValueConfig kv = opts.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(opts.config);
    const SeparationConfig config = separation_config(kv, opts.seed, opts.threads);
    if (!kv.issues().empty()) return report_issues("separation", kv, diag);
    const std::string csv_path = out_dir_file(opts.out, "separation.csv");
    const std::string svg_path = out_dir_file(opts.out, "separation.svg");

    SeparationResult result;
    try {
        result = run_separation(config);
    } catch (const std::exception& e) {
        throw CommandError(kExitRuntime, "runtime", e.what());
    }

    Checks checks("separation", diag);
    for (const auto& rec : result.records) {
        const std::string where = rec.method + " n=" + std::to_string(rec.n) + " k=" + std::to_string(rec.k);
        checks.require(rec.accuracy >= 0 && rec.accuracy <= 1, "accuracy_range", where);
        checks.require(rec.singleton_prob >= 0 && rec.singleton_prob <= 1, "singleton_range", where);
        checks.require(rec.degenerate_count < rec.trials || rec.method == "WL", "degenerate", where);
        if (rec.method == "WL") {
            // Bayes ceiling: the WL decoder cannot beat E[1/|bucket|].
            const double se = std::max(rec.acc_stderr, 1.0 / double(rec.trials));
            checks.require(rec.accuracy <= rec.exp_inv_bucket + 3 * se, "bayes_ceiling",
                           where + " accuracy " + format_real(rec.accuracy) + " above E[1/|B|] " +
                               format_real(rec.exp_inv_bucket));
        }
    }

    write_file(csv_path, [&](std::ostream& out) { write_separation_csv(out, result.records); });
    write_file(svg_path, [&](std::ostream& out) { write_separation_svg(out, result.records); });

    for (std::size_t i = 0; i < config.n_values.size(); ++i) {
        const std::size_t n = config.n_values[i];
        diag << "separation: n=" << n << " diameter=" << result.diameters[i];
        for (const char* method : {"WL", "LAP"}) {
            std::optional<std::size_t> first;
            for (const auto& rec : result.records)
                if (rec.n == n && rec.method == method && rec.accuracy >= 0.9) {
                    first = rec.k;
                    break;
                }
            diag << ' ' << method << "_k90=" << (first ? std::to_string(*first) : std::string("none"));
        }
        diag << '\n';
    }
    diag << "separation: " << result.records.size() << " rows -> " << csv_path << ", " << svg_path << '\n';
    return checks.exit_code();
}

int cmd_invariance(const InvarianceOptions& opts, std::ostream& diag) {
    if (!opts.seed) throw CommandError(kExitUsage, "usage", "--seed is required", "seed");
    if (opts.trials == 0) throw CommandError(kExitUsage, "usage", "trials must be positive", "trials");
    const Graph g = load_connected(opts.graph);
    const std::size_t n = g.node_count();
    if (n < 2) throw CommandError(kExitUsage, "usage", "graph needs at least two nodes");
    const std::size_t M = std::min(opts.M, n - 1);
    if (M < opts.M) diag << "warning: M=" << opts.M << " exceeds n-1; clamped to " << M << '\n';
    const auto dec = graph_spectrum(g);
    const auto base = build_psi(dec, M);
    Rng rng(stream_seed(*opts.seed, 0x696e76ULL));
    std::bernoulli_distribution coin;

    Checks checks("invariance", diag);
    std::ostringstream table;
    CsvWriter csv(table);
    csv.field("transform").field("group_begin").field("group_end").field("multiplicity").field("trial")
        .field("entrywise_dev").field("group_sum_dev").end_row();

    for (std::size_t trial = 0; trial < opts.trials; ++trial) {
        std::vector<int> signs(dec.size());
        for (auto& s : signs) s = coin(rng) ? 1 : -1;
        const double dev = (build_psi(apply_sign_flips(dec, signs), M).values - base.values).cwiseAbs().maxCoeff();
        checks.require(dev == 0.0, "signflip", "sign flip changed Psi by " + format_real(dev));
        csv.field("signflip").field(0).field(0).field(0).field(static_cast<std::uint64_t>(trial)).field(dev)
            .field(0.0).end_row();
    }

    double worst_degenerate = 0;
    for (const auto& group : dec.groups) {
        if (group.begin == 0 || group.begin > M) continue;
        for (std::size_t trial = 0; trial < opts.trials; ++trial) {
            const auto Q = random_orthogonal(group.size(), rng);
            const auto rotated = apply_subspace_rotation(dec, group, Q);
            const double entrywise = (build_psi(rotated, M).values - base.values).cwiseAbs().maxCoeff();
            const auto b = static_cast<Eigen::Index>(group.begin);
            const auto s = static_cast<Eigen::Index>(group.size());
            const Eigen::VectorXd before = dec.eigenvectors.middleCols(b, s).rowwise().squaredNorm();
            const Eigen::VectorXd after = rotated.eigenvectors.middleCols(b, s).rowwise().squaredNorm();
            const double group_dev = (before - after).cwiseAbs().maxCoeff();
            const std::string where = "group [" + std::to_string(group.begin) + "," + std::to_string(group.end) + ")";
            checks.require(group_dev <= 1e-10, "group_sum", where + " group sum moved by " + format_real(group_dev));
            if (group.size() == 1)
                checks.require(entrywise <= 1e-10, "simple_rotation",
                               where + " entrywise change " + format_real(entrywise));
            else
                worst_degenerate = std::max(worst_degenerate, entrywise);
            csv.field("rotation").field(static_cast<std::uint64_t>(group.begin))
                .field(static_cast<std::uint64_t>(group.end)).field(static_cast<std::uint64_t>(group.size()))
                .field(static_cast<std::uint64_t>(trial)).field(entrywise).field(group_dev).end_row();
        }
    }
    write_file(opts.out, [&](std::ostream& out) { out << table.str(); });
    diag << "invariance: n=" << n << " M=" << M << " groups=" << dec.groups.size()
         << " degenerate_entrywise_max=" << format_real(worst_degenerate) << " -> " << opts.out << '\n';
    return checks.exit_code();
}

int cmd_injectivity(const InjectivityOptions& opts, std::ostream& diag) {
    KeyValueConfig kv = opts.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(opts.config);
    const InjectivityConfig config = injectivity_config(kv, opts.seed, opts.threads);
    if (!kv.issues().empty()) return report_issues("injectivity", kv, diag);
    const std::string sb_path = out_dir_file(opts.out, "smallball.csv");
    const std::string ms_path = out_dir_file(opts.out, "minsep.csv");

    std::vector<SmallBallEstimate> rows;
    for (std::size_t M : config.M_values) {
        const auto est = smallball_estimate(M, config.eps_values, config.pairs, config.seed, config.threads);
        rows.insert(rows.end(), est.begin(), est.end());
    }
    const auto summary =
        min_separation_scaling(config.n_values, config.C, config.trials, config.seed, config.threads);

    Checks checks("injectivity", diag);
    checks.require(summary.exact_collisions == 0, "collisions",
                   std::to_string(summary.exact_collisions) + " ensembles with an exact collision");
    for (const auto& s : summary.samples)
        checks.require(s.min_sep > 0, "min_sep", "zero separation at n=" + std::to_string(s.n));
    const std::size_t E = config.eps_values.size();
    for (std::size_t e = 0; e < E; ++e)
        for (std::size_t i = 0; i + 1 < config.M_values.size(); ++i) {
            const auto& lo = rows[i * E + e];
            const auto& hi = rows[(i + 1) * E + e];
            const double se = std::hypot(lo.std_error, hi.std_error);
            const std::string where = "eps=" + format_real(lo.eps) + " M=" + std::to_string(lo.M) + "->" +
                                      std::to_string(hi.M);
            checks.require(hi.collision_prob <= lo.collision_prob + 3 * se, "smallball_monotone",
                           where + " collision probability rose");
            const bool strict = lo.collision_prob - hi.collision_prob > 3 * se;
            diag << "injectivity: " << where << " p=" << format_real(lo.collision_prob) << "->"
                 << format_real(hi.collision_prob) << (strict ? " strict(3se)" : " not-strict(3se)") << '\n';
        }

    write_file(sb_path, [&](std::ostream& out) { write_smallball_csv(out, rows); });
    write_file(ms_path, [&](std::ostream& out) { write_min_separation_csv(out, summary.samples); });
    for (std::size_t i = 0; i < config.n_values.size(); ++i)
        diag << "injectivity: n=" << config.n_values[i] << " M=" << wave_dimension(config.n_values[i], config.C)
             << " median_min_sep=" << format_real(summary.median_by_n[i]) << '\n';
    diag << "injectivity: fitted_alpha=" << format_real(summary.fitted_alpha) << " -> " << sb_path << ", "
         << ms_path << '\n';
    return checks.exit_code();
}

}  // namespace nodeid::cli
