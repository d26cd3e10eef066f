// wiretap: secrecy-capacity solver CLI for the peak-amplitude-constrained
// Gaussian wiretap channel.
//
// Exit codes: 0 ok, 1 usage/missing file, 2 data or numerical failure,
// 3 non-convergence (report still written), 4 KKT-invalid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wiretap/io.hpp"
#include "wiretap/solver.hpp"
#include "wiretap/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wiretap;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_no_convergence = 3;
constexpr int exit_kkt_invalid = 4;

struct CliOptions {
    double sigma1 = 1.0;
    double sigma2 = 0.0;
    double amplitude = 0.0;
    double a_from = 0.0, a_to = 0.0, a_step = 0.0;
    std::string config_path;
    std::string out_dir = ".";
    std::string in_dir;
    std::string pmf_path;
    double epsilon = -1.0;  // <0 means "not set on the command line"
};

SolverConfig load_config(const CliOptions& opt) {
    SolverConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in)
            throw std::invalid_argument("cannot open config file " + opt.config_path);
        json j = json::parse(in);
        if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
        if (j.contains("n_ba")) cfg.ascent.n_ba = j["n_ba"].get<int>();
        if (j.contains("n_ga")) cfg.ascent.n_ga = j["n_ga"].get<int>();
        if (j.contains("backtrack_alpha")) cfg.ascent.backtrack_alpha = j["backtrack_alpha"].get<double>();
        if (j.contains("backtrack_beta")) cfg.ascent.backtrack_beta = j["backtrack_beta"].get<double>();
        if (j.contains("initial_step")) cfg.ascent.initial_step = j["initial_step"].get<double>();
        if (j.contains("min_dist")) cfg.policy.min_dist = j["min_dist"].get<double>();
        if (j.contains("delta")) cfg.policy.delta = j["delta"].get<double>();
        if (j.contains("inner_loops")) cfg.inner_loops = j["inner_loops"].get<int>();
        if (j.contains("outer_max")) cfg.outer_max = j["outer_max"].get<int>();
        if (j.contains("grid_step")) cfg.grid_step = j["grid_step"].get<double>();
        if (j.contains("panels")) cfg.panels = j["panels"].get<int>();
        if (j.contains("order")) cfg.order = j["order"].get<int>();
        if (j.contains("early_exit")) cfg.early_exit = j["early_exit"].get<bool>();
        if (j.contains("prune")) cfg.prune = j["prune"].get<bool>();
        if (j.contains("prune_rounds")) cfg.prune_rounds = j["prune_rounds"].get<int>();
    }
    if (opt.epsilon > 0.0)
        cfg.epsilon = opt.epsilon;  // command line wins over the file
    return cfg;
}

std::string pdf_grid_csv(const SolveReport& rep, const ChannelPair& ch) {
    const double a = rep.input.amplitude;
    const double span = a + 5.0 * ch.sigma2;
    const int half_n = 2000;  // 4001-point symmetric grid including y = 0
    const OutputMixture m1 = output_mixture(rep.input, ch.sigma1);
    const OutputMixture m2 = output_mixture(rep.input, ch.sigma2);
    const double match_sigma = std::sqrt(rep.input_variance + ch.sigma2 * ch.sigma2);
    std::ostringstream out;
    out << "y,pdf_legitimate,pdf_eavesdropper,pdf_gaussian_match\n";
    for (int i = -half_n; i <= half_n; ++i) {
        // exact sign symmetry of the grid keeps the evenness check tight
        const double y = span * std::abs(i) / half_n * (i < 0 ? -1.0 : 1.0);
        out << fmt_num(y) << ',' << fmt_num(std::exp(log_output_pdf(m1, y))) << ','
            << fmt_num(std::exp(log_output_pdf(m2, y))) << ','
            << fmt_num(std::exp(log_gaussian_pdf(y, 0.0, match_sigma))) << '\n';
    }
    return out.str();
}

void write_solution_files(const fs::path& dir, const SolveReport& rep, const ChannelPair& ch) {
    fs::create_directories(dir);
    write_file(dir / "solution.json", report_to_json(rep, ch).dump(2) + "\n");

    std::ostringstream prof;
    prof << "x,xi_nats\n";
    for (const auto& [x, v] : rep.kkt.profile)
        prof << fmt_num(x) << ',' << fmt_num(v) << '\n';
    write_file(dir / "xi_profile.csv", prof.str());

    std::ostringstream pmf;
    pmf << "x,probability\n";
    for (const auto& [x, p] : full_pmf(rep.input))
        pmf << fmt_num(x) << ',' << fmt_num(p) << '\n';
    write_file(dir / "input_pmf.csv", pmf.str());

    write_file(dir / "output_pdf.csv", pdf_grid_csv(rep, ch));
}

int cmd_solve(const CliOptions& opt) {
    const ChannelPair ch(opt.sigma1, opt.sigma2);
    const SolverConfig cfg = load_config(opt);
    const SolveReport rep = solve(ch, opt.amplitude, cfg);
    write_solution_files(opt.out_dir, rep, ch);
    std::cerr << "solve: A=" << opt.amplitude << " capacity=" << fmt_num(rep.capacity)
              << " nats, support=" << rep.full_support_size
              << (rep.converged ? "" : " (NOT CONVERGED)") << "\n";
    return rep.converged ? exit_ok : exit_no_convergence;
}

int cmd_sweep(const CliOptions& opt) {
    const ChannelPair ch(opt.sigma1, opt.sigma2);
    const SolverConfig cfg = load_config(opt);
    if (!(opt.a_step > 0.0) || !(opt.a_to >= opt.a_from) || !(opt.a_from > 0.0))
        throw std::invalid_argument("sweep requires 0 < a-from <= a-to and a-step > 0");
    std::vector<double> a_values;
    for (int i = 0;; ++i) {
        const double a = opt.a_from + i * opt.a_step;
        if (a > opt.a_to + 1e-12)
            break;
        a_values.push_back(a);
    }
    const std::vector<SolveReport> reports = sweep(ch, a_values, cfg);

    fs::create_directories(opt.out_dir);
    std::ostringstream sw, sup, gaps;
    sw << "A,capacity_nats,mi_legit,mi_eve,gaussian_mi_eve,support_size,card_lower_bound,"
          "converged,near_transition\n";
    sup << "A,half_point,weight\n";
    gaps << "A,gap_rank,gap_value\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const SolveReport& r = reports[i];
        all_converged = all_converged && r.converged;
        sw << fmt_num(a_values[i]) << ',' << fmt_num(r.capacity) << ',' << fmt_num(r.mi_legit)
           << ',' << fmt_num(r.mi_eve) << ',' << fmt_num(r.gaussian_mi_eve) << ','
           << r.full_support_size << ',' << fmt_num(r.card_lower_bound) << ','
           << (r.converged ? 1 : 0) << ',' << (r.near_transition ? 1 : 0) << '\n';
        for (std::size_t k = 0; k < r.input.half_size(); ++k)
            sup << fmt_num(a_values[i]) << ',' << fmt_num(r.input.half_points[k]) << ','
                << fmt_num(r.input.half_weights[k]) << '\n';
        const auto& xs = r.input.half_points;
        for (std::size_t k = xs.size(); k-- > 1;)
            gaps << fmt_num(a_values[i]) << ',' << (xs.size() - 1 - k) << ','
                 << fmt_num(xs[k] - xs[k - 1]) << '\n';
        std::cerr << "sweep: A=" << fmt_num(a_values[i]) << " capacity=" << fmt_num(r.capacity)
                  << " support=" << r.full_support_size
                  << (r.converged ? "" : " (NOT CONVERGED)") << "\n";
    }
    write_file(fs::path(opt.out_dir) / "sweep.csv", sw.str());
    write_file(fs::path(opt.out_dir) / "support.csv", sup.str());
    write_file(fs::path(opt.out_dir) / "gaps.csv", gaps.str());
    return all_converged ? exit_ok : exit_no_convergence;
}

int cmd_kkt_check(const CliOptions& opt) {
    const ChannelPair ch(opt.sigma1, opt.sigma2);
    const SolverConfig cfg = load_config(opt);
    const CsvTable t = read_csv(opt.pmf_path);
    const int cx = t.column("x"), cp = t.column("probability");
    std::vector<std::pair<double, double>> pmf;
    for (const auto& row : t.rows)
        pmf.emplace_back(row[cx], row[cp]);
    const SymmetricInput input = fold_pmf(pmf);  // throws invalid_argument on bad data
    const double grid_step = cfg.grid_step_for(ch, input.amplitude);
    const KktReport rep =
        validate(input, ch, cfg.epsilon, grid_step, cfg.panels, cfg.order);
    fs::create_directories(opt.out_dir);
    write_file(fs::path(opt.out_dir) / "kkt.json", kkt_to_json(rep).dump(2) + "\n");
    std::cerr << "kkt-check: " << (rep.valid ? "valid" : "invalid")
              << " at epsilon=" << fmt_num(cfg.epsilon)
              << ", candidate_x=" << fmt_num(rep.candidate_x) << "\n";
    return rep.valid ? exit_ok : exit_kkt_invalid;
}

std::vector<std::pair<double, double>> csv_xy(const CsvTable& t, const std::string& xcol,
                                              const std::string& ycol) {
    std::vector<std::pair<double, double>> pts;
    const int cx = t.column(xcol), cy = t.column(ycol);
    for (const auto& row : t.rows)
        pts.emplace_back(row[cx], row[cy]);
    return pts;
}

int cmd_plot(const CliOptions& opt) {
    const fs::path in_dir = opt.in_dir.empty() ? opt.out_dir : opt.in_dir;
    const fs::path out_dir = opt.out_dir;
    fs::create_directories(out_dir);
    bool produced = false;

    const fs::path sweep_csv = in_dir / "sweep.csv";
    if (fs::exists(sweep_csv)) {
        const CsvTable sw = read_csv(sweep_csv);
        if (sw.rows.empty()) {
            std::cerr << "plot: " << sweep_csv.string() << " has no data rows\n";
            return exit_usage;
        }
        SvgPlot cap("Secrecy capacity vs A", "A", "C_s (nats)");
        cap.add_line(csv_xy(sw, "A", "capacity_nats"), "blue", "C_s");
        write_file(out_dir / "capacity.svg", cap.render());

        SvgPlot mi("Eavesdropper mutual information vs A", "A", "I (nats)");
        mi.add_line(csv_xy(sw, "A", "mi_eve"), "red", "I(X*;Y2*)");
        mi.add_line(csv_xy(sw, "A", "gaussian_mi_eve"), "gray", "Gaussian input");
        write_file(out_dir / "mutual_information.svg", mi.render());

        SvgPlot sz("Support cardinality vs A", "A", "|supp|");
        sz.add_line(csv_xy(sw, "A", "support_size"), "blue", "|supp|");
        sz.add_line(csv_xy(sw, "A", "card_lower_bound"), "gray", "lower bound");
        write_file(out_dir / "support_size.svg", sz.render());

        const CsvTable sup = read_csv(in_dir / "support.csv");
        SvgPlot pts("Nonnegative support points vs A", "A", "x");
        pts.add_scatter(csv_xy(sup, "A", "half_point"), "blue");
        write_file(out_dir / "support_points.svg", pts.render());

        std::vector<std::pair<double, double>> norm;
        for (const auto& [a, x] : csv_xy(sup, "A", "half_point"))
            norm.emplace_back(a, x / a);
        SvgPlot npts("Normalized support points vs A", "A", "x / A");
        npts.add_scatter(norm, "blue");
        write_file(out_dir / "support_normalized.svg", npts.render());

        const CsvTable gp = read_csv(in_dir / "gaps.csv");
        SvgPlot gaps("Adjacent support gaps vs A", "A", "gap");
        gaps.add_scatter(csv_xy(gp, "A", "gap_value"), "blue");
        write_file(out_dir / "gaps.svg", gaps.render());
        produced = true;
    }

    const fs::path pdf_csv = in_dir / "output_pdf.csv";
    if (fs::exists(pdf_csv)) {
        const fs::path sol_path = in_dir / "solution.json";
        if (!fs::exists(sol_path)) {
            std::cerr << "plot: missing " << sol_path.string() << "\n";
            return exit_usage;
        }
        std::ifstream sol_in(sol_path);
        const json sol = json::parse(sol_in);
        const double a = sol["amplitude"].get<double>();
        const double sigma2 = sol["sigma2"].get<double>();

        const CsvTable pdf = read_csv(pdf_csv);
        const CsvTable pmf = read_csv(in_dir / "input_pmf.csv");
        SvgPlot ov("Output densities and input pmf", "y", "density / probability");
        ov.set_x_range(-a - 3.0 * sigma2, a + 3.0 * sigma2);
        ov.add_line(csv_xy(pdf, "y", "pdf_legitimate"), "blue", "P_Y1*");
        ov.add_line(csv_xy(pdf, "y", "pdf_eavesdropper"), "red", "P_Y2*");
        ov.add_line(csv_xy(pdf, "y", "pdf_gaussian_match"), "gray", "matched Gaussian");
        ov.add_stems(csv_xy(pmf, "x", "probability"), "black", "P_X*");
        write_file(out_dir / "output_overlay.svg", ov.render());
        produced = true;
    }

    if (!produced) {
        std::cerr << "plot: no input data found; expected " << sweep_csv.string() << " or "
                  << pdf_csv.string() << "\n";
        return exit_usage;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secrecy-capacity solver for the peak-amplitude-constrained "
                 "Gaussian wiretap channel"};
    app.require_subcommand(1);
    CliOptions opt;

    auto add_channel = [&](CLI::App* cmd) {
        cmd->add_option("--sigma1", opt.sigma1, "Legitimate-channel noise std dev")->required();
        cmd->add_option("--sigma2", opt.sigma2, "Eavesdropper-channel noise std dev")->required();
        cmd->add_option("--epsilon", opt.epsilon, "KKT tolerance (nats)");
        cmd->add_option("--config", opt.config_path, "Flat JSON solver config");
    };

    CLI::App* s = app.add_subcommand("solve", "Solve one amplitude");
    add_channel(s);
    s->add_option("-A,--amplitude", opt.amplitude, "Peak amplitude")->required();
    s->add_option("-o,--output", opt.out_dir, "Output directory");

    CLI::App* w = app.add_subcommand("sweep", "Warm-started amplitude sweep");
    add_channel(w);
    w->add_option("--a-from", opt.a_from, "First amplitude")->required();
    w->add_option("--a-to", opt.a_to, "Last amplitude")->required();
    w->add_option("--a-step", opt.a_step, "Amplitude step")->required();
    w->add_option("-o,--output", opt.out_dir, "Output directory");

    CLI::App* k = app.add_subcommand("kkt-check", "Validate a pmf file against the KKT tests");
    add_channel(k);
    k->add_option("--pmf", opt.pmf_path, "input_pmf.csv-format file")->required();
    k->add_option("-o,--output", opt.out_dir, "Output directory");

    CLI::App* p = app.add_subcommand("plot", "Render SVG figures from prior CSV outputs");
    p->add_option("-i,--input", opt.in_dir, "Directory with CSV outputs")->required();
    p->add_option("-o,--output", opt.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : exit_usage;
    }

    try {
        if (s->parsed())
            return cmd_solve(opt);
        if (w->parsed())
            return cmd_sweep(opt);
        if (k->parsed())
            return cmd_kkt_check(opt);
        return cmd_plot(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_data;
    }
}
