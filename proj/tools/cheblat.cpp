#include "cheblat/bench.hpp"
#include "cheblat/calculus.hpp"
#include "cheblat/io.hpp"
#include "cheblat/lattice.hpp"
#include "cheblat/transform.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using namespace cheblat;

namespace {

// Bad flag values or combinations detected after parsing; exit status 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const std::vector<std::string> kFamilyNames = {"cartesian", "padua", "hex", "bcc", "fcc", "oct7"};

struct LatticeArgs {
    std::string family;
    int dim = 0;
    int resolution = 1;

    void add_to(CLI::App* app) {
        app->add_option("-f,--family", family, "Lattice family")->required()->check(CLI::IsMember(kFamilyNames));
        app->add_option("-d,--dim", dim, "Dimension (defaults to the family's natural dimension)")
            ->check(CLI::Range(2, 3));
        app->add_option("-r,--resolution", resolution, "Resolution parameter")->check(CLI::PositiveNumber);
    }

    int resolved_dim() const {
        const Family f = family_from_string(family);
        const int natural = (f == Family::BCC || f == Family::FCC) ? 3 : 2;
        const int d = dim == 0 ? natural : dim;
        if (f != Family::Cartesian && d != natural) {
            throw UsageError("--dim " + std::to_string(d) + " is not available for --family " + family +
                             " (use " + std::to_string(natural) + ")");
        }
        return d;
    }

    std::shared_ptr<const TransformPlan> plan() const {
        return std::make_shared<const TransformPlan>(build(family_from_string(family), resolved_dim(), resolution));
    }
};

std::string read_text(const std::string& path, const std::string& flag) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw UsageError(flag + ": cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(path, content);
    }
}

template <class Reader>
auto parse_file(const std::string& path, const std::string& flag, Reader reader) {
    std::istringstream in(read_text(path, flag));
    try {
        return reader(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(flag + " '" + path + "': " + e.what());
    }
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
    // "1,2,5" or "a:b" (inclusive range)
    std::vector<int> out;
    try {
        const auto colon = text.find(':');
        if (colon != std::string::npos) {
            const int a = std::stoi(text.substr(0, colon)), b = std::stoi(text.substr(colon + 1));
            if (a > b) throw UsageError(flag + ": empty range '" + text + "'");
            for (int v = a; v <= b; ++v) out.push_back(v);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        }
    } catch (const std::logic_error&) {
        throw UsageError(flag + ": cannot parse '" + text + "' as an integer list");
    }
    if (out.empty()) throw UsageError(flag + ": list is empty");
    for (int v : out)
        if (v < 1) throw UsageError(flag + ": values must be positive");
    return out;
}

std::string f17(double v) { return format_double(v); }

struct BenchArgs {
    std::string families = "cartesian";
    int dim = 2;
    std::string resolutions = "1:6";
    int trials = 10;
    std::uint64_t seed = 1;
    std::string function = "gaussian";
    double sharpness = 1.0;
    std::vector<double> center;
    std::size_t samples = 20000;
    std::string metric = "mc";
    std::string gl_orders;
    std::string output = "-";
    std::string svg;

    void add_to(CLI::App* app, bool quad) {
        app->add_option("--families", families, "Comma-separated lattice families")->capture_default_str();
        app->add_option("-d,--dim", dim, "Dimension")->check(CLI::Range(2, 3))->capture_default_str();
        app->add_option("--resolutions", resolutions, "Resolution sweep, 'a:b' or comma list")->capture_default_str();
        app->add_option("--trials", trials, "Rotations per resolution")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--seed", seed, "RNG seed")->capture_default_str();
        app->add_option("--function", function, "Test function")
            ->check(CLI::IsMember({"gaussian", "runge", "essential", "constant"}))
            ->capture_default_str();
        app->add_option("--sharpness", sharpness, "Test function sharpness w")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--center", center, "Test function center (dim values)")->expected(2, 3);
        if (quad) {
            app->add_option("--gl-orders", gl_orders, "Gauss-Legendre comparator orders (default: matched to the first family)");
        } else {
            app->add_option("--samples", samples, "Monte-Carlo points or grid size")->check(CLI::PositiveNumber)->capture_default_str();
            app->add_option("--metric", metric, "Error metric")->check(CLI::IsMember({"mc", "grid"}))->capture_default_str();
        }
        app->add_option("-o,--output", output, "ErrorRecord CSV path ('-' for stdout)")->capture_default_str();
        app->add_option("--svg", svg, "Also write an SVG chart here");
    }

    ExperimentConfig config() const {
        ExperimentConfig c;
        std::stringstream ss(families);
        std::string name;
        while (std::getline(ss, name, ',')) {
            try {
                c.families.push_back(family_from_string(name));
            } catch (const std::invalid_argument&) {
                throw UsageError("--families: unknown family '" + name + "'");
            }
        }
        if (c.families.empty()) throw UsageError("--families: list is empty");
        c.dim = dim;
        for (auto f : c.families) {
            const int natural = (f == Family::BCC || f == Family::FCC) ? 3 : 2;
            if (f != Family::Cartesian && natural != dim)
                throw UsageError("--families: " + std::string(to_string(f)) + " is not available with --dim " +
                                 std::to_string(dim));
        }
        c.resolutions = parse_int_list(resolutions, "--resolutions");
        c.trials = trials;
        c.seed = seed;
        c.kind = test_kind_from_string(function);
        c.sharpness = sharpness;
        if (!center.empty()) {
            if (static_cast<int>(center.size()) != dim) throw UsageError("--center needs exactly --dim values");
            c.center = {};
            for (int a = 0; a < dim; ++a) c.center[a] = center[a];
        }
        c.samples = samples;
        c.metric = metric == "grid" ? ErrorMetric::L2Grid : ErrorMetric::L2MonteCarlo;
        if (!gl_orders.empty()) c.gauss_legendre_orders = parse_int_list(gl_orders, "--gl-orders");
        return c;
    }

    void write(const std::vector<ErrorRecord>& recs) const {
        std::ostringstream csv;
        write_error_csv(csv, recs);
        emit(output, csv.str());
        if (!svg.empty()) {
            std::ostringstream s;
            write_error_svg(s, recs);
            write_file_atomic(svg, s.str());
        }
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev interpolation, differentiation and integration on non-tensor lattices"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    LatticeArgs info_args, points_args, tr_args, eval_args, diff_args, int_args, leb_args;
    std::string format = "text";

    auto* info = app.add_subcommand("info", "Point count, Euclidean degree and efficiencies of a lattice");
    info_args.add_to(info);
    info->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    std::string points_out = "-", points_format = "csv";
    auto* points = app.add_subcommand("points", "Write the lattice points (CSV) or the full descriptor (JSON)");
    points_args.add_to(points);
    points->add_option("-o,--output", points_out, "Output path ('-' for stdout)")->capture_default_str();
    points->add_option("--format", points_format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    std::string tr_in, tr_out = "-", tr_format = "csv";
    bool tr_inverse = false;
    auto* transform = app.add_subcommand("transform", "Samples CSV to coefficient CSV (or back with --inverse)");
    tr_args.add_to(transform);
    transform->add_option("-i,--input", tr_in, "Sample CSV (coefficient CSV with --inverse); '-' for stdin")->required();
    transform->add_option("-o,--output", tr_out, "Output path ('-' for stdout)")->capture_default_str();
    transform->add_flag("--inverse", tr_inverse, "Coefficients to values at the lattice points");
    transform->add_option("--format", tr_format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();

    std::string eval_coeffs, eval_at, eval_out = "-";
    auto* eval = app.add_subcommand("eval", "Evaluate an interpolant at arbitrary points");
    eval_args.add_to(eval);
    eval->add_option("-c,--coeffs", eval_coeffs, "Coefficient CSV")->required();
    eval->add_option("--at", eval_at, "Point CSV with columns x1..xd")->required();
    eval->add_option("-o,--output", eval_out, "Output path ('-' for stdout)")->capture_default_str();

    std::string diff_in, diff_out = "-";
    int diff_axis = 0;
    bool diff_samples = false;
    auto* diff = app.add_subcommand("diff", "Differentiate an interpolant along one axis");
    diff_args.add_to(diff);
    diff->add_option("-i,--input", diff_in, "Coefficient CSV (sample CSV with --from-samples)")->required();
    diff->add_option("-a,--axis", diff_axis, "Axis, 0-based")->check(CLI::Range(0, 2))->capture_default_str();
    diff->add_flag("--from-samples", diff_samples, "Input holds samples at the lattice points");
    diff->add_option("-o,--output", diff_out, "Coefficient CSV output ('-' for stdout)")->capture_default_str();

    std::string int_in, int_weights;
    auto* integ = app.add_subcommand("integrate", "Integrate sampled data over [-1,1]^d with the lattice stencil");
    int_args.add_to(integ);
    integ->add_option("-i,--input", int_in, "Sample CSV");
    integ->add_option("--weights", int_weights, "Write the stencil (x1..xd,weight) here");

    BenchArgs bi_args, bq_args;
    auto* bench_interp = app.add_subcommand("bench-interp", "Rotation-averaged L2 interpolation error sweep");
    bi_args.add_to(bench_interp, false);
    auto* bench_quad = app.add_subcommand("bench-quad", "Rotation-averaged relative integration error sweep");
    bq_args.add_to(bench_quad, true);

    int leb_density = 0;
    auto* leb = app.add_subcommand("lebesgue", "Estimate the Lebesgue constant on a probe grid");
    leb_args.add_to(leb);
    leb->add_option("--density", leb_density, "Probe points per axis (0 = automatic)")->check(CLI::NonNegativeNumber)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*info) {
            auto plan = info_args.plan();
            const auto& lat = plan->lattice();
            double be = 0;
            for (int a = 0; a < lat.dim(); ++a) be = std::max(be, boundary_efficiency(lat, a));
            const double deg = euclidean_degree(lat), eff = efficiency(lat), deff = discrete_efficiency(lat);
            std::ostringstream os;
            if (format == "json") {
                os << "{\"family\":\"" << to_string(lat.family()) << "\",\"dim\":" << lat.dim()
                   << ",\"resolution\":" << lat.resolution() << ",\"npoints\":" << lat.size()
                   << ",\"sublattices\":" << lat.sublattices().size() << ",\"euclidean_degree\":" << f17(deg)
                   << ",\"efficiency\":" << f17(eff) << ",\"discrete_efficiency\":" << f17(deff)
                   << ",\"boundary_efficiency\":" << f17(be) << "}\n";
            } else {
                os << "family              " << to_string(lat.family()) << '\n'
                   << "dim                 " << lat.dim() << '\n'
                   << "resolution          " << lat.resolution() << '\n'
                   << "npoints             " << lat.size() << '\n'
                   << "sublattices         " << lat.sublattices().size() << '\n'
                   << "euclidean_degree    " << f17(deg) << '\n'
                   << "efficiency          " << f17(eff) << '\n'
                   << "discrete_efficiency " << f17(deff) << '\n'
                   << "boundary_efficiency " << f17(be) << '\n';
            }
            emit("-", os.str());
        } else if (*points) {
            auto lat = build(family_from_string(points_args.family), points_args.resolved_dim(), points_args.resolution);
            std::ostringstream os;
            if (points_format == "json") {
                write_lattice_json(os, lat);
            } else {
                write_points_csv(os, lat);
            }
            emit(points_out, os.str());
        } else if (*transform) {
            auto plan = tr_args.plan();
            const auto& lat = plan->lattice();
            std::ostringstream os;
            if (tr_inverse) {
                const auto c = parse_file(tr_in, "--input", [&](std::istream& in) { return read_coeffs_csv(in, lat); });
                const auto v = plan->inverse(c);
                if (tr_format == "json") {
                    throw UsageError("--format json is only available for forward transforms");
                }
                write_samples_csv(os, lat, v);
            } else {
                const auto s = parse_file(tr_in, "--input", [&](std::istream& in) { return read_samples_csv(in, lat); });
                const auto c = plan->has_padua_path() ? plan->forward_padua(s) : plan->forward(s);
                if (tr_format == "json") {
                    write_lattice_json(os, lat, c);
                } else {
                    write_coeffs_csv(os, lat, c);
                }
            }
            emit(tr_out, os.str());
        } else if (*eval) {
            auto plan = eval_args.plan();
            const auto& lat = plan->lattice();
            Interpolant p(plan, parse_file(eval_coeffs, "--coeffs", [&](std::istream& in) { return read_coeffs_csv(in, lat); }));
            const auto rows = parse_file(eval_at, "--at", [](std::istream& in) { return read_csv_rows(in); });
            const int d = lat.dim();
            std::ostringstream os;
            for (int a = 0; a < d; ++a) os << 'x' << (a + 1) << ',';
            os << "value\n";
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (static_cast<int>(rows[r].size()) != d)
                    throw UsageError("--at: row " + std::to_string(r + 1) + " needs " + std::to_string(d) + " columns");
                for (int a = 0; a < d; ++a) os << f17(rows[r][a]) << ',';
                os << f17(evaluate(p, rows[r])) << '\n';
            }
            emit(eval_out, os.str());
        } else if (*diff) {
            auto plan = diff_args.plan();
            const auto& lat = plan->lattice();
            if (diff_axis >= lat.dim()) throw UsageError("--axis must be below the lattice dimension");
            std::vector<double> c;
            if (diff_samples) {
                c = plan->forward(parse_file(diff_in, "--input", [&](std::istream& in) { return read_samples_csv(in, lat); }));
            } else {
                c = parse_file(diff_in, "--input", [&](std::istream& in) { return read_coeffs_csv(in, lat); });
            }
            const auto dp = differentiate(Interpolant(plan, std::move(c)), diff_axis);
            std::ostringstream os;
            write_coeffs_csv(os, lat, dp.coeffs());
            emit(diff_out, os.str());
        } else if (*integ) {
            if (int_in.empty() && int_weights.empty()) throw UsageError("integrate needs --input, --weights or both");
            auto plan = int_args.plan();
            const auto& lat = plan->lattice();
            const auto st = quadrature_stencil(*plan);
            if (!int_weights.empty()) {
                std::ostringstream os;
                write_samples_csv(os, lat, st.weights, "weight");
                write_file_atomic(int_weights, os.str());
            }
            if (!int_in.empty()) {
                const auto s = parse_file(int_in, "--input", [&](std::istream& in) { return read_samples_csv(in, lat); });
                emit("-", f17(integrate(st, s)) + "\n");
            }
        } else if (*bench_interp) {
            bi_args.write(run_interp_convergence(bi_args.config()));
        } else if (*bench_quad) {
            bq_args.write(run_quad_convergence(bq_args.config()));
        } else if (*leb) {
            auto plan = leb_args.plan();
            emit("-", f17(lebesgue_estimate(*plan, leb_density)) + "\n");
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
