// SPDX-License-Identifier: Apache-2.0
//
// opgen: generate, inspect and verify synthetic elliptic-PDE datasets.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opgen/dataset.hpp"
#include "opgen/verifier.hpp"

namespace {

int fail(std::string_view category, const std::string& message, int code = 1) {
    std::cerr << "error[" << category << "]: " << message << "\n";
    return code;
}

int run_inspect(const std::string& manifest_path) {
    const opgen::DatasetReader reader(manifest_path);
    const auto& m = reader.manifest();
    nlohmann::json out = nlohmann::json::parse(m.to_json());
    if (reader.size() > 0) {
        const auto first = reader.read(0);
        double fmax = 0.0, umax = 0.0;
        for (double v : first.f) fmax = std::max(fmax, std::abs(v));
        for (double v : first.u) umax = std::max(umax, std::abs(v));
        out["first_record"] = {{"truncation", first.truncation}, {"max_abs_f", fmax}, {"max_abs_u", umax}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver-free synthetic data for elliptic operator learning"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("generate", "Generate a dataset of (f, u) pairs");
    std::string op_name = "poisson";
    std::string bc_name = "dirichlet";
    std::uint64_t n = 1000;
    std::size_t res = 64;
    int m_min = 1;
    int m_max = 20;
    std::uint64_t seed = 0;
    int precision = 32;
    std::string out_dir;
    unsigned workers = 0;
    bool npy = false;
    gen->add_option("--op", op_name, "Operator")
        ->check(CLI::IsMember({"poisson", "divform-fixed", "divform-param", "semilinear"}));
    gen->add_option("--bc", bc_name, "Boundary condition")->check(CLI::IsMember({"dirichlet", "neumann"}));
    gen->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
    gen->add_option("--res", res, "Grid points per side (boundary included)")->check(CLI::Range(3, 1 << 15));
    gen->add_option("--m-min", m_min, "Smallest truncation order")->check(CLI::PositiveNumber);
    gen->add_option("--m-max", m_max, "Largest truncation order")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Master seed");
    gen->add_option("--precision", precision, "Stored float width")->check(CLI::IsMember({32, 64}));
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_option("--workers", workers, "Worker threads (0 = all cores)");
    gen->add_flag("--npy", npy, "Also write .npy copies of every array");

    auto* insp = app.add_subcommand("inspect", "Validate a manifest and summarize its dataset");
    std::string inspect_path;
    insp->add_option("manifest", inspect_path, "Path to manifest.json")->required();

    auto* ver = app.add_subcommand("verify", "Finite-difference and DST checks of a dataset");
    std::string verify_path;
    std::string report_path;
    bool refine = false;
    ver->add_option("manifest", verify_path, "Path to manifest.json")->required();
    ver->add_flag("--refine", refine, "Also evaluate at 2S-1 and estimate the convergence order");
    ver->add_option("--report", report_path, "Write the JSON report here instead of stdout");
    ver->add_option("--workers", workers, "Worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail("usage", e.what(), 2);
    }

    try {
        if (*gen) {
            opgen::GenerateOptions opts;
            opts.spec = {opgen::parse_boundary_condition(bc_name), m_min, m_max, seed};
            opts.family = opgen::parse_operator_family(op_name);
            opts.grid = opgen::Grid(res, true);
            opts.n_samples = n;
            opts.precision = opgen::precision_from_bits(precision);
            opts.out_dir = out_dir;
            opts.workers = workers;
            opts.write_npy = npy;
            const auto manifest = opgen::generate_dataset(opts);
            std::cout << "wrote " << manifest.n_samples << " samples to " << out_dir << "\n";
            return 0;
        }
        if (*insp) return run_inspect(inspect_path);
        if (*ver) {
            const opgen::DatasetReader reader(verify_path);
            const auto summary = opgen::verify::verify_dataset(reader, refine, workers);
            const std::string text = opgen::verify::summary_to_json(summary, reader.manifest(), refine);
            if (report_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(report_path);
                out << text;
                if (!out) return fail("io", "cannot write report " + report_path);
            }
            if (summary.failed > 0) {
                return fail("verification-failed", std::to_string(summary.failed) + " of " +
                                                       std::to_string(summary.reports.size()) + " records failed");
            }
            return 0;
        }
    } catch (const opgen::DatasetError& e) {
        return fail(e.category(), e.what());
    } catch (const std::invalid_argument& e) {
        return fail("invalid-argument", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
    return 0;
}
