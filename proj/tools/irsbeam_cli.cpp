// irsbeam: sizing tables and figure-level sweeps for the IRS scattering-
// cluster channel simulator.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "irsbeam/scenario.hpp"
#include "irsbeam/sweep.hpp"

namespace {

int cmd_table1(const std::string& csv_path) {
    std::vector<irsbeam::Table1Cell> cells = irsbeam::run_table1();
    std::printf("%-18s %-10s %-12s %-16s %-16s\n", "IRS position (wl)", "IRS size",
                "span-based", "far-field-based", "main-lobe-based");
    for (const irsbeam::Table1Cell& c : cells) {
        char pos[32];
        std::snprintf(pos, sizeof(pos), "(%g, %g)", c.irs_center.x, c.irs_center.y);
        std::printf("%-18s %-10d %-12d %-16d %-16d\n", pos, c.irs_size, c.span_based, c.far_field,
                    c.main_lobe);
    }
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out) {
            std::cerr << "error: cannot write " << csv_path << "\n";
            return 1;
        }
        irsbeam::write_table1_csv(out, cells);
        std::cout << "wrote " << csv_path << "\n";
    }
    return 0;
}

int cmd_sweep(const std::string& kind_str, const std::string& scenario_path,
              const std::string& out_path, const std::string& grid_str) {
    irsbeam::SweepKind kind = irsbeam::parse_sweep_kind(kind_str);
    irsbeam::Scenario sc = irsbeam::load_scenario(scenario_path);
    irsbeam::GridSpec grid = grid_str.empty() ? irsbeam::default_grid(kind) : irsbeam::parse_grid(grid_str);
    std::vector<irsbeam::SweepResult> rows = irsbeam::run_sweep(kind, sc, grid);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    irsbeam::write_sweep_csv(out, rows);
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    irsbeam::Scenario sc = irsbeam::load_scenario(scenario_path);
    std::cout << scenario_path << ": ok (" << sc.frequency_ghz << " GHz, tx " << sc.tx.n_elements
              << " elements, rx " << sc.rx.n_elements << " elements";
    if (sc.irs) std::cout << ", irs " << sc.irs->n_elements << " elements";
    std::cout << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"IRS beam-space channel experiments"};
    app.require_subcommand(1);

    std::string table1_csv;
    CLI::App* table1 = app.add_subcommand("table1", "active-element counts of the sizing schemes");
    table1->add_option("--csv", table1_csv, "also write the table as CSV");

    std::string kind, scenario_path, out_path, grid_str;
    CLI::App* sweep = app.add_subcommand("sweep", "run a figure-level sweep and write CSV");
    sweep->add_option("--kind", kind, "pathgain|convergence|rxcompare|throughput|coverage")->required();
    sweep->add_option("--scenario", scenario_path, "scenario file")->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();
    sweep->add_option("--grid", grid_str, "grid spec: a,b,c | lin:lo:hi:n | log:lo:hi:n | grid:x0:x1:nx:y0:y1:ny");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("--scenario", validate_path, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (table1->parsed()) return cmd_table1(table1_csv);
        if (sweep->parsed()) return cmd_sweep(kind, scenario_path, out_path, grid_str);
        if (validate->parsed()) return cmd_validate(validate_path);
    } catch (const irsbeam::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
