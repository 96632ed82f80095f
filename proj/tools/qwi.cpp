// qwi: energy sweeps and self-checks for profile documents.
//
//   qwi sweep <file> [--out csv|plot] [--strict]
//   qwi verify <file>
//   qwi profiles list
//   qwi profiles show <name>
//
// Exit status: 0 ok, 1 failed check or strict-mode failure, 2 usage or input error.
// QWI_THREADS sets the number of worker threads.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qwi/io.hpp"

namespace {

constexpr int exit_usage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

qwi::ProfileDocument load(const std::string& path) { return qwi::parse_profile(read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum wave impedance: transmission spectra of 1D piecewise potentials"};
    app.require_subcommand(1);

    std::string file;
    std::string out = "csv";
    bool strict = false;
    auto* sweep = app.add_subcommand("sweep", "Write T(E), R(E) and Z_in(E) for a profile document");
    sweep->add_option("file", file, "Profile document (JSON)")->required();
    sweep->add_option("--out", out, "Output format")->check(CLI::IsMember({"csv", "plot"}));
    sweep->add_flag("--strict", strict, "Exit 1 if any energy fails");

    auto* verify = app.add_subcommand("verify", "Check the chain against the Riccati and staircase references");
    verify->add_option("file", file, "Profile document (JSON)")->required();

    std::string name;
    auto* profiles = app.add_subcommand("profiles", "Built-in profiles");
    profiles->require_subcommand(1);
    auto* list = profiles->add_subcommand("list", "List built-in profiles");
    auto* show = profiles->add_subcommand("show", "Print a built-in profile as a document");
    show->add_option("name", name, "Built-in profile name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*sweep) {
            const qwi::ProfileDocument doc = load(file);
            qwi::SweepOptions opt;
            opt.format = out == "plot" ? qwi::OutputFormat::plot : qwi::OutputFormat::csv;
            opt.strict = strict;
            return qwi::run_sweep(doc, std::cout, opt, &std::cerr);
        }
        if (*verify) {
            const qwi::VerifyReport rep = qwi::verify_document(load(file));
            qwi::print_report(rep, std::cout);
            return rep.passed() ? 0 : 1;
        }
        if (*list) {
            for (const auto& b : qwi::builtin_profiles()) {
                char line[160];
                std::snprintf(line, sizeof line, "%-32s %s\n", b.name.c_str(), b.description.c_str());
                std::cout << line;
            }
            return 0;
        }
        if (*show) {
            std::cout << qwi::serialize_profile(qwi::builtin_document(qwi::builtin_profile(name)));
            return 0;
        }
    } catch (const qwi::ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return exit_usage;
    } catch (const qwi::ValidationError& e) {
        std::cerr << file << ": invalid document\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
        return exit_usage;
    } catch (const qwi::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
