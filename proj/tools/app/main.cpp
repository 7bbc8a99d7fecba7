#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "qpspec/kam.hpp"

namespace {

enum Exit { ok = 0, failure = 1, config = 2, frequency = 3, inventory = 4, divergence = 5 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, gaps and KAM reducibility of quasi-periodic Schrodinger operators"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format;
  int threads = 0;
  long long seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--format", format, "Tabular output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--threads", threads, "Worker threads, 0 = auto")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Reserved; no numeric effect");

  const std::pair<const char*, const char*> commands[] = {
      {"ids", "Integrated density of states on the energy grid"},
      {"gaps", "Labelled gaps with Holder and separation report"},
      {"decay", "Gap length decay against eps^{1/4} |m|^{-k/9}"},
      {"homog", "Homogeneity profile of the spectrum"},
      {"rotation", "Rotation numbers on the energy grid"},
      {"kam", "Almost reducibility run and ledger"},
      {"edge", "Parabolic reduction and Moser-Poschel bound at a gap edge"},
      {"scan", "Spectrum as a union of intervals"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? ok : config;
  }

  qpcli::Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  inv.threads = threads;
  try {
    inv.config = qpcli::load_config(config_path);
    if (!out_dir.empty()) inv.config.out_dir = out_dir;
    if (!format.empty()) inv.config.format = format == "json" ? qpcli::Format::json : qpcli::Format::csv;
    return qpcli::run_command(inv);
  } catch (const qpcli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return config;
  } catch (const qps::FrequencyRejected& e) {
    std::cerr << "frequency rejected: " << e.what() << "\n";
    return frequency;
  } catch (const qpcli::InventoryError& e) {
    std::cerr << "input inventory: " << e.what() << "\n";
    return inventory;
  } catch (const qps::KamError& e) {
    std::cerr << "KAM failure: " << e.what() << "\n";
    return divergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
}
