// spafac: sparse correspondence analysis from the command line.
#include "spafac/error.hpp"
#include "spafac/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

namespace {

struct Flags {
  std::string input;
  std::string groups;
  std::vector<std::string> variables;
  double sparsity_rows = 0.0;
  double sparsity_cols = 0.0;
  long rank = 2;
  bool tune = false;
  std::vector<double> row_grid;
  std::vector<double> col_grid;
  long min_rank = 2;
  long max_rank = 3;
  std::string index = "both";
  double epsilon = 1e-9;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  std::string priority = "sparsity-last";
  std::string solver = "exact";
  bool drop_empty = false;
  bool svg = false;
  int bootstrap = 0;
  double confidence = 0.95;
  std::string regions = "ellipse";
  int bin_numeric = 0;
  unsigned threads = 1;
  std::string out;
  bool quiet = false;
};

void add_options(CLI::App* cmd, Flags& f) {
  cmd->configurable();
  cmd->add_option("--input", f.input, "Input CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--groups", f.groups, "Column holding the group of each observation");
  cmd->add_option("--variables", f.variables, "Categorical columns to code (default: all)")->delimiter(',');
  cmd->add_option("--sparsity-rows", f.sparsity_rows, "Row radius as a fraction of sqrt(row groups)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--sparsity-cols", f.sparsity_cols, "Column radius as a fraction of sqrt(column groups)")
      ->check(CLI::Range(0.0, 1.0));
  auto* rank = cmd->add_option("--rank", f.rank, "Number of dimensions")->check(CLI::PositiveNumber);
  auto* tune = cmd->add_flag("--tune", f.tune, "Grid search over radii and rank");
  rank->excludes(tune);
  cmd->add_option("--row-grid", f.row_grid, "Row fractions to search (default 0.1..1.0)")->delimiter(',');
  cmd->add_option("--col-grid", f.col_grid, "Column fractions to search (default 0.1..1.0)")->delimiter(',');
  cmd->add_option("--min-rank", f.min_rank, "Smallest rank eligible as the tuned solution")->capture_default_str();
  cmd->add_option("--max-rank", f.max_rank, "Largest rank searched")->capture_default_str();
  cmd->add_option("--index", f.index, "Index maximized when tuning")
      ->check(CLI::IsMember({"both", "rows", "cols"}))
      ->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Convergence tolerance")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration limit per dimension")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for the bootstrap")->capture_default_str();
  cmd->add_option("--priority", f.priority, "Projection applied last in the alternating projections")
      ->check(CLI::IsMember({"sparsity-last", "orthogonality-last"}))
      ->capture_default_str();
  cmd->add_option("--solver", f.solver, "Constrained step solver")
      ->check(CLI::IsMember({"exact", "pocs"}))
      ->capture_default_str();
  cmd->add_flag("--drop-empty", f.drop_empty, "Remove all-zero rows and columns");
  cmd->add_flag("--svg", f.svg, "Write scree, zone and factor maps");
  cmd->add_option("--bootstrap", f.bootstrap, "Bootstrap replicates for group regions (0: off)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--confidence", f.confidence, "Confidence level of the regions")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--regions", f.regions, "Region construction")->check(CLI::IsMember({"ellipse", "hull"}));
  cmd->add_option("--bin-numeric", f.bin_numeric, "Quantile bins for numeric variables (0: off)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--threads", f.threads, "Worker threads for tuning and bootstrap")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_flag("--quiet", f.quiet, "Only report errors");
}

spafac::RunConfig to_config(const std::string& method, const Flags& f, const CLI::App& cmd) {
  spafac::RunConfig c;
  c.method = spafac::method_from_string(method);
  c.input = f.input;
  if (cmd.count("--groups")) c.group_column = f.groups;
  c.variables = f.variables;
  if (cmd.count("--sparsity-rows")) c.sparsity_rows = f.sparsity_rows;
  if (cmd.count("--sparsity-cols")) c.sparsity_cols = f.sparsity_cols;
  c.rank = f.rank;
  c.tune = f.tune;
  c.row_fractions = f.row_grid;
  c.col_fractions = f.col_grid;
  c.min_rank = f.min_rank;
  c.max_rank = f.max_rank;
  c.selector = f.index == "rows" ? spafac::IndexSelector::Rows
               : f.index == "cols" ? spafac::IndexSelector::Cols
                                   : spafac::IndexSelector::Both;
  c.epsilon = f.epsilon;
  c.max_iter = f.max_iter;
  c.seed = f.seed;
  c.priority = f.priority == "orthogonality-last" ? spafac::Priority::OrthogonalityLast : spafac::Priority::SparsityLast;
  c.solver = f.solver == "pocs" ? spafac::StepSolver::Pocs : spafac::StepSolver::Exact;
  c.drop_empty = f.drop_empty;
  c.svg = f.svg;
  c.bootstrap = f.bootstrap;
  c.confidence = f.confidence;
  c.region = f.regions == "hull" ? spafac::RegionMethod::HullPeeling : spafac::RegionMethod::PercentileEllipse;
  c.bin_numeric = f.bin_numeric;
  c.threads = f.threads;
  c.out = f.out;
  return c;
}

void summarize(const spafac::ResultBundle& b, std::ostream& os) {
  os << b.method << (b.sparse ? " (sparse)" : "") << ", " << b.rank << " dimension(s), total inertia "
     << b.total_inertia << "\n";
  for (std::size_t k = 0; k < b.spectrum.delta.size(); ++k)
    os << "  dim " << k + 1 << ": eigenvalue " << b.spectrum.eigenvalues[k] << " (" << b.spectrum.percent_inertia[k]
       << "%)\n";
  if (b.indices)
    os << "  zero ratio " << b.indices->zero_ratio << ", fit " << b.indices->fit << ", sparsity index "
       << b.indices->index << ", zone " << b.indices->zone << "\n";
  if (b.classification)
    os << "  classification accuracy " << b.classification->overall_accuracy << " (chance "
       << b.classification->chance_level << ")\n";
  for (const auto& n : b.notes) os << "  note: " << n << "\n";
  if (!b.converged) os << "  warning: some dimensions did not converge\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse correspondence analysis: CA, MCA, DiSCA and DiMCA with group-sparse constraints"};
  app.set_config("--config", "", "TOML configuration file");
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> methods{{"ca", "Correspondence analysis of a contingency table"},
                                                   {"mca", "Multiple correspondence analysis of categorical data"},
                                                   {"disca", "Discriminant correspondence analysis"},
                                                   {"dimca", "Discriminant multiple correspondence analysis"}};
  std::map<std::string, CLI::App*> cmds;
  for (const auto& [name, help] : methods) {
    cmds[name] = app.add_subcommand(name, help);
    add_options(cmds[name], flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(spafac::ErrorClass::Usage);
  }

  for (const auto& [name, cmd] : cmds) {
    if (!cmd->parsed()) continue;
    try {
      const spafac::RunOutcome out = spafac::run(to_config(name, flags, *cmd));
      if (!flags.quiet) {
        summarize(out.bundle, std::cout);
        std::cout << "wrote " << out.files.size() << " file(s) to " << flags.out << "\n";
      }
      return out.exit_code;
    } catch (const spafac::Error& e) {
      std::cerr << "spafac: " << spafac::to_string(e.code()) << ": " << e.what() << "\n";
      return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
      std::cerr << "spafac: " << e.what() << "\n";
      return static_cast<int>(spafac::ErrorClass::Usage);
    }
  }
  return static_cast<int>(spafac::ErrorClass::Usage);
}
