#include "spafac/pipeline.hpp"

#include "spafac/error.hpp"
#include "spafac/evaluation.hpp"
#include "spafac/svg.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace spafac {

Method method_from_string(const std::string& name) {
  if (name == "ca") return Method::CA;
  if (name == "mca") return Method::MCA;
  if (name == "disca") return Method::DiSCA;
  if (name == "dimca") return Method::DiMCA;
  fail(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

namespace {

void bin_numeric_columns(CsvTable& csv, const RunConfig& cfg) {
  for (std::size_t j = 1; j < csv.header.size(); ++j) {
    if (cfg.group_column && csv.header[j] == *cfg.group_column) continue;
    std::vector<std::string> cells;
    for (const auto& row : csv.rows) cells.push_back(row[j]);
    if (!numeric_column(cells)) continue;
    std::vector<double> values;
    for (const auto& c : cells) values.push_back(std::stod(c));
    const auto binned = bin_numeric(values, BinSpec{cfg.bin_numeric, {}});
    for (std::size_t i = 0; i < csv.rows.size(); ++i) csv.rows[i][j] = binned.values[i];
  }
}

struct Prepared {
  CaInput input;
  Matrix observations;  // discriminant methods: rows projected as supplementary
  std::vector<std::string> observation_labels;
  std::optional<GroupDesign> groups;
  std::vector<std::string> notes;
};

Prepared prepare(const RunConfig& cfg) {
  const bool disc = is_discriminant(cfg.method);
  require(!disc || cfg.group_column.has_value(), ErrorCode::InvalidArgument,
          std::string(to_string(cfg.method)) + " needs a group column (--groups)");
  require(disc || !cfg.group_column.has_value(), ErrorCode::InvalidArgument,
          "--groups only applies to discriminant methods");
  CsvTable csv = read_csv(cfg.input);
  IngestOptions opts;
  opts.drop_empty = cfg.drop_empty;
  opts.group_column = cfg.group_column;
  opts.variables = cfg.variables;

  Prepared p;
  if (!is_multiple(cfg.method)) {
    CountData data = ingest_contingency(csv, opts);
    for (const auto& r : data.dropped_rows) p.notes.push_back("dropped empty row '" + r + "'");
    for (const auto& c : data.dropped_cols) p.notes.push_back("dropped empty column '" + c + "'");
    if (disc) {
      p.groups = GroupDesign::from_labels(data.groups);
      p.input = preprocess_disca(data.table, *p.groups);
      p.observations = data.table.counts;
      p.observation_labels = data.table.row_labels;
    } else {
      p.input = preprocess_ca(data.table);
    }
  } else {
    if (cfg.bin_numeric > 0) bin_numeric_columns(csv, cfg);
    CategoricalData data = ingest_categorical(csv, opts);
    if (disc) {
      p.groups = GroupDesign::from_labels(data.groups);
      p.input = preprocess_dimca(data.table, *p.groups);
      p.observations = data.table.indicator;
      p.observation_labels = data.table.row_labels;
    } else {
      p.input = preprocess_mca(data.table);
    }
  }
  return p;
}

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Index col_group_count(const CaInput& in) {
  return is_multiple(in.method) ? static_cast<Index>(in.variable_spans.size()) : in.c.size();
}

FitOptions fit_options(const RunConfig& cfg, const CaInput& in, Index rank, std::optional<double> fr,
                       std::optional<double> fc) {
  FitOptions o;
  o.rank = rank;
  o.epsilon = cfg.epsilon;
  o.max_iter = cfg.max_iter;
  if (fr || fc) {
    SparsityOptions s;
    s.row_radii = {radius_from_fraction(fr.value_or(1.0), in.r.size())};
    s.col_radii = {radius_from_fraction(fc.value_or(1.0), col_group_count(in))};
    s.solver = cfg.solver;
    s.priority = cfg.priority;
    o.sparsity = s;
  }
  return o;
}

}  // namespace

RunOutcome compute(const RunConfig& cfg) {
  require(cfg.epsilon > 0.0 && cfg.max_iter >= 1, ErrorCode::InvalidArgument, "epsilon and max-iter must be positive");
  for (const auto& f : {cfg.sparsity_rows, cfg.sparsity_cols})
    require(!f || (*f > 0.0 && *f <= 1.0), ErrorCode::InvalidArgument, "sparsity fractions must lie in (0, 1]");
  Prepared prep = prepare(cfg);
  const CaInput& in = prep.input;

  std::optional<TuningGrid> grid;
  Index rank = cfg.rank;
  std::optional<double> fr = cfg.sparsity_rows;
  std::optional<double> fc = cfg.sparsity_cols;
  if (cfg.tune) {
    require(cfg.min_rank >= 1 && cfg.max_rank >= cfg.min_rank, ErrorCode::InvalidArgument,
            "tuning ranks need 1 <= min-rank <= max-rank");
    GridSpec spec;
    spec.row_fractions = cfg.row_fractions.empty() ? GridSpec::default_fractions() : cfg.row_fractions;
    spec.col_fractions = cfg.col_fractions.empty() ? GridSpec::default_fractions() : cfg.col_fractions;
    for (Index k = cfg.min_rank; k <= cfg.max_rank; ++k) spec.ranks.push_back(k);
    spec.min_rank = cfg.min_rank;
    spec.selector = cfg.selector;
    spec.solver = cfg.solver;
    spec.priority = cfg.priority;
    spec.epsilon = cfg.epsilon;
    spec.max_iter = cfg.max_iter;
    spec.threads = cfg.threads;
    grid = grid_search(in, spec);
    const GridCell* best = grid->best_cell();
    require(best != nullptr, ErrorCode::NonConvergence, "no grid cell produced a converged solution");
    rank = best->rank;
    fr = best->row_fraction;
    fc = best->col_fraction;
  }

  const CaModel model = fit(in, fit_options(cfg, in, rank, fr, fc));
  ResultBundle bundle = make_bundle(model);
  bundle.notes = prep.notes;
  bundle.tuning = grid;
  if (model.is_sparse()) bundle.indices = sparsity_indices(*model.sparse, model.reference, model.rank());

  if (prep.groups) {
    ObservationScores obs;
    obs.labels = prep.observation_labels;
    for (Index g : prep.groups->assignment) obs.groups.push_back(prep.groups->group_labels[static_cast<std::size_t>(g)]);
    obs.scores = supplementary_rows(model, prep.observations);
    bundle.classification = classify_nearest(obs.scores, model.F, prep.groups->assignment);
    if (cfg.bootstrap > 0) {
      if (model.rank() >= 2) {
        BootstrapSpec bs;
        bs.replicates = cfg.bootstrap;
        bs.confidence = cfg.confidence;
        bs.seed = cfg.seed;
        bs.method = cfg.region;
        bs.threads = cfg.threads;
        BootstrapResult br = bootstrap_group_means_from_scores(obs.scores, *prep.groups, bs);
        br.replicate_means.clear();
        for (const auto& r : br.regions)
          if (r.tiny) bundle.notes.push_back("group '" + r.group + "' has fewer than 3 observations");
        bundle.bootstrap = std::move(br);
      } else {
        bundle.notes.push_back("bootstrap skipped: it needs at least two dimensions");
      }
    }
    bundle.observations = std::move(obs);
  }

  RunOutcome out;
  out.files = render_outputs(bundle, cfg.svg);
  out.bundle = std::move(bundle);
  out.exit_code = out.bundle.converged ? 0 : static_cast<int>(ErrorClass::NonConvergence);
  return out;
}

std::map<std::string, std::string> render_outputs(const ResultBundle& b, bool svg) {
  std::map<std::string, std::string> files;
  files["results.json"] = to_json(b);
  files["F.csv"] = scores_csv(b.F);
  files["G.csv"] = scores_csv(b.G);
  files["contributions.csv"] = contributions_csv(b);
  if (b.tuning) files["tuning.csv"] = tuning_csv(*b.tuning);
  if (b.observations) {
    const auto& o = *b.observations;
    std::vector<std::string> head{"label", "group"};
    for (Index l = 0; l < o.scores.cols(); ++l) head.push_back("dim" + std::to_string(l + 1));
    std::string csv = csv_line(head);
    for (std::size_t i = 0; i < o.labels.size(); ++i) {
      std::vector<std::string> row{o.labels[i], o.groups[i]};
      for (Index l = 0; l < o.scores.cols(); ++l) row.push_back(shortest(o.scores(static_cast<Index>(i), l)));
      csv += csv_line(row);
    }
    files["observations.csv"] = csv;
  }
  if (svg) {
    files["scree.svg"] = scree_svg(b);
    if (b.tuning) files["zones.svg"] = zone_map_svg(*b.tuning);
    for (Index d = 0; d + 1 < b.rank; ++d)
      files["factor_map_" + std::to_string(d + 1) + "_" + std::to_string(d + 2) + ".svg"] = factor_map_svg(b, d, d + 1);
  }
  return files;
}

void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::InvalidArgument, "cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, content] : files) {
    std::ofstream f(dir / name, std::ios::binary);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write " + (dir / name).string());
    f << content;
  }
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out = compute(cfg);
  write_outputs(cfg.out, out.files);
  return out;
}

}  // namespace spafac
