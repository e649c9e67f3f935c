#include "spafac/report.hpp"

#include "spafac/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>

#include "spafac/io.hpp"

namespace spafac {

using nlohmann::json;

namespace {

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Spectrum spectrum_of(const Vector& delta, double total) {
  Spectrum s;
  s.delta = to_std(delta);
  for (double d : s.delta) {
    s.eigenvalues.push_back(d * d);
    s.percent_inertia.push_back(total > 0.0 ? 100.0 * d * d / total : 0.0);
  }
  return s;
}

json enc(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix dec_matrix(const json& j) {
  if (j.empty()) return Matrix(0, 0);
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    require(static_cast<Index>(row.size()) == cols, ErrorCode::ParseError, "ragged matrix in results document");
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json enc(const ScoreTable& t) { return {{"labels", t.labels}, {"values", enc(t.values)}}; }
ScoreTable dec_scores(const json& j) {
  return {j.at("labels").get<std::vector<std::string>>(), dec_matrix(j.at("values"))};
}

json enc(const Spectrum& s) {
  return {{"delta", s.delta}, {"eigenvalues", s.eigenvalues}, {"percent_inertia", s.percent_inertia}};
}
Spectrum dec_spectrum(const json& j) {
  return {j.at("delta").get<std::vector<double>>(), j.at("eigenvalues").get<std::vector<double>>(),
          j.at("percent_inertia").get<std::vector<double>>()};
}

json enc(const SparsityIndices& s) {
  return {{"rank", s.rank},
          {"zeros_rows", s.zeros_rows},
          {"zeros_cols", s.zeros_cols},
          {"zero_ratio_rows", s.zero_ratio_rows},
          {"zero_ratio_cols", s.zero_ratio_cols},
          {"zero_ratio", s.zero_ratio},
          {"fit", s.fit},
          {"index_rows", s.index_rows},
          {"index_cols", s.index_cols},
          {"index", s.index},
          {"zone", s.zone}};
}
SparsityIndices dec_indices(const json& j) {
  SparsityIndices s;
  s.rank = j.at("rank").get<Index>();
  s.zeros_rows = j.at("zeros_rows").get<Index>();
  s.zeros_cols = j.at("zeros_cols").get<Index>();
  s.zero_ratio_rows = j.at("zero_ratio_rows").get<double>();
  s.zero_ratio_cols = j.at("zero_ratio_cols").get<double>();
  s.zero_ratio = j.at("zero_ratio").get<double>();
  s.fit = j.at("fit").get<double>();
  s.index_rows = j.at("index_rows").get<double>();
  s.index_cols = j.at("index_cols").get<double>();
  s.index = j.at("index").get<double>();
  s.zone = j.at("zone").get<int>();
  return s;
}

const char* selector_name(IndexSelector s) {
  switch (s) {
    case IndexSelector::Rows: return "rows";
    case IndexSelector::Cols: return "cols";
    default: return "both";
  }
}
IndexSelector selector_from(const std::string& s) {
  if (s == "rows") return IndexSelector::Rows;
  if (s == "cols") return IndexSelector::Cols;
  require(s == "both", ErrorCode::ParseError, "unknown index selector '" + s + "'");
  return IndexSelector::Both;
}

json enc(const TuningGrid& g) {
  json cells = json::array();
  for (const auto& c : g.cells)
    cells.push_back({{"row_fraction", c.row_fraction},
                     {"col_fraction", c.col_fraction},
                     {"row_radius", c.row_radius},
                     {"col_radius", c.col_radius},
                     {"rank", c.rank},
                     {"ok", c.ok},
                     {"converged", c.converged},
                     {"error", c.error},
                     {"indices", enc(c.indices)}});
  return {{"selector", selector_name(g.selector)},
          {"best", g.best ? json(*g.best) : json(nullptr)},
          {"cells", std::move(cells)}};
}
TuningGrid dec_tuning(const json& j) {
  TuningGrid g;
  g.selector = selector_from(j.at("selector").get<std::string>());
  if (!j.at("best").is_null()) g.best = j.at("best").get<std::size_t>();
  for (const auto& c : j.at("cells")) {
    GridCell cell;
    cell.row_fraction = c.at("row_fraction").get<double>();
    cell.col_fraction = c.at("col_fraction").get<double>();
    cell.row_radius = c.at("row_radius").get<double>();
    cell.col_radius = c.at("col_radius").get<double>();
    cell.rank = c.at("rank").get<Index>();
    cell.ok = c.at("ok").get<bool>();
    cell.converged = c.at("converged").get<bool>();
    cell.error = c.at("error").get<std::string>();
    cell.indices = dec_indices(c.at("indices"));
    g.cells.push_back(std::move(cell));
  }
  return g;
}

json enc(const PropertyCheck& p) {
  return {{"name", p.name},         {"applicable", p.applicable}, {"expected", p.expected}, {"passed", p.passed},
          {"residual", p.residual}, {"tolerance", p.tolerance},   {"note", p.note}};
}
PropertyCheck dec_property(const json& j) {
  PropertyCheck p;
  p.name = j.at("name").get<std::string>();
  p.applicable = j.at("applicable").get<bool>();
  p.expected = j.at("expected").get<bool>();
  p.passed = j.at("passed").get<bool>();
  p.residual = j.at("residual").get<double>();
  p.tolerance = j.at("tolerance").get<double>();
  p.note = j.at("note").get<std::string>();
  return p;
}

json enc(const DimensionDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"als_converged", d.als_converged},
          {"projection_converged", d.pocs_converged},
          {"projection_steps", d.pocs_cycles},
          {"row_orthogonality", d.row_orthogonality},
          {"col_orthogonality", d.col_orthogonality},
          {"row_sparsity_excess", d.row_sparsity_excess},
          {"col_sparsity_excess", d.col_sparsity_excess},
          {"objective", d.objective}};
}
DimensionDiagnostics dec_diag(const json& j) {
  DimensionDiagnostics d;
  d.iterations = j.at("iterations").get<int>();
  d.als_converged = j.at("als_converged").get<bool>();
  d.pocs_converged = j.at("projection_converged").get<bool>();
  d.pocs_cycles = j.at("projection_steps").get<int>();
  d.row_orthogonality = j.at("row_orthogonality").get<double>();
  d.col_orthogonality = j.at("col_orthogonality").get<double>();
  d.row_sparsity_excess = j.at("row_sparsity_excess").get<double>();
  d.col_sparsity_excess = j.at("col_sparsity_excess").get<double>();
  d.objective = j.at("objective").get<std::vector<double>>();
  return d;
}

json enc(const Point2& p) { return json::array({p[0], p[1]}); }
Point2 dec_point(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json enc(const BootstrapResult& b) {
  json regions = json::array();
  for (const auto& r : b.regions) {
    json boundary = json::array();
    for (const auto& p : r.boundary) boundary.push_back(enc(p));
    regions.push_back({{"group", r.group},
                       {"size", r.size},
                       {"tiny", r.tiny},
                       {"center", enc(r.center)},
                       {"axis_major", enc(r.axis_major)},
                       {"axis_minor", enc(r.axis_minor)},
                       {"boundary", std::move(boundary)}});
  }
  return {{"dim_x", b.dim_x}, {"dim_y", b.dim_y}, {"regions", std::move(regions)}};
}
BootstrapResult dec_bootstrap(const json& j) {
  BootstrapResult b;
  b.dim_x = j.at("dim_x").get<Index>();
  b.dim_y = j.at("dim_y").get<Index>();
  for (const auto& r : j.at("regions")) {
    ConfidenceRegion c;
    c.group = r.at("group").get<std::string>();
    c.size = r.at("size").get<Index>();
    c.tiny = r.at("tiny").get<bool>();
    c.center = dec_point(r.at("center"));
    c.axis_major = dec_point(r.at("axis_major"));
    c.axis_minor = dec_point(r.at("axis_minor"));
    for (const auto& p : r.at("boundary")) c.boundary.push_back(dec_point(p));
    b.regions.push_back(std::move(c));
  }
  return b;
}

json enc(const ClassificationReport& c) {
  return {{"overall_accuracy", c.overall_accuracy},
          {"per_group_accuracy", c.per_group_accuracy},
          {"chance_level", c.chance_level},
          {"confusion", enc(c.confusion)},
          {"assigned", c.assigned}};
}
ClassificationReport dec_classification(const json& j) {
  ClassificationReport c;
  c.overall_accuracy = j.at("overall_accuracy").get<double>();
  c.per_group_accuracy = j.at("per_group_accuracy").get<std::vector<double>>();
  c.chance_level = j.at("chance_level").get<double>();
  c.confusion = dec_matrix(j.at("confusion"));
  c.assigned = j.at("assigned").get<std::vector<Index>>();
  return c;
}

template <class T, class F>
json opt(const std::optional<T>& v, F&& f) {
  return v ? f(*v) : json(nullptr);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

ResultBundle make_bundle(const CaModel& model) {
  ResultBundle b;
  b.method = to_string(model.method);
  b.rank = model.rank();
  b.sparse = model.is_sparse();
  b.converged = model.converged();
  b.total_inertia = model.total_inertia;
  b.spectrum = spectrum_of(model.delta, model.total_inertia);
  b.reference = spectrum_of(model.reference.delta.head(model.rank()), model.total_inertia);
  if (model.is_sparse()) {
    b.estimation_order = model.sparse->estimation_order;
    b.spectrum_estimation = spectrum_of(model.sparse->delta_hat_estimation(), model.total_inertia);
    b.diagnostics = model.sparse->diagnostics;
    SparsitySettings s;
    for (const auto& c : model.sparse->row_constraints) s.row_radii.push_back(c.radius);
    for (const auto& c : model.sparse->col_constraints) s.col_radii.push_back(c.radius);
    const auto& rc = model.sparse->row_constraints.front();
    const auto& cc = model.sparse->col_constraints.front();
    s.row_groups = rc.partition ? rc.partition->group_count() : model.r.size();
    s.col_groups = cc.partition ? cc.partition->group_count() : model.c.size();
    s.solver = model.sparse->solver == StepSolver::Exact ? "exact" : "pocs";
    b.sparsity = s;
  } else {
    for (Index k = 0; k < model.rank(); ++k) b.estimation_order.push_back(k);
    b.spectrum_estimation = b.spectrum;
  }
  b.F = {model.row_labels, model.F};
  b.G = {model.col_labels, model.G};
  b.row_contributions = {model.row_labels, model.row_contrib};
  b.col_contributions = {model.col_labels, model.col_contrib};
  b.properties = check_properties(model).checks;
  return b;
}

std::string to_json(const ResultBundle& b, int indent) {
  json diags = json::array();
  for (const auto& d : b.diagnostics) diags.push_back(enc(d));
  json props = json::array();
  for (const auto& p : b.properties) props.push_back(enc(p));
  json doc = {
      {"schema", b.schema},
      {"method", b.method},
      {"rank", b.rank},
      {"sparse", b.sparse},
      {"converged", b.converged},
      {"total_inertia", b.total_inertia},
      {"spectrum", enc(b.spectrum)},
      {"estimation_order", b.estimation_order},
      {"spectrum_estimation_order", enc(b.spectrum_estimation)},
      {"reference_spectrum", enc(b.reference)},
      {"row_scores", enc(b.F)},
      {"col_scores", enc(b.G)},
      {"row_contributions", enc(b.row_contributions)},
      {"col_contributions", enc(b.col_contributions)},
      {"sparsity", opt(b.sparsity,
                       [](const SparsitySettings& s) {
                         return json{{"row_radii", s.row_radii},
                                     {"col_radii", s.col_radii},
                                     {"row_groups", s.row_groups},
                                     {"col_groups", s.col_groups},
                                     {"solver", s.solver}};
                       })},
      {"indices", opt(b.indices, [](const SparsityIndices& s) { return enc(s); })},
      {"tuning", opt(b.tuning, [](const TuningGrid& g) { return enc(g); })},
      {"properties", std::move(props)},
      {"diagnostics", std::move(diags)},
      {"observations", opt(b.observations,
                           [](const ObservationScores& o) {
                             return json{{"labels", o.labels}, {"groups", o.groups}, {"scores", enc(o.scores)}};
                           })},
      {"classification", opt(b.classification, [](const ClassificationReport& c) { return enc(c); })},
      {"bootstrap", opt(b.bootstrap, [](const BootstrapResult& r) { return enc(r); })},
      {"notes", b.notes},
  };
  return doc.dump(indent) + "\n";
}

ResultBundle bundle_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("results document is not valid JSON: ") + e.what());
  }
  try {
    ResultBundle b;
    b.schema = doc.at("schema").get<std::string>();
    require(b.schema == kResultsSchema, ErrorCode::ParseError, "unsupported results schema '" + b.schema + "'");
    b.method = doc.at("method").get<std::string>();
    b.rank = doc.at("rank").get<Index>();
    b.sparse = doc.at("sparse").get<bool>();
    b.converged = doc.at("converged").get<bool>();
    b.total_inertia = doc.at("total_inertia").get<double>();
    b.spectrum = dec_spectrum(doc.at("spectrum"));
    b.estimation_order = doc.at("estimation_order").get<std::vector<Index>>();
    b.spectrum_estimation = dec_spectrum(doc.at("spectrum_estimation_order"));
    b.reference = dec_spectrum(doc.at("reference_spectrum"));
    b.F = dec_scores(doc.at("row_scores"));
    b.G = dec_scores(doc.at("col_scores"));
    b.row_contributions = dec_scores(doc.at("row_contributions"));
    b.col_contributions = dec_scores(doc.at("col_contributions"));
    if (const auto& s = doc.at("sparsity"); !s.is_null())
      b.sparsity = SparsitySettings{s.at("row_radii").get<std::vector<double>>(),
                                    s.at("col_radii").get<std::vector<double>>(), s.at("row_groups").get<Index>(),
                                    s.at("col_groups").get<Index>(), s.at("solver").get<std::string>()};
    if (const auto& s = doc.at("indices"); !s.is_null()) b.indices = dec_indices(s);
    if (const auto& s = doc.at("tuning"); !s.is_null()) b.tuning = dec_tuning(s);
    for (const auto& p : doc.at("properties")) b.properties.push_back(dec_property(p));
    for (const auto& d : doc.at("diagnostics")) b.diagnostics.push_back(dec_diag(d));
    if (const auto& o = doc.at("observations"); !o.is_null())
      b.observations = ObservationScores{o.at("labels").get<std::vector<std::string>>(),
                                         o.at("groups").get<std::vector<std::string>>(), dec_matrix(o.at("scores"))};
    if (const auto& c = doc.at("classification"); !c.is_null()) b.classification = dec_classification(c);
    if (const auto& r = doc.at("bootstrap"); !r.is_null()) b.bootstrap = dec_bootstrap(r);
    b.notes = doc.at("notes").get<std::vector<std::string>>();
    return b;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("malformed results document: ") + e.what());
  }
}

std::string scores_csv(const ScoreTable& t) {
  std::vector<std::string> head{"label"};
  for (Index l = 0; l < t.values.cols(); ++l) head.push_back("dim" + std::to_string(l + 1));
  std::string out = csv_line(head);
  for (Index i = 0; i < t.values.rows(); ++i) {
    std::vector<std::string> row{t.labels[static_cast<std::size_t>(i)]};
    for (Index l = 0; l < t.values.cols(); ++l) row.push_back(format_double(t.values(i, l)));
    out += csv_line(row);
  }
  return out;
}

std::string contributions_csv(const ResultBundle& b) {
  std::vector<std::string> head{"side", "label"};
  for (Index l = 0; l < b.rank; ++l) head.push_back("dim" + std::to_string(l + 1));
  std::string out = csv_line(head);
  auto emit = [&](const char* side, const ScoreTable& t) {
    for (Index i = 0; i < t.values.rows(); ++i) {
      std::vector<std::string> row{side, t.labels[static_cast<std::size_t>(i)]};
      for (Index l = 0; l < t.values.cols(); ++l) row.push_back(format_double(t.values(i, l)));
      out += csv_line(row);
    }
  };
  emit("row", b.row_contributions);
  emit("col", b.col_contributions);
  return out;
}

std::string tuning_csv(const TuningGrid& grid) {
  std::string out = csv_line({"row_fraction", "col_fraction", "row_radius", "col_radius", "rank", "ok", "converged",
                              "zero_ratio_rows", "zero_ratio_cols", "zero_ratio", "fit", "index_rows", "index_cols",
                              "index", "zone", "best", "error"});
  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const auto& c = grid.cells[k];
    const auto& s = c.indices;
    out += csv_line({format_double(c.row_fraction), format_double(c.col_fraction), format_double(c.row_radius),
                     format_double(c.col_radius), std::to_string(c.rank), c.ok ? "1" : "0", c.converged ? "1" : "0",
                     format_double(s.zero_ratio_rows), format_double(s.zero_ratio_cols), format_double(s.zero_ratio),
                     format_double(s.fit), format_double(s.index_rows), format_double(s.index_cols),
                     format_double(s.index), std::to_string(s.zone), grid.best && *grid.best == k ? "1" : "0",
                     c.error});
  }
  return out;
}

}  // namespace spafac
