#include "ewl/serialize.hpp"

#include <sstream>

#include "json.hpp"

#include "ewl/errors.hpp"

namespace ewl {

using nlohmann::json;

namespace {

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad field '") + key + "': " + e.what());
  }
}

json grid_json(const GridSpec& s) {
  std::vector<double> origin = s.origin;
  if (origin.empty()) origin.assign(static_cast<std::size_t>(s.dimension), 0.0);
  return {{"dimension", s.dimension}, {"depth", s.depth}, {"root", {{"origin", origin}, {"side", s.side}}}};
}

GridSpec grid_of(const json& j) {
  GridSpec s;
  s.dimension = field<int>(j, "dimension");
  s.depth = field<int>(j, "depth");
  if (j.contains("root")) {
    const json& root = j.at("root");
    if (root.contains("origin")) s.origin = field<std::vector<double>>(root, "origin");
    if (root.contains("side")) s.side = field<double>(root, "side");
  }
  return s;
}

json address(const Grid& g, Node e) {
  if (g.is_cube(e)) {
    const DyadicCube q = g.cube_of(e);
    return {{"scale", q.scale}, {"index", q.index}};
  }
  const WilsonRectangle w = g.wilson_of(e);
  return {{"scale", w.base.scale}, {"index", w.base.index}, {"wilson", w.wilson_index}};
}

json witness(const Grid& g, const Witnessed& w) {
  return {{"value", w.value}, {"first", g.describe(w.first)}, {"second", g.describe(w.second)}};
}

json bound_json(const Bound& b) {
  return {{"name", b.name}, {"lhs", b.lhs}, {"rhs", b.rhs}, {"ok", b.ok}};
}

json partition_json(const Partition& p) {
  return {{"name", p.name}, {"lhs", p.lhs}, {"rhs", p.rhs}, {"tolerance", p.tolerance}, {"ok", p.ok}};
}

json report_json(const TestingReport& r) {
  return {{"radius", r.radius},       {"norm", r.norm},           {"c1", r.c1},
          {"c2", r.c2},               {"c3", r.c3},               {"c3_wide", r.c3_wide},
          {"c1_global", r.c1_global}, {"c2_global", r.c2_global}, {"c1_cube", r.c1_cube},
          {"c2_cube", r.c2_cube},     {"c3_cube", r.c3_cube},     {"ratio_sum", r.ratio_sum},
          {"ratio_max", r.ratio_max}};
}

json split_json(const Grid& g, const BSplit& s) {
  json members = json::array();
  for (Node m : s.stopping_members) members.push_back(address(g, m));
  json per = json::array();
  for (const StoppingTerm& t : s.per_stopping) {
    per.push_back({{"s", address(g, t.s)}, {"b_s", t.b_s}, {"i_s", t.i_s}, {"ii_s", t.ii_s}});
  }
  return {{"b", s.b},
          {"b1", s.b1},
          {"b2", s.b2},
          {"b2_collapsed", s.b2_collapsed},
          {"packing",
           {{"child_ratio", s.packing.child_ratio},
            {"carleson_ratio", s.packing.carleson_ratio},
            {"stopping_ok", s.packing.stopping_ok},
            {"ok", s.packing.ok}}},
          {"embedding",
           {{"ratio_signed", s.embedding.ratio_signed},
            {"ratio_abs", s.embedding.ratio_abs},
            {"threshold", s.embedding.threshold},
            {"ok", s.embedding.ok}}},
          {"stopping_family", members},
          {"per_stopping", per}};
}

}  // namespace

std::string to_json(const GridSpec& spec) { return grid_json(spec).dump(); }

GridSpec grid_from_json(std::string_view text) { return grid_of(parse(text)); }

std::string to_json(const LeafMeasure& mu) {
  json j = grid_json(mu.grid().spec());
  j["masses"] = mu.lexicographic();
  return j.dump();
}

LeafMeasure measure_from_json(std::string_view text) {
  const json j = parse(text);
  const auto masses = field<std::vector<double>>(j, "masses");
  Grid g(grid_of(j));
  if (masses.size() != g.leaf_count()) throw ConfigError("mass count does not match the grid");
  return LeafMeasure::from_lexicographic(g, masses);
}

std::string to_json(const LeafFunction& f) {
  json j = grid_json(f.grid().spec());
  j["values"] = f.lexicographic();
  return j.dump();
}

LeafFunction function_from_json(std::string_view text) {
  const json j = parse(text);
  const auto values = field<std::vector<double>>(j, "values");
  Grid g(grid_of(j));
  if (values.size() != g.leaf_count()) throw ConfigError("value count does not match the grid");
  return LeafFunction::from_lexicographic(g, values);
}

std::string to_json(const DyadicOperator& t) {
  const Grid& g = t.grid();
  const std::size_t n = g.leaf_count();
  json j;
  j["family"] = std::string(to_string(t.family()));
  j["grid"] = grid_json(g.spec());
  j["sigma"] = t.sigma().lexicographic();
  j["omega"] = t.omega().lexicographic();
  j["claimed_radius"] = t.claimed_radius() ? json(*t.claimed_radius()) : json(nullptr);
  j["seed"] = t.seed() ? json(*t.seed()) : json(nullptr);
  j["root_level"] = t.root_level();
  if (t.coefficients()) {
    const auto& raw = t.coefficients()->raw();
    j["coefficients"] = std::vector<double>(raw.begin() + 1, raw.end());
  }
  std::vector<double> matrix(n * n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto tx = static_cast<Eigen::Index>(g.lex_to_tree(x));
    for (std::size_t y = 0; y < n; ++y) {
      matrix[x * n + y] = t.kernel()(tx, static_cast<Eigen::Index>(g.lex_to_tree(y)));
    }
  }
  j["matrix"] = std::move(matrix);
  return j.dump();
}

DyadicOperator operator_from_json(std::string_view text) {
  const json j = parse(text);
  if (!j.contains("grid")) throw ConfigError("missing field 'grid'");
  Grid g(grid_of(j.at("grid")));
  const std::size_t n = g.leaf_count();
  if (n > kDenseLeafCap) throw SizeError("operator grid exceeds the dense leaf cap");
  const auto sigma = field<std::vector<double>>(j, "sigma");
  const auto omega = field<std::vector<double>>(j, "omega");
  const auto matrix = field<std::vector<double>>(j, "matrix");
  if (sigma.size() != n || omega.size() != n) throw ConfigError("measure size does not match the grid");
  if (matrix.size() != n * n) throw ConfigError("matrix size does not match the grid");
  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    const auto tx = static_cast<Eigen::Index>(g.lex_to_tree(x));
    for (std::size_t y = 0; y < n; ++y) k(tx, static_cast<Eigen::Index>(g.lex_to_tree(y))) = matrix[x * n + y];
  }
  const Family fam = family_from_string(field<std::string>(j, "family"));
  std::optional<int> claimed;
  if (j.contains("claimed_radius") && !j.at("claimed_radius").is_null()) claimed = field<int>(j, "claimed_radius");
  DyadicOperator t(LeafMeasure::from_lexicographic(g, sigma), LeafMeasure::from_lexicographic(g, omega),
                   std::move(k), fam, claimed);
  if (j.contains("seed") && !j.at("seed").is_null()) t.with_seed(field<std::uint64_t>(j, "seed"));
  if (j.contains("root_level")) t.with_root_level(field<int>(j, "root_level"));
  if (j.contains("coefficients")) {
    const auto c = field<std::vector<double>>(j, "coefficients");
    if (c.size() != n - 1) throw ConfigError("coefficient count does not match the grid");
    CoefficientSequence b(g);
    for (std::size_t i = 0; i < c.size(); ++i) b[Node{static_cast<std::uint32_t>(i + 1)}] = c[i];
    t.with_coefficients(std::move(b));
  }
  return t;
}

std::string kernel_csv(const DyadicOperator& t) {
  const Grid& g = t.grid();
  const std::size_t n = g.leaf_count();
  std::ostringstream os;
  os.precision(17);
  os << "x_index,y_index,value\n";
  for (std::size_t x = 0; x < n; ++x) {
    const auto tx = static_cast<Eigen::Index>(g.lex_to_tree(x));
    for (std::size_t y = 0; y < n; ++y) {
      os << x << ',' << y << ',' << t.kernel()(tx, static_cast<Eigen::Index>(g.lex_to_tree(y))) << '\n';
    }
  }
  return os.str();
}

std::string to_json(const TestingReport& rep) { return report_json(rep).dump(); }

std::string to_json(const BilinearCertificate& cert, const Grid& grid) {
  json partitions = json::array();
  for (const Partition& p : cert.partitions) partitions.push_back(partition_json(p));
  json bounds = json::array();
  for (const Bound& b : cert.bounds) bounds.push_back(bound_json(b));
  const BoundConstants& k = cert.constants;
  json j;
  j["radius"] = cert.radius;
  j["report"] = report_json(cert.report);
  j["witnesses"] = {{"c1", witness(grid, cert.report.w1)},
                    {"c2", witness(grid, cert.report.w2)},
                    {"c3", witness(grid, cert.report.w3)}};
  j["norm_f"] = cert.norm_f;
  j["norm_g"] = cert.norm_g;
  j["terms"] = {{"pi", cert.pi_total},
                {"pi_mean_zero", cert.abc.pi},
                {"boundary", {cert.boundary.term1, cert.boundary.term2, cert.boundary.term3}},
                {"a", cert.a_term},
                {"b", cert.b_term},
                {"c", cert.c_term},
                {"b1", cert.b1_term},
                {"b2", cert.b2_term},
                {"worst_excluded", cert.abc.worst_excluded},
                {"max_list", cert.abc.max_list}};
  j["constants"] = {{"m", k.m},
                    {"a_factor", k.a_factor},
                    {"b2_factor", k.b2_factor},
                    {"i_factor", k.i_factor},
                    {"ii_factor", k.ii_factor},
                    {"b1_factor", k.b1_factor},
                    {"embedding", k.embedding},
                    {"packing", k.packing},
                    {"total", k.total}};
  j["partitions"] = std::move(partitions);
  j["bounds"] = std::move(bounds);
  j["b_split"] = split_json(grid, cert.b_split);
  j["c_split"] = split_json(grid, cert.c_split);
  j["ok"] = {{"partitions", cert.partitions_ok()}, {"bounds", cert.bounds_ok()}, {"packing", cert.packing_ok()}};
  return j.dump(1);
}

}  // namespace ewl
