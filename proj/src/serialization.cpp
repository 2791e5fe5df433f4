#include "spdicp/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace spdicp {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <typename T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw FormatError("matrix: expected a non-empty array of rows");
  const std::size_t r = rows.size();
  if (!rows[0].is_array() || rows[0].empty()) throw FormatError("matrix: rows must be non-empty arrays");
  const std::size_t c = rows[0].size();
  Eigen::MatrixXd m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (!rows[i].is_array() || rows[i].size() != c) throw FormatError("matrix: ragged rows");
    for (std::size_t j = 0; j < c; ++j) {
      if (!rows[i][j].is_number()) throw FormatError("matrix: non-numeric entry");
      m(i, j) = rows[i][j].get<double>();
    }
  }
  return m;
}

json to_json(const SpdMatrix& m) { return {{"dim", m.dim()}, {"rows", matrix_to_json(m.matrix())}}; }

SpdMatrix spd_from_json(const json& j) {
  const auto dim = get<long>(j, "dim");
  const Eigen::MatrixXd m = matrix_from_json(field(j, "rows"));
  if (m.rows() != dim || m.cols() != dim) throw FormatError("SpdMatrix: 'rows' does not match 'dim'");
  try {
    return SpdMatrix::validated(m, 1e-9);
  } catch (const std::exception& e) {
    throw FormatError(e.what());
  }
}

json to_json(const CorrespondenceSet& c) {
  json pairs = json::array();
  for (const auto& [t, s] : c.pairs) pairs.push_back({t, s});
  return {{"exponent", c.exponent}, {"pairs", pairs}, {"weights", c.weights}};
}

CorrespondenceSet correspondences_from_json(const json& j) {
  CorrespondenceSet c;
  c.exponent = get<int>(j, "exponent");
  for (const auto& p : field(j, "pairs")) {
    if (!p.is_array() || p.size() != 2) throw FormatError("correspondences: pairs must be [target, source]");
    c.pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
  }
  c.weights = get<std::vector<double>>(j, "weights");
  if (c.weights.size() != c.pairs.size()) throw FormatError("correspondences: weight count differs from pair count");
  return c;
}

json to_json(const OptimizerReport& r) {
  return {{"best_rotation", matrix_to_json(r.best_rotation.matrix())},
          {"best_objective", r.best_objective},
          {"objective_history", r.objective_history},
          {"restarts", r.restarts},
          {"best_restart", r.best_restart},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"total_iterations", r.total_iterations}};
}

json to_json(const FitReport& r) {
  return {{"icp_iterations", r.icp_iterations},
          {"converged", r.converged},
          {"objective_history", r.objective_history},
          {"rotation_updates", r.rotation_updates},
          {"source_dispersion", r.source_dispersion},
          {"target_dispersion", r.target_dispersion},
          {"final_objective", r.final_objective},
          {"correspondences", to_json(r.correspondences)},
          {"last_optimizer", to_json(r.last_optimizer)}};
}

json to_json(const RigidSpdTransform& t) {
  return {{"version", kTransformFormatVersion},
          {"dim", t.dim()},
          {"teacher_mean", to_json(t.teacher_mean)},
          {"centering_mean", to_json(t.centering_mean)},
          {"student_mean", to_json(t.student_mean)},
          {"scale_exponent", t.scale_exponent},
          {"rotation", matrix_to_json(t.rotation.matrix())},
          {"pt_matrix", t.pt_matrix ? matrix_to_json(*t.pt_matrix) : json(nullptr)}};
}

RigidSpdTransform transform_from_json(const json& j) {
  const int version = get<int>(j, "version");
  if (version != kTransformFormatVersion)
    throw FormatError("transform: unsupported version " + std::to_string(version));
  const auto dim = get<long>(j, "dim");
  const SpdMatrix teacher = spd_from_json(field(j, "teacher_mean"));
  const SpdMatrix student = spd_from_json(field(j, "student_mean"));
  const SpdMatrix centering = j.contains("centering_mean") ? spd_from_json(j.at("centering_mean")) : teacher;
  const double s = get<double>(j, "scale_exponent");
  if (!(s > 0.0)) throw FormatError("transform: scale_exponent must be positive");
  std::optional<Rotation> r;
  try {
    r.emplace(matrix_from_json(field(j, "rotation")));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("transform: ") + e.what());
  }
  std::optional<Eigen::MatrixXd> e;
  if (!field(j, "pt_matrix").is_null()) e = matrix_from_json(j.at("pt_matrix"));
  if (teacher.dim() != dim || student.dim() != dim || centering.dim() != dim || r->dim() != dim ||
      (e && (e->rows() != dim || e->cols() != dim)))
    throw FormatError("transform: component dimensions do not match 'dim'");
  return {teacher, centering, student, s, *r, e};
}

json to_json(const SerialManipulator& m) {
  json dh = json::array(), limits = json::array();
  for (const auto& row : m.dh()) dh.push_back({row.a, row.d, row.alpha, row.theta_offset});
  for (const auto& l : m.limits()) limits.push_back({l.lo, l.hi});
  json translation = json::array();
  for (int i = 0; i < 3; ++i) translation.push_back(m.base().translation(i));
  return {{"name", m.name()},
          {"convention", "standard_dh"},
          {"dh", dh},
          {"limits", limits},
          {"base_pose", {{"rotation", matrix_to_json(m.base().rotation)}, {"translation", translation}}}};
}

SerialManipulator manipulator_from_json(const json& j) {
  std::vector<DhRow> dh;
  for (const auto& row : field(j, "dh")) {
    if (!row.is_array() || row.size() != 4) throw FormatError("model: dh rows are [a, d, alpha, theta_offset]");
    dh.push_back({row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
  }
  std::vector<JointLimits> limits;
  for (const auto& l : field(j, "limits")) {
    if (!l.is_array() || l.size() != 2) throw FormatError("model: limits are [lo, hi]");
    limits.push_back({l[0].get<double>(), l[1].get<double>()});
  }
  Pose base;
  if (j.contains("base_pose")) {
    const json& bp = j.at("base_pose");
    const Eigen::MatrixXd r = matrix_from_json(field(bp, "rotation"));
    if (r.rows() != 3 || r.cols() != 3) throw FormatError("model: base rotation must be 3x3");
    base.rotation = r;
    const auto t = get<std::vector<double>>(bp, "translation");
    if (t.size() != 3) throw FormatError("model: base translation must have 3 entries");
    base.translation = Eigen::Vector3d(t[0], t[1], t[2]);
  }
  try {
    return SerialManipulator(get<std::string>(j, "name"), std::move(dh), std::move(limits), base);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json to_json(const Dataset& d) {
  json points = json::array();
  for (const auto& p : d.points) points.push_back(to_json(p));
  json j = {{"model", d.model},       {"seed", d.seed},     {"protocol", d.protocol},
            {"invocation", d.invocation}, {"points", points}, {"labels", d.points.labels()}};
  return j;
}

Dataset dataset_from_json(const json& j) {
  std::vector<SpdMatrix> pts;
  for (const auto& p : field(j, "points")) pts.push_back(spd_from_json(p));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j.at("labels").get<std::vector<std::string>>();
  if (pts.empty()) throw FormatError("dataset: no points");
  try {
    SpdCloud cloud(std::move(pts), std::move(labels));
    return {j.value("model", std::string()), j.value("seed", std::uint64_t{0}), j.value("protocol", json(nullptr)),
            j.value("invocation", json(nullptr)), std::move(cloud)};
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("dataset: ") + e.what());
  }
}

json to_json(const NnTransferMap& m) {
  json teacher = json::array(), student = json::array();
  for (const auto& p : m.teacher_samples) teacher.push_back(to_json(p));
  for (const auto& p : m.student_samples) student.push_back(to_json(p));
  return {{"teacher_samples", teacher}, {"student_samples", student}, {"pair_index", m.pair_index},
          {"voxel_size", m.voxel_size}};
}

NnTransferMap nn_map_from_json(const json& j) {
  std::vector<SpdMatrix> teacher, student;
  for (const auto& p : field(j, "teacher_samples")) teacher.push_back(spd_from_json(p));
  for (const auto& p : field(j, "student_samples")) student.push_back(spd_from_json(p));
  if (teacher.empty() || student.empty()) throw FormatError("nn map: empty sample set");
  NnTransferMap m{SpdCloud(std::move(teacher)), SpdCloud(std::move(student)),
                  get<std::vector<std::size_t>>(j, "pair_index"), j.value("voxel_size", 0.5)};
  if (m.pair_index.size() != m.teacher_samples.size()) throw FormatError("nn map: pair_index length mismatch");
  for (std::size_t idx : m.pair_index)
    if (idx >= m.student_samples.size()) throw FormatError("nn map: pair index out of range");
  return m;
}

json to_json(const EvalReport& r) {
  json j = {{"rmse", r.rmse},
            {"dispersion_after", r.dispersion_after},
            {"per_point_distances", r.per_point_distances},
            {"iterations", r.iterations ? json(*r.iterations) : json(nullptr)}};
  if (r.baseline_dispersion) j["baseline_dispersion"] = *r.baseline_dispersion;
  if (r.rmse_baseline_normalized) j["rmse_baseline_normalized"] = *r.rmse_baseline_normalized;
  return j;
}

std::string csv_header() { return "schema_version,experiment,variant,samples,rmse,iterations"; }

std::string csv_row(const std::string& experiment, const std::string& variant, std::size_t samples,
                    const EvalReport& report) {
  std::ostringstream os;
  os << kCsvSchemaVersion << ',' << experiment << ',' << variant << ',' << samples << ','
     << format_double(report.rmse) << ',';
  if (report.iterations) os << *report.iterations;
  return os.str();
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace spdicp
