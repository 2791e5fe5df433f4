#pragma once

// JSON and CSV formats for every persisted type.

#include "spdicp/baseline.hpp"
#include "spdicp/kinematics.hpp"
#include "spdicp/matching.hpp"
#include "spdicp/registration.hpp"
#include "spdicp/rotation.hpp"
#include "spdicp/spd.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace spdicp {

using json = nlohmann::json;

constexpr int kTransformFormatVersion = 1;
constexpr int kCsvSchemaVersion = 1;

/// Thrown for malformed or inconsistent documents.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& rows);

/// { "dim": D, "rows": [[...], ...] }
json to_json(const SpdMatrix& m);
/// Symmetry checked to 1e-9, then symmetrized exactly.
SpdMatrix spd_from_json(const json& j);

json to_json(const CorrespondenceSet& c);
CorrespondenceSet correspondences_from_json(const json& j);

json to_json(const OptimizerReport& r);
json to_json(const FitReport& r);

json to_json(const RigidSpdTransform& t);
RigidSpdTransform transform_from_json(const json& j);

json to_json(const SerialManipulator& m);
SerialManipulator manipulator_from_json(const json& j);

struct Dataset {
  std::string model;
  std::uint64_t seed = 0;
  json protocol;    // how the points were generated
  json invocation;  // command line that produced the file
  SpdCloud points;
};

json to_json(const Dataset& d);
Dataset dataset_from_json(const json& j);

json to_json(const NnTransferMap& m);
NnTransferMap nn_map_from_json(const json& j);

json to_json(const EvalReport& r);

/// Fixed CSV schema: schema_version,experiment,variant,samples,rmse,iterations
std::string csv_header();
std::string csv_row(const std::string& experiment, const std::string& variant, std::size_t samples,
                    const EvalReport& report);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
void write_json_file(const std::string& path, const json& j);

}  // namespace spdicp
