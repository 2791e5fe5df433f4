#include "cli.hpp"

#include "spdicp/baseline.hpp"
#include "spdicp/experiments.hpp"
#include "spdicp/kinematics.hpp"
#include "spdicp/registration.hpp"
#include "spdicp/render.hpp"
#include "spdicp/serialization.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace spdicp::cli {

namespace {

namespace fs = std::filesystem;

struct FitFlags {
  bool pt = true;
  int weight_exp = 3;
  int restarts = 8;
  int max_iter = 100;
  int rotation_iters = 100;
  std::uint64_t seed = 0;
  bool one_to_one = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f) {
  cmd->add_flag("--pt,!--no-pt", f.pt, "Parallel-transport initialization (default on)");
  cmd->add_option("--weight-exp", f.weight_exp, "Exponent k of the correspondence weights w^k")
      ->capture_default_str()
      ->check(CLI::Range(1, 16));
  cmd->add_option("--restarts", f.restarts, "Rotation optimizer restarts")->capture_default_str()->check(CLI::Range(1, 1000));
  cmd->add_option("--max-iter", f.max_iter, "Maximum ICP iterations")->capture_default_str()->check(CLI::Range(1, 100000));
  cmd->add_option("--rotation-iters", f.rotation_iters, "Maximum iterations per optimizer restart")
      ->capture_default_str()
      ->check(CLI::Range(1, 100000));
  cmd->add_option("--seed", f.seed, "Seed for restarts and sampling")->capture_default_str();
  cmd->add_flag("--one-to-one", f.one_to_one, "One-to-one (Hungarian) matching instead of many-to-one");
}

FitConfig to_fit_config(const FitFlags& f) {
  FitConfig c;
  c.use_pt = f.pt;
  c.weight_exponent = f.weight_exp;
  c.icp_max_iter = f.max_iter;
  c.rotation.restarts = f.restarts;
  c.rotation.max_iter = f.rotation_iters;
  c.seed = f.seed;
  c.match_mode = f.one_to_one ? MatchMode::OneToOne : MatchMode::ManyToOne;
  return c;
}

fs::path output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? fs::path(env) : fs::path(".");
}

std::string resolve_output(const std::string& given, const std::string& default_name) {
  if (!given.empty()) return given;
  const fs::path dir = output_dir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return (dir / default_name).string();
}

json read_json(const std::string& path) {
  if (!fs::exists(path)) throw IoError("file not found: " + path);
  return read_json_file(path);
}

Dataset read_dataset(const std::string& path) { return dataset_from_json(read_json(path)); }

SerialManipulator load_model(const std::string& name_or_path) {
  const auto& models = builtin_models();
  if (auto it = models.find(name_or_path); it != models.end()) return it->second;
  if (fs::exists(name_or_path)) return manipulator_from_json(read_json(name_or_path));
  std::string known;
  for (const auto& [k, v] : models) known += (known.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown model '" + name_or_path + "' (built-in: " + known + ")");
}

template <typename T>
std::vector<T> split_list(const std::string& s, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(convert(item));
  if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataOptions {
  std::string model;
  std::size_t random = 0;
  std::string trajectory;
  std::uint64_t seed = 0;
  double floor = 1e-4;
  std::string out;
};

TrajectoryProtocol parse_trajectory(const std::string& spec, const SerialManipulator& m, json& protocol) {
  static const std::regex sweep(R"(planar_sweep:(\d+)x(\d+))");
  std::smatch match;
  if (std::regex_match(spec, match, sweep)) {
    PlanarSweep p{std::stoi(match[1]), std::stoi(match[2])};
    protocol = {{"kind", "planar_sweep"}, {"n_fixed", p.n_fixed}, {"n_steps", p.n_steps}};
    return p;
  }
  if (spec == "planar_eval") {
    protocol = {{"kind", "planar_eval"}};
    return Scripted{planar_eval_trajectories()};
  }
  if (spec == "arm_eval") {
    protocol = {{"kind", "arm_eval"}};
    return Scripted{seven_dof_eval_trajectories(m)};
  }
  throw std::invalid_argument("unknown trajectory protocol '" + spec +
                              "' (expected planar_sweep:NxM, planar_eval or arm_eval)");
}

int cmd_gen_data(const GenDataOptions& o, const json& invocation, std::ostream& out) {
  const SerialManipulator m = load_model(o.model);
  Dataset ds{m.name(), o.seed, nullptr, invocation, SpdCloud({SpdMatrix::identity(3)})};
  std::string stem;
  if (!o.trajectory.empty()) {
    json protocol;
    const TrajectoryProtocol p = parse_trajectory(o.trajectory, m, protocol);
    ds.points = trajectory_dataset(m, p, o.floor).cloud;
    protocol["floor"] = o.floor;
    ds.protocol = protocol;
    stem = m.name() + "_" + protocol["kind"].get<std::string>();
  } else {
    if (o.random == 0) throw std::invalid_argument("gen-data: --random needs a positive count");
    ds.points = sample_random_dataset(m, o.random, o.seed, o.floor);
    ds.protocol = {{"kind", "random"}, {"count", o.random}, {"floor", o.floor}};
    stem = m.name() + "_random" + std::to_string(o.random) + "_seed" + std::to_string(o.seed);
  }
  const std::string path = resolve_output(o.out, stem + ".json");
  write_json_file(path, to_json(ds));
  out << "wrote " << ds.points.size() << " points to " << path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string teacher, student;
  bool allow_unequal = false;
  FitFlags flags;
  std::string out, report;
};

int cmd_fit(const FitOptions& o, const json& invocation, std::ostream& out) {
  const Dataset teacher = read_dataset(o.teacher);
  const Dataset student = read_dataset(o.student);
  if (teacher.points.size() != student.points.size() && !o.allow_unequal)
    throw std::invalid_argument("fit: teacher has " + std::to_string(teacher.points.size()) + " points, student has " +
                                std::to_string(student.points.size()) + " (pass --allow-unequal to accept)");

  const std::string path = resolve_output(o.out, "transform.json");
  const std::string report_path = o.report.empty() ? fs::path(path).replace_extension(".report.json").string() : o.report;

  FitResult result = [&] {
    try {
      return fit(student.points, teacher.points, to_fit_config(o.flags));
    } catch (const std::exception& e) {
      write_json_file(report_path, {{"invocation", invocation}, {"error", e.what()}});
      throw;
    }
  }();

  json tj = to_json(result.transform);
  const std::string hash = fnv1a_hex(tj.dump());
  tj["invocation"] = invocation;
  tj["hash"] = hash;
  write_json_file(path, tj);

  json rj = to_json(result.report);
  rj["invocation"] = invocation;
  rj["transform_hash"] = hash;
  write_json_file(report_path, rj);

  out << "icp iterations " << result.report.icp_iterations << (result.report.converged ? " (converged)" : " (not converged)")
      << ", objective " << result.report.final_objective << ", scale exponent " << fmt(result.transform.scale_exponent)
      << ", rotation angle " << fmt(rotation_angle(result.transform.rotation)) << " rad\n";
  out << "wrote " << path << " and " << report_path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// transfer

struct TransferOptions {
  std::string transform, baseline_map, data, out;
};

int cmd_transfer(const TransferOptions& o, const json& invocation, std::ostream& out) {
  const Dataset input = read_dataset(o.data);
  Dataset result{input.model, input.seed, nullptr, invocation, input.points};
  if (!o.transform.empty()) {
    const json tj = read_json(o.transform);
    const RigidSpdTransform t = transform_from_json(tj);
    result.points = apply(t, input.points);
    result.protocol = {{"kind", "transfer"}, {"transform_hash", fnv1a_hex(to_json(t).dump())}, {"input", o.data},
                       {"input_protocol", input.protocol}};
  } else {
    const NnTransferMap map = nn_map_from_json(read_json(o.baseline_map));
    if (map.teacher_samples.dim() != input.points.dim())
      throw std::invalid_argument("transfer: dimension mismatch between map and dataset");
    result.points = BaselineTransfer(map).transfer(input.points);
    result.protocol = {{"kind", "baseline_transfer"}, {"map_hash", fnv1a_hex(to_json(map).dump())}, {"input", o.data},
                       {"input_protocol", input.protocol}};
  }
  const std::string path = resolve_output(o.out, fs::path(o.data).stem().string() + "_transferred.json");
  write_json_file(path, to_json(result));
  out << "wrote " << result.points.size() << " points to " << path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string predicted, reference, baseline, out, csv;
  std::string experiment = "eval", variant = "-";
  std::optional<int> iterations;
};

int cmd_eval(const EvalOptions& o, const json& invocation, std::ostream& out) {
  const Dataset pred = read_dataset(o.predicted);
  const Dataset ref = read_dataset(o.reference);
  if (pred.points.size() != ref.points.size())
    throw std::invalid_argument("eval: predicted has " + std::to_string(pred.points.size()) +
                                " points, reference has " + std::to_string(ref.points.size()));
  EvalReport report = o.baseline.empty() ? rmse(pred.points, ref.points)
                                         : rmse(pred.points, ref.points, read_dataset(o.baseline).points);
  report.iterations = o.iterations;

  json j = to_json(report);
  j["invocation"] = invocation;
  const std::string path = resolve_output(o.out, "eval.json");
  write_json_file(path, j);
  const std::string table = csv_header() + "\n" + csv_row(o.experiment, o.variant, pred.points.size(), report) + "\n";
  if (!o.csv.empty()) write_text_file(o.csv, table);
  out << table;
  if (report.rmse_baseline_normalized)
    out << "baseline-normalized rmse " << *report.rmse_baseline_normalized << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// render

struct RenderOptions {
  std::vector<std::string> data, names;
  std::string view = "top", out;
};

int cmd_render(const RenderOptions& o, const json& invocation, std::ostream& out) {
  if (!o.names.empty() && o.names.size() != o.data.size())
    throw std::invalid_argument("render: --name must be given once per --data");
  const View view = parse_view(o.view);
  std::vector<RenderLayer> layers;
  for (std::size_t i = 0; i < o.data.size(); ++i) {
    const Dataset ds = read_dataset(o.data[i]);
    layers.push_back({o.names.empty() ? fs::path(o.data[i]).stem().string() : o.names[i], ds.points});
  }
  const std::string svg = render_svg(layers, view, invocation.dump());
  const std::string path = resolve_output(o.out, "render_" + o.view + ".svg");
  write_text_file(path, svg);
  out << "wrote " << path << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// toy-bench

struct ToyOptions {
  std::string model = "panda7";
  std::size_t samples = 100, heldout = 10, singular = 0;
  int seeds = 1;
  FitFlags flags;
  std::string csv;
};

int cmd_toy(const ToyOptions& o, const json& invocation, std::ostream& out) {
  if (o.seeds < 1) throw std::invalid_argument("toy-bench: --seeds must be positive");
  std::vector<double> errors, iterations;
  std::string rows = csv_header() + "\n";
  out << "seed  iterations  converged  rmse\n";
  for (int k = 0; k < o.seeds; ++k) {
    ToyConfig c;
    c.model = o.model;
    c.samples = o.samples;
    c.heldout = o.heldout;
    c.singular_subset = o.singular;
    c.fit = to_fit_config(o.flags);
    c.seed = o.flags.seed + static_cast<std::uint64_t>(k);
    const ToyOutcome r = run_toy(c);
    errors.push_back(r.rmse);
    iterations.push_back(r.iterations);
    out << std::setw(4) << c.seed << std::setw(12) << r.iterations << std::setw(11) << (r.converged ? "yes" : "no")
        << "  " << fmt(r.rmse) << '\n';
    EvalReport rep;
    rep.rmse = r.rmse;
    rep.iterations = r.iterations;
    rows += csv_row("toy/seed" + std::to_string(c.seed), o.flags.pt ? "pt+icp" : "icp",
                    o.singular ? o.singular : o.samples, rep) + "\n";
  }
  out << "median: iterations " << fmt(median(iterations), 1) << ", rmse " << fmt(median(errors)) << '\n';
  if (!o.csv.empty()) write_text_file(o.csv, "# " + invocation.dump() + "\n" + rows);
  return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  std::string variants = "pt,icp", weight_exps = "1,2,3", sample_counts = "400,200,100,50,25";
  int seeds = 10;
  std::uint64_t seed = 0;
  bool random_training = false;
  int restarts = 8, max_iter = 100;
  std::string out_dir;
};

int cmd_sweep(const SweepOptions& o, const json& invocation, std::ostream& out) {
  const auto variants = split_list<Variant>(o.variants, &parse_variant);
  const auto exps = split_list<int>(o.weight_exps, &to_int);
  const auto counts = split_list<int>(o.sample_counts, &to_int);
  if (o.seeds < 1) throw std::invalid_argument("sweep: --seeds must be positive");
  const fs::path root = o.out_dir.empty() ? output_dir() / "sweep" : fs::path(o.out_dir);
  const std::string experiment = o.random_training ? "two_dof_random" : "two_dof";
  const auto evals = planar_eval_trajectories();

  std::string table = csv_header() + "\n";
  for (Variant v : variants) {
    // Weights only enter through ICP matching.
    const std::vector<int> cell_exps = v == Variant::PtOnly ? std::vector<int>{0} : exps;
    for (int w : cell_exps) {
      for (int n : counts) {
        const std::string label = to_string(v) + (v == Variant::PtOnly ? "" : "+w" + std::to_string(w));
        const fs::path cell_dir = root / (label + "_n" + std::to_string(n));
        fs::create_directories(cell_dir);
        std::array<std::vector<double>, 3> errors;
        std::vector<double> iterations;
        json per_seed = json::array();
        for (int k = 0; k < o.seeds; ++k) {
          TwoDofConfig c;
          c.variant = v;
          c.weight_exponent = std::max(w, 1);
          c.train_samples = static_cast<std::size_t>(n);
          c.random_training = o.random_training;
          c.rotation.restarts = o.restarts;
          c.icp_max_iter = o.max_iter;
          c.seed = o.seed + static_cast<std::uint64_t>(k);
          const TwoDofOutcome r = run_two_dof(c);
          for (std::size_t e = 0; e < 3; ++e) errors[e].push_back(r.rmse[e]);
          iterations.push_back(r.iterations);
          per_seed.push_back({{"seed", c.seed}, {"rmse", r.rmse}, {"iterations", r.iterations},
                              {"train_samples", r.train_samples}});
        }
        json cell = {{"invocation", invocation}, {"experiment", experiment}, {"variant", label},
                     {"samples", n},            {"runs", per_seed}};
        std::string rows;
        for (std::size_t e = 0; e < evals.size(); ++e) {
          EvalReport rep;
          rep.rmse = median(errors[e]);
          rep.iterations = static_cast<int>(std::lround(median(iterations)));
          rows += csv_row(experiment + "/" + evals[e].id, label, static_cast<std::size_t>(n), rep) + "\n";
          cell["median_rmse"][evals[e].id] = rep.rmse;
        }
        write_json_file((cell_dir / "cell.json").string(), cell);
        table += rows;
        out << rows << std::flush;
      }
    }
  }
  fs::create_directories(root);
  write_text_file((root / "results.csv").string(), table);
  out << "wrote " << (root / "results.csv").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// build-map

struct MapOptions {
  std::string teacher = "surrogate7_teacher", student = "panda7";
  std::size_t samples = 5000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_build_map(const MapOptions& o, const json& invocation, std::ostream& out) {
  const NnTransferMap map = build_nn_map(load_model(o.teacher), load_model(o.student), o.samples, o.seed);
  json j = to_json(map);
  j["invocation"] = invocation;
  const std::string path = resolve_output(o.out, "nn_map.json");
  write_json_file(path, j);
  out << "wrote map with " << map.pair_index.size() << " pairs to " << path << '\n';
  return 0;
}

void emit_error(std::ostream& err, const std::string& type, const std::string& message, const std::string& command) {
  json j = {{"error", {{"type", type}, {"message", message}, {"command", command}}}};
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Manifold-aware ICP registration of SPD manipulability clouds", "spdicp"};
  app.require_subcommand(1);

  GenDataOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a manipulability dataset from a model");
  gen_cmd->add_option("--model", gen.model, "Built-in model name or model JSON file")->required();
  auto* random_opt = gen_cmd->add_option("--random", gen.random, "Number of uniform joint samples");
  auto* traj_opt = gen_cmd->add_option("--trajectory", gen.trajectory, "planar_sweep:NxM, planar_eval or arm_eval");
  random_opt->excludes(traj_opt);
  gen_cmd->add_option("--seed", gen.seed, "Sampling seed")->capture_default_str();
  gen_cmd->add_option("--floor", gen.floor, "Eigenvalue floor")->capture_default_str()->check(CLI::PositiveNumber);
  gen_cmd->add_option("-o,--out", gen.out, "Output file");

  FitOptions fit_o;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a teacher-to-student transform");
  fit_cmd->add_option("--teacher", fit_o.teacher, "Teacher dataset")->required();
  fit_cmd->add_option("--student", fit_o.student, "Student dataset")->required();
  fit_cmd->add_flag("--allow-unequal", fit_o.allow_unequal, "Accept datasets of different sizes");
  add_fit_flags(fit_cmd, fit_o.flags);
  fit_cmd->add_option("-o,--out", fit_o.out, "Transform output file");
  fit_cmd->add_option("--report", fit_o.report, "Fit report output file (default: <out>.report.json)");

  TransferOptions tr;
  auto* tr_cmd = app.add_subcommand("transfer", "Apply a transform (or the NN baseline) to a dataset");
  auto* t_opt = tr_cmd->add_option("--transform", tr.transform, "Transform file from fit");
  auto* m_opt = tr_cmd->add_option("--baseline-map", tr.baseline_map, "Nearest-neighbour map from build-map");
  t_opt->excludes(m_opt);
  tr_cmd->add_option("--data", tr.data, "Dataset to transfer")->required();
  tr_cmd->add_option("-o,--out", tr.out, "Output file");

  EvalOptions ev;
  auto* ev_cmd = app.add_subcommand("eval", "Dispersion-normalized RMSE between paired datasets");
  ev_cmd->add_option("--predicted", ev.predicted, "Predicted dataset")->required();
  ev_cmd->add_option("--reference", ev.reference, "Reference dataset")->required();
  ev_cmd->add_option("--baseline", ev.baseline, "Baseline output dataset for the extra normalization");
  ev_cmd->add_option("--experiment", ev.experiment, "Experiment id for the CSV row")->capture_default_str();
  ev_cmd->add_option("--variant", ev.variant, "Variant label for the CSV row")->capture_default_str();
  ev_cmd->add_option("--iterations", ev.iterations, "Iteration count for the CSV row");
  ev_cmd->add_option("-o,--out", ev.out, "JSON report file");
  ev_cmd->add_option("--csv", ev.csv, "CSV output file");

  RenderOptions rd;
  auto* rd_cmd = app.add_subcommand("render", "Draw ellipse projections of 3x3 datasets as SVG");
  rd_cmd->add_option("--data", rd.data, "Dataset file (up to three)")->required()->expected(1, 3);
  rd_cmd->add_option("--name", rd.names, "Legend name per dataset");
  rd_cmd->add_option("--view", rd.view, "top or front")->capture_default_str();
  rd_cmd->add_option("-o,--out", rd.out, "SVG output file");

  ToyOptions toy;
  auto* toy_cmd = app.add_subcommand("toy-bench", "Recover a planted rigid transform on random model samples");
  toy_cmd->add_option("--model", toy.model, "Built-in model")->capture_default_str();
  toy_cmd->add_option("--samples", toy.samples, "Training samples")->capture_default_str();
  toy_cmd->add_option("--heldout", toy.heldout, "Held-out evaluation samples")->capture_default_str();
  toy_cmd->add_option("--singular", toy.singular, "Fit on the k most singular training samples only");
  toy_cmd->add_option("--seeds", toy.seeds, "Number of repetitions (seeds seed..seed+n-1)")->capture_default_str();
  add_fit_flags(toy_cmd, toy.flags);
  toy_cmd->add_option("--csv", toy.csv, "CSV output file");

  SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "2-DoF result grid over variants, weights and sample counts");
  sw_cmd->add_option("--variants", sw.variants, "Comma list of pt-only, icp, pt (= pt+icp)")->capture_default_str();
  sw_cmd->add_option("--weight-exps", sw.weight_exps, "Comma list of weight exponents")->capture_default_str();
  sw_cmd->add_option("--sample-counts", sw.sample_counts, "Comma list of training sizes")->capture_default_str();
  sw_cmd->add_option("--seeds", sw.seeds, "Seeds per cell")->capture_default_str();
  sw_cmd->add_option("--seed", sw.seed, "First seed")->capture_default_str();
  sw_cmd->add_flag("--random-training", sw.random_training, "Independent uniform samples instead of sweeps");
  sw_cmd->add_option("--restarts", sw.restarts, "Rotation optimizer restarts")->capture_default_str();
  sw_cmd->add_option("--max-iter", sw.max_iter, "Maximum ICP iterations")->capture_default_str();
  sw_cmd->add_option("--out-dir", sw.out_dir, "Output directory (default: <output dir>/sweep)");

  MapOptions mp;
  auto* mp_cmd = app.add_subcommand("build-map", "Build the nearest-neighbour baseline map");
  mp_cmd->add_option("--teacher", mp.teacher, "Teacher model")->capture_default_str();
  mp_cmd->add_option("--student", mp.student, "Student model")->capture_default_str();
  mp_cmd->add_option("--samples", mp.samples, "Samples per model")->capture_default_str();
  mp_cmd->add_option("--seed", mp.seed, "Sampling seed")->capture_default_str();
  mp_cmd->add_option("-o,--out", mp.out, "Output file");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::string command = args.size() > 1 ? args[1] : "";
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage", e.what(), command);
    return 1;
  }

  json invocation = json::array();
  for (std::size_t i = 1; i < args.size(); ++i) invocation.push_back(args[i]);
  invocation = {{"program", "spdicp"}, {"args", invocation}};

  try {
    if (*gen_cmd) {
      if (gen.trajectory.empty() && gen.random == 0)
        throw std::invalid_argument("gen-data: one of --random or --trajectory is required");
      return cmd_gen_data(gen, invocation, out);
    }
    if (*fit_cmd) return cmd_fit(fit_o, invocation, out);
    if (*tr_cmd) {
      if (tr.transform.empty() && tr.baseline_map.empty())
        throw std::invalid_argument("transfer: one of --transform or --baseline-map is required");
      return cmd_transfer(tr, invocation, out);
    }
    if (*ev_cmd) return cmd_eval(ev, invocation, out);
    if (*rd_cmd) return cmd_render(rd, invocation, out);
    if (*toy_cmd) return cmd_toy(toy, invocation, out);
    if (*sw_cmd) return cmd_sweep(sw, invocation, out);
    if (*mp_cmd) return cmd_build_map(mp, invocation, out);
  } catch (const IoError& e) {
    emit_error(err, "io", e.what(), command);
    return 3;
  } catch (const FormatError& e) {
    emit_error(err, "format", e.what(), command);
    return 2;
  } catch (const KarcherNonConvergence& e) {
    emit_error(err, "numerical", e.what(), command);
    return 4;
  } catch (const std::invalid_argument& e) {
    emit_error(err, "validation", e.what(), command);
    return 2;
  } catch (const std::domain_error& e) {
    emit_error(err, "numerical", e.what(), command);
    return 4;
  } catch (const json::exception& e) {
    emit_error(err, "format", e.what(), command);
    return 2;
  } catch (const std::exception& e) {
    emit_error(err, "internal", e.what(), command);
    return 5;
  }
  return 1;
}

}  // namespace spdicp::cli
