#include "kpca/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "kpca/binary_stream.hpp"
#include "kpca/data_io.hpp"
#include "kpca/detectors.hpp"
#include "kpca/error.hpp"
#include "kpca/exact_oracle.hpp"
#include "kpca/metrics.hpp"

namespace kpca::cli {
namespace {

struct Flags {
  // shared
  std::string features;
  std::string logits;
  std::string model;
  std::string out;
  std::uint64_t seed = 0;

  // fit
  std::string method = "kpca-nys";
  std::string kernel = "cosine-gaussian";
  std::string gamma = "median";
  std::size_t num_features = 4096;
  std::size_t num_landmarks = 2048;
  std::optional<double> evr;
  std::string sampling = "low-energy";
  double temperature = 1.0;
  std::optional<double> clip_percentile;
  std::uint32_t degree = 2;
  double coef = 1.0;

  // eval
  std::vector<std::string> ood;
  std::vector<std::string> ood_logits;
  std::string train_features;
  std::string scores_out;
  bool oracle = false;
  bool histograms = false;

  // gen-synth
  std::string kind = "clusters";
  std::size_t n_ind = 1000;
  std::size_t n_ood = 500;
  std::size_t dim = 16;
  std::size_t classes = 4;
  double displacement = 1.0;
};

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::kUsage || kind == ErrorKind::kParameter || kind == ErrorKind::kUnsupportedKernel
             ? kExitUsage
             : kExitData;
}

void write_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

Matrix read_optional(const std::string& path, MatrixRole role) {
  if (path.empty()) return {};
  return read_matrix(path, format_for_path(path), role).values;
}

std::map<std::string, std::string> parse_pairs(const std::vector<std::string>& items,
                                               const char* flag) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      fail(ErrorKind::kUsage, std::string(flag) + " expects NAME=PATH, got '" + item + "'");
    }
    const std::string name = item.substr(0, eq);
    if (!out.emplace(name, item.substr(eq + 1)).second) {
      fail(ErrorKind::kUsage, std::string(flag) + " repeats the name '" + name + "'");
    }
  }
  return out;
}

DetectorConfig build_config(const Flags& f) {
  DetectorConfig c;
  const auto method = parse_method(f.method);
  if (!method) fail(ErrorKind::kUsage, "unknown method '" + f.method + "'");
  c.method = *method;
  c.kernel = KernelSpec::from_name(f.kernel);
  if (c.kernel.base == KernelBase::kPolynomial) {
    c.kernel.degree = f.degree;
    c.kernel.coef = f.coef;
  }
  if (f.gamma != "median") {
    double g = 0.0;
    try {
      std::size_t used = 0;
      g = std::stod(f.gamma, &used);
      if (used != f.gamma.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(ErrorKind::kUsage, "--gamma expects a number or 'median', got '" + f.gamma + "'");
    }
    if (!(g > 0.0) || !std::isfinite(g)) fail(ErrorKind::kParameter, "--gamma must be positive");
    c.gamma = g;
  }
  c.num_features = f.num_features;
  c.num_landmarks = f.num_landmarks;
  c.evr_threshold = f.evr;
  const auto sampling = parse_sampling(f.sampling);
  if (!sampling) fail(ErrorKind::kUsage, "unknown sampling scheme '" + f.sampling + "'");
  c.sampling = *sampling;
  c.temperature = f.temperature;
  c.clip_percentile = f.clip_percentile;
  c.seed = f.seed;
  return c;
}

int cmd_fit(const Flags& f, std::ostream& out) {
  const DetectorConfig config = build_config(f);
  if (f.features.empty() && !uses_logits_for_scoring(config.method)) {
    fail(ErrorKind::kUsage, "fit --method " + f.method + " requires --features");
  }
  const Matrix features = read_optional(f.features, MatrixRole::kFeatures);
  const Matrix logits = read_optional(f.logits, MatrixRole::kLogits);
  const DetectorModel model = fit_detector(config, features, logits);
  save_model(model, f.model);
  out << "fitted " << to_string(model.method) << " on " << model.n_train << " rows";
  if (model.subspace) out << ", q = " << model.subspace->q << " of " << model.subspace->dim();
  if (model.rff || model.nystrom) out << ", kernel " << model.kernel.name() << " gamma " << model.kernel.gamma;
  out << "\nwrote " << f.model << "\n";
  return kExitOk;
}

int cmd_score(const Flags& f, std::ostream& out, std::ostream& err) {
  const DetectorModel model = load_model(f.model);
  if (f.features.empty() && !uses_logits_for_scoring(model.method)) {
    fail(ErrorKind::kUsage, "score requires --features for method " + std::string(to_string(model.method)));
  }
  const Matrix features = read_optional(f.features, MatrixRole::kFeatures);
  const Matrix logits = read_optional(f.logits, MatrixRole::kLogits);
  const LenientScores scored = score_lenient(model, features, logits);
  for (const auto& r : scored.rejected) {
    err << f.features << ": rejected row " << r.row << ": " << r.reason << "\n";
  }
  const ScoredSet set{"input", scored.scores};
  const std::vector<std::vector<std::size_t>> rows{scored.rows};
  write_text(f.out, scores_to_csv(std::span(&set, 1), rows));
  out << "scored " << scored.scores.size() << " rows, rejected " << scored.rejected.size()
      << "\nwrote " << f.out << "\n";
  return kExitOk;
}

double mean_abs_gap(std::span<const double> scores, std::span<const double> exact) {
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) sum += std::fabs(-scores[i] - exact[i]);
  return sum / static_cast<double>(scores.size());
}

int cmd_eval(const Flags& f, std::ostream& out) {
  if (f.ood.empty() && f.ood_logits.empty()) fail(ErrorKind::kUsage, "eval requires at least one --ood NAME=PATH");
  const auto ood = parse_pairs(f.ood, "--ood");
  const auto ood_logits = parse_pairs(f.ood_logits, "--ood-logits");
  const DetectorModel model = load_model(f.model);
  const bool logit_method = uses_logits_for_scoring(model.method);

  DatasetBundle bundle;
  bundle.ind_test = read_optional(f.features, MatrixRole::kFeatures);
  bundle.ind_test_logits = read_optional(f.logits, MatrixRole::kLogits);
  if (!logit_method && bundle.ind_test.empty()) fail(ErrorKind::kUsage, "eval requires --features");
  std::vector<std::string> names;
  for (const auto& [name, path] : ood) names.push_back(name);
  for (const auto& [name, path] : ood_logits) {
    if (!ood.contains(name)) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    NamedSet set;
    set.name = name;
    if (auto it = ood.find(name); it != ood.end()) set.features = read_optional(it->second, MatrixRole::kFeatures);
    if (auto it = ood_logits.find(name); it != ood_logits.end()) {
      set.logits = read_optional(it->second, MatrixRole::kLogits);
    }
    bundle.ood_sets.push_back(std::move(set));
  }

  // Strict scoring: a degenerate row aborts with its dataset and index.
  std::vector<double> ind_scores;
  try {
    ind_scores = score(model, bundle.ind_test, bundle.ind_test_logits);
  } catch (const RowError& e) {
    throw Error(e.kind(), f.features + ": " + e.what());
  }
  std::vector<ScoredSet> sets;
  for (const auto& set : bundle.ood_sets) {
    try {
      sets.push_back({set.name, score(model, set.features, set.logits)});
    } catch (const Error& e) {
      throw Error(e.kind(), "OoD set '" + set.name + "': " + e.what());
    }
  }
  EvalReport report = evaluate_scores(std::string(to_string(model.method)), ind_scores, sets, f.histograms);

  if (f.oracle) {
    if (model.method != Method::kKpcaRff && model.method != Method::kKpcaNys) {
      fail(ErrorKind::kUsage, "--oracle applies to kpca-rff and kpca-nys models only");
    }
    if (f.train_features.empty()) fail(ErrorKind::kUsage, "--oracle requires --train-features");
    Matrix train = read_optional(f.train_features, MatrixRole::kFeatures);
    if (!model.clip_thresholds.empty()) train = clip_features(model, train);
    const std::size_t q = std::min<std::size_t>(model.subspace->q, train.rows() - 1);
    const ExactKpcaModel exact = fit_exact(train, model.kernel, train.rows() - q, true);
    auto clipped = [&](const Matrix& m) {
      return model.clip_thresholds.empty() ? m : clip_features(model, m);
    };
    report.ind_oracle_mae = mean_abs_gap(ind_scores, exact_error_standard_form(exact, clipped(bundle.ind_test)));
    for (std::size_t i = 0; i < sets.size(); ++i) {
      report.per_ood[i].oracle_mae = mean_abs_gap(
          sets[i].scores, exact_error_standard_form(exact, clipped(bundle.ood_sets[i].features)));
    }
  }

  const std::string json = report_to_json(report);
  if (f.out.empty()) {
    out << json;
  } else {
    write_text(f.out, json);
    out << "average AUROC " << report.average_auroc << ", average FPR95 " << report.average_fpr95
        << "\nwrote " << f.out << "\n";
  }
  if (!f.scores_out.empty()) {
    std::vector<ScoredSet> all;
    all.push_back({"ind", ind_scores});
    all.insert(all.end(), sets.begin(), sets.end());
    write_text(f.scores_out, scores_to_csv(all));
  }
  return kExitOk;
}

int cmd_gen_synth(const Flags& f, std::ostream& out) {
  if (f.out.empty()) fail(ErrorKind::kUsage, "gen-synth requires --out DIR");
  SyntheticOptions o;
  o.kind = parse_synthetic_kind(f.kind);
  o.n_ind = f.n_ind;
  o.n_ood = f.n_ood;
  o.dim = f.dim;
  o.seed = f.seed;
  o.num_classes = f.classes;
  o.displacement = f.displacement;
  const DatasetBundle b = gen_synthetic(o);

  std::error_code ec;
  std::filesystem::create_directories(f.out, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create directory '" + f.out + "': " + ec.message());
  const std::filesystem::path dir(f.out);
  auto put = [&](const Matrix& m, const char* name, MatrixRole role) {
    const std::string path = (dir / name).string();
    write_matrix(m, path, MatrixFormat::kBinary, role);
    out << "wrote " << path << " (" << m.rows() << "x" << m.cols() << ")\n";
  };
  put(b.ind_train, "train.kpcf", MatrixRole::kFeatures);
  put(b.ind_train_logits, "train_logits.kpcf", MatrixRole::kLogits);
  put(b.ind_test, "test.kpcf", MatrixRole::kFeatures);
  put(b.ind_test_logits, "test_logits.kpcf", MatrixRole::kLogits);
  for (const auto& set : b.ood_sets) {
    put(set.features, (set.name + ".kpcf").c_str(), MatrixRole::kFeatures);
    put(set.logits, (set.name + "_logits.kpcf").c_str(), MatrixRole::kLogits);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Flags f;
  CLI::App app{"Kernel PCA out-of-distribution detection", "kpca-ood"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "fit a detector and write a model file");
  fit->add_option("--features", f.features, "training features (.kpcf or .csv)");
  fit->add_option("--logits", f.logits, "training logits");
  fit->add_option("--method", f.method, "pca|kpca-rff|kpca-nys|knn|msp|maxlogit|energy")->capture_default_str();
  fit->add_option("--kernel", f.kernel, "cosine-gaussian|gaussian|cosine-laplacian|laplacian|cosine-polynomial|polynomial|linear|cosine")
      ->capture_default_str();
  fit->add_option("--gamma", f.gamma, "kernel gamma or 'median'")->capture_default_str();
  fit->add_option("--num-features", f.num_features, "random Fourier features M_r")->capture_default_str();
  fit->add_option("--num-landmarks", f.num_landmarks, "Nystrom landmarks M_n")->capture_default_str();
  fit->add_option("--evr", f.evr, "explained variance ratio threshold");
  fit->add_option("--sampling", f.sampling, "low-energy|high-energy|uniform")->capture_default_str();
  fit->add_option("--temperature", f.temperature, "energy temperature T")->capture_default_str();
  fit->add_option("--clip-percentile", f.clip_percentile, "clip features at this training percentile");
  fit->add_option("--degree", f.degree, "polynomial degree")->capture_default_str();
  fit->add_option("--coef", f.coef, "polynomial offset c")->capture_default_str();
  fit->add_option("--seed", f.seed, "random seed")->capture_default_str();
  fit->add_option("--model", f.model, "output model path")->required();

  auto* sc = app.add_subcommand("score", "score rows with a fitted model");
  sc->add_option("--model", f.model, "model path")->required();
  sc->add_option("--features", f.features, "features to score");
  sc->add_option("--logits", f.logits, "logits to score");
  sc->add_option("--out", f.out, "output CSV (dataset,row,score)")->required();

  auto* ev = app.add_subcommand("eval", "evaluate FPR95 and AUROC against OoD sets");
  ev->add_option("--model", f.model, "model path")->required();
  ev->add_option("--features", f.features, "InD test features");
  ev->add_option("--logits", f.logits, "InD test logits");
  ev->add_option("--ood", f.ood, "OoD features as NAME=PATH (repeatable)");
  ev->add_option("--ood-logits", f.ood_logits, "OoD logits as NAME=PATH (repeatable)");
  ev->add_option("--out", f.out, "report path (JSON); stdout when omitted");
  ev->add_option("--scores-out", f.scores_out, "per-sample score CSV");
  ev->add_flag("--histograms", f.histograms, "include 50-bin score histograms");
  ev->add_flag("--oracle", f.oracle, "compare against exact kernel PCA errors");
  ev->add_option("--train-features", f.train_features, "training features for --oracle");

  auto* gen = app.add_subcommand("gen-synth", "write a synthetic dataset bundle");
  gen->add_option("--kind", f.kind, "clusters|swiss-roll|shifted-norms")->capture_default_str();
  gen->add_option("--n-ind", f.n_ind, "InD training rows")->capture_default_str();
  gen->add_option("--n-ood", f.n_ood, "OoD rows")->capture_default_str();
  gen->add_option("--dim", f.dim, "feature dimension")->capture_default_str();
  gen->add_option("--classes", f.classes, "number of classes")->capture_default_str();
  gen->add_option("--displacement", f.displacement, "clusters OoD displacement")->capture_default_str();
  gen->add_option("--seed", f.seed, "random seed")->capture_default_str();
  gen->add_option("--out", f.out, "output directory")->required();

  std::vector<const char*> argv{"kpca-ood"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(f, out);
    if (sc->parsed()) return cmd_score(f, out, err);
    if (ev->parsed()) return cmd_eval(f, out);
    return cmd_gen_synth(f, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitData;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace kpca::cli
