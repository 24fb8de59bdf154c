#include "trajpriv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "trajpriv/baseline.hpp"
#include "trajpriv/errors.hpp"
#include "trajpriv/io.hpp"

namespace trajpriv {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Method m) { return m == Method::kHmmRl ? "hmm-rl" : "baseline"; }

Method method_from_string(const std::string& s) {
  if (s == "hmm-rl") return Method::kHmmRl;
  if (s == "baseline") return Method::kBaseline;
  throw ConfigError("unknown method '" + s + "' (expected hmm-rl or baseline)");
}

namespace {

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

std::string fmt_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    if (j.value("schema_version", 0) != kSchemaVersion) {
      throw ConfigError("config schema_version must be " + std::to_string(kSchemaVersion));
    }
    const auto dataset = j.at("dataset").get<std::string>();
    if (dataset == "geolife") {
      cfg.dataset = Dataset::kGeolife;
    } else if (dataset == "porto") {
      cfg.dataset = Dataset::kPorto;
    } else if (dataset == "synth") {
      cfg.dataset = Dataset::kSynth;
    } else {
      throw ConfigError("dataset must be one of geolife, porto, synth");
    }

    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.lon_min = g.at("lon_min").get<double>();
      cfg.lon_max = g.at("lon_max").get<double>();
      cfg.lat_min = g.at("lat_min").get<double>();
      cfg.lat_max = g.at("lat_max").get<double>();
      cfg.cell_size_m = g.at("cell_size_m").get<double>();
    } else if (cfg.dataset != Dataset::kSynth) {
      throw ConfigError("real datasets need a grid section");
    }

    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      read_opt(p, "subsample_s", cfg.preprocess.subsample_s);
      read_opt(p, "min_len", cfg.preprocess.min_len);
      read_opt(p, "max_len", cfg.preprocess.max_len);
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      auto& c = cfg.synth;
      read_opt(s, "n_traj", c.n_traj);
      read_opt(s, "min_len", c.min_len);
      read_opt(s, "max_len", c.max_len);
      read_opt(s, "n_rows", c.n_rows);
      read_opt(s, "n_cols", c.n_cols);
      read_opt(s, "cell_size_m", c.cell_size_m);
      read_opt(s, "origin_lon", c.origin_lon);
      read_opt(s, "origin_lat", c.origin_lat);
      read_opt(s, "step_s", c.step_s);
      read_opt(s, "step_kernel", c.step_kernel);
      read_opt(s, "persistence", c.persistence);
      read_opt(s, "seed", c.seed);
    }
    if (j.contains("publish")) {
      const auto& p = j.at("publish");
      read_opt(p, "lambda", cfg.publish.lambda);
      read_opt(p, "deviation", cfg.publish.deviation_d);
      read_opt(p, "seed", cfg.publish.seed);
    }
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      if (a.contains("gamma") && !(a.at("gamma").is_string() && a.at("gamma") == "auto")) {
        cfg.gamma = a.at("gamma").get<int>();
      }
      read_opt(a, "delta", cfg.attack.delta);
      read_opt(a, "k", cfg.attack.k);
      read_opt(a, "passes", cfg.attack.passes);
      read_opt(a, "alpha", cfg.attack.alpha);
      read_opt(a, "eprl", cfg.attack.eprl);
      read_opt(a, "baum_welch", cfg.attack.baum_welch);
      read_opt(a, "seed", cfg.attack.seed);
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j.at("methods")) cfg.methods.push_back(method_from_string(m.get<std::string>()));
      if (cfg.methods.empty()) throw ConfigError("methods must not be empty");
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      read_opt(s, "lambda", cfg.sweep.lambda);
      read_opt(s, "deviation", cfg.sweep.deviation);
      read_opt(s, "gamma", cfg.sweep.gamma);
      read_opt(s, "k", cfg.sweep.k);
      read_opt(s, "delta", cfg.sweep.delta);
    }
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }

  cfg.publish.check();
  cfg.attack.lambda = cfg.publish.lambda;
  cfg.attack.check();
  cfg.preprocess.check();
  if (cfg.dataset == Dataset::kSynth) cfg.synth.check();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  const auto j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  return from_json(j);
}

std::string SweepPoint::label() const {
  return "lambda=" + fmt_short(lambda) + "_d=" + std::to_string(deviation) +
         "_gamma=" + (gamma ? std::to_string(*gamma) : std::string("auto")) +
         "_k=" + std::to_string(k) + "_delta=" + fmt_short(delta);
}

SweepPoint base_point(const ExperimentConfig& cfg) {
  return {cfg.publish.lambda, cfg.publish.deviation_d, cfg.gamma, cfg.attack.k, cfg.attack.delta};
}

PublishConfig publish_config_for(const ExperimentConfig& cfg, const SweepPoint& pt) {
  PublishConfig p;
  p.lambda = pt.lambda;
  p.deviation_d = pt.deviation;
  p.seed = derive_seed(cfg.publish.seed, "publish|lambda=" + fmt_g(pt.lambda) +
                                             "|d=" + std::to_string(pt.deviation));
  p.check();
  return p;
}

AttackConfig attack_config_for(const ExperimentConfig& cfg, const SweepPoint& pt,
                               const std::vector<PublishedTrajectory>& pubs) {
  AttackConfig a = cfg.attack;
  a.lambda = pt.lambda;
  a.k = pt.k;
  a.delta = pt.delta;
  a.gamma = pt.gamma ? *pt.gamma : required_gamma(pubs, min_region_size(pt.lambda));
  a.seed = derive_seed(cfg.attack.seed,
                       "attack|lambda=" + fmt_g(pt.lambda) + "|d=" + std::to_string(pt.deviation) +
                           "|gamma=" + std::to_string(a.gamma) + "|k=" + std::to_string(pt.k) +
                           "|delta=" + fmt_g(pt.delta));
  a.check();
  return a;
}

std::vector<PublishedTrajectory> publish_corpus(const std::vector<TrajectoryTrue>& trajs,
                                                const PublishConfig& cfg, const GridSpace& gs) {
  std::vector<PublishedTrajectory> out;
  out.reserve(trajs.size());
  for (const auto& traj : trajs) {
    validate(traj, gs);
    out.push_back(publish_trajectory(traj, cfg, gs));
    const auto& pub = out.back();
    if (!verify_privacy(pub, cfg.lambda)) {
      throw PrivacyViolation("published trajectory '" + pub.id + "' violates the privacy bound");
    }
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      if (!contains(pub.regions[i].region, traj.points[i].cell)) {
        throw PrivacyViolation("published trajectory '" + pub.id +
                               "' does not cover its true location at step " + std::to_string(i));
      }
    }
  }
  return out;
}

MethodRun run_method(Method method, const std::vector<PublishedTrajectory>& pubs,
                     const GridSpace& gs, const AttackConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  MethodRun run;
  if (method == Method::kBaseline) {
    run.predictions = baseline_attack(pubs, cfg.seed);
  } else {
    auto result = run_attack(pubs, gs, cfg);
    run.predictions = std::move(result.predictions);
    run.diagnostics = std::move(result.diagnostics);
    run.model = std::move(result.model);
  }
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

namespace {

std::vector<fs::path> collect_files(const std::vector<fs::path>& inputs, const std::string& ext) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (const auto& entry : fs::recursive_directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().extension() == ext) files.push_back(entry.path());
      }
    } else if (fs::is_regular_file(in)) {
      files.push_back(in);
    } else {
      throw MissingInputError("input " + in.string() + " does not exist");
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

json report_json(const PreprocessReport& r) {
  return json{{"tracks_in", r.tracks_in},
              {"points_in", r.points_in},
              {"points_unordered", r.points_unordered},
              {"points_subsampled", r.points_subsampled},
              {"points_out_of_box", r.points_out_of_box},
              {"segments", r.segments},
              {"segments_discarded", r.segments_discarded},
              {"trajectories_out", r.trajectories_out}};
}

}  // namespace

Corpus build_corpus(const ExperimentConfig& cfg, const std::vector<fs::path>& inputs) {
  if (cfg.dataset == Dataset::kSynth) {
    Corpus c{synth_generate(cfg.synth), cfg.synth.grid(), json::object()};
    c.report = {{"dataset", "synth"}, {"trajectories_out", c.trajectories.size()}};
    return c;
  }
  if (inputs.empty()) throw MissingInputError("no input files given");
  const GridSpace gs(cfg.lon_min, cfg.lon_max, cfg.lat_min, cfg.lat_max, cfg.cell_size_m);

  std::vector<RawTrack> tracks;
  json parse_report;
  if (cfg.dataset == Dataset::kGeolife) {
    const auto files = collect_files(inputs, ".plt");
    std::size_t skipped = 0;
    for (const auto& f : files) {
      auto parsed = parse_plt(read_text_file(f));
      skipped += parsed.skipped;
      tracks.push_back({f.stem().string(), std::move(parsed.points)});
    }
    parse_report = {{"dataset", "geolife"}, {"files", files.size()}, {"rows_skipped", skipped}};
  } else {
    const auto files = collect_files(inputs, ".csv");
    std::size_t malformed = 0, missing = 0;
    for (const auto& f : files) {
      auto parsed = parse_porto_csv(read_text_file(f));
      malformed += parsed.skipped_malformed;
      missing += parsed.dropped_missing;
      for (auto& t : parsed.tracks) tracks.push_back(std::move(t));
    }
    parse_report = {{"dataset", "porto"},
                    {"files", files.size()},
                    {"rows_malformed", malformed},
                    {"rows_missing_data", missing}};
  }
  PreprocessReport rep;
  auto trajs = preprocess(tracks, cfg.preprocess, gs, &rep);
  json report = parse_report;
  report["preprocess"] = report_json(rep);
  return {std::move(trajs), gs, std::move(report)};
}

namespace {

void write_corpus(const Corpus& c, const fs::path& out) {
  std::ostringstream ss;
  write_trajectories_jsonl(ss, c.trajectories);
  write_text_file(out / "trajectories.jsonl", ss.str());
  write_text_file(out / "grid.json", grid_to_json(c.grid).dump(2) + "\n");
  write_text_file(out / "ingest_report.json", c.report.dump(2) + "\n");
}

std::string published_text(const std::vector<PublishedTrajectory>& pubs) {
  std::ostringstream ss;
  write_published_jsonl(ss, pubs);
  return ss.str();
}

void write_predictions(const fs::path& dir, Method m, const MethodRun& run) {
  std::ostringstream preds;
  write_trajectories_jsonl(preds, run.predictions);
  write_text_file(dir / ("predictions_" + to_string(m) + ".jsonl"), preds.str());
  if (m == Method::kHmmRl) {
    std::ostringstream diag;
    write_diagnostics_csv(diag, run.diagnostics);
    write_text_file(dir / ("diagnostics_" + to_string(m) + ".csv"), diag.str());
  }
}

void write_eval(const fs::path& dir, Method m, const EvalReport& report) {
  std::ostringstream csv;
  write_eval_csv(csv, report);
  write_text_file(dir / ("eval_" + to_string(m) + ".csv"), csv.str());
  write_text_file(dir / ("eval_" + to_string(m) + ".json"), eval_to_json(report).dump(2) + "\n");
}

}  // namespace

void cmd_ingest(const ExperimentConfig& cfg, const fs::path& out, const std::vector<fs::path>& inputs) {
  write_corpus(build_corpus(cfg, inputs), out);
}

void cmd_publish(const ExperimentConfig& cfg, const fs::path& out) {
  const auto trajs = load_trajectories(out / "trajectories.jsonl");
  const auto gs = load_grid(out / "grid.json");
  const auto pubs = publish_corpus(trajs, publish_config_for(cfg, base_point(cfg)), gs);
  write_text_file(out / "published.jsonl", published_text(pubs));
}

void cmd_attack(const ExperimentConfig& cfg, const fs::path& out, Method method) {
  const auto pubs = load_published(out / "published.jsonl");
  const auto gs = load_grid(out / "grid.json");
  for (const auto& pub : pubs) validate(pub, gs);
  const auto acfg = attack_config_for(cfg, base_point(cfg), pubs);
  const auto run = run_method(method, pubs, gs, acfg);
  write_predictions(out, method, run);
  if (run.model) {
    write_text_file(out / ("model_" + to_string(method) + ".json"), model_to_json(*run.model).dump() + "\n");
  }
  std::cerr << to_string(method) << ": " << pubs.size() << " trajectories attacked in "
            << run.seconds << " s\n";
}

void cmd_evaluate(const ExperimentConfig& cfg, const fs::path& out, const std::vector<Method>& methods) {
  const auto truths = load_trajectories(out / "trajectories.jsonl");
  const auto gs = load_grid(out / "grid.json");
  const double bound = theoretical_max_error(min_region_size(cfg.publish.lambda),
                                             cfg.publish.deviation_d, gs.cell_size_m());
  std::ostringstream cmp;
  cmp << "method,A2ED_m,AMED_m,theoretical_max_m\n";
  for (Method m : methods) {
    const auto preds = load_trajectories(out / ("predictions_" + to_string(m) + ".jsonl"));
    const auto report = evaluate(truths, preds, gs.cell_size_m());
    write_eval(out, m, report);
    cmp << to_string(m) << ',' << format_number(report.a2ed_m) << ','
        << format_number(report.amed_m) << ',' << format_number(bound) << '\n';
  }
  write_text_file(out / "comparison.csv", cmp.str());
}

void cmd_sweep(const ExperimentConfig& cfg, const fs::path& out, const std::vector<fs::path>& inputs) {
  Corpus corpus = [&] {
    if (cfg.dataset != Dataset::kSynth && inputs.empty() && fs::exists(out / "trajectories.jsonl")) {
      return Corpus{load_trajectories(out / "trajectories.jsonl"), load_grid(out / "grid.json"),
                    json::object()};
    }
    auto c = build_corpus(cfg, inputs);
    write_corpus(c, out);
    return c;
  }();

  auto axis = [](auto values, auto base) {
    if (values.empty()) return decltype(values){base};
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
  };
  const SweepPoint base = base_point(cfg);
  const auto lambdas = axis(cfg.sweep.lambda, base.lambda);
  const auto devs = axis(cfg.sweep.deviation, base.deviation);
  const auto ks = axis(cfg.sweep.k, base.k);
  const auto deltas = axis(cfg.sweep.delta, base.delta);
  std::vector<std::optional<int>> gammas;
  if (cfg.sweep.gamma.empty()) {
    gammas.push_back(base.gamma);
  } else {
    for (int g : axis(cfg.sweep.gamma, 0)) gammas.push_back(g);
  }

  const double g = corpus.grid.cell_size_m();
  std::ostringstream csv;
  csv << "lambda,deviation,gamma,k,delta,method,metric,value\n";
  for (double lambda : lambdas) {
    for (int d : devs) {
      SweepPoint pub_pt = base;
      pub_pt.lambda = lambda;
      pub_pt.deviation = d;
      const auto pubs = publish_corpus(corpus.trajectories, publish_config_for(cfg, pub_pt), corpus.grid);
      for (const auto& gamma : gammas) {
        for (int k : ks) {
          for (double delta : deltas) {
            SweepPoint pt = pub_pt;
            pt.gamma = gamma;
            pt.k = k;
            pt.delta = delta;
            const auto acfg = attack_config_for(cfg, pt, pubs);
            const fs::path dir = out / "sweep" / pt.label();
            write_text_file(dir / "published.jsonl", published_text(pubs));
            const std::string prefix = fmt_short(lambda) + ',' + std::to_string(d) + ',' +
                                       std::to_string(acfg.gamma) + ',' + std::to_string(k) + ',' +
                                       fmt_short(delta) + ',';
            const double bound = theoretical_max_error(min_region_size(lambda), d, g);
            for (Method m : cfg.methods) {
              const auto run = run_method(m, pubs, corpus.grid, acfg);
              write_predictions(dir, m, run);
              const auto report = evaluate(corpus.trajectories, run.predictions, g);
              write_eval(dir, m, report);
              csv << prefix << to_string(m) << ",a2ed_m," << format_number(report.a2ed_m) << '\n'
                  << prefix << to_string(m) << ",amed_m," << format_number(report.amed_m) << '\n'
                  << prefix << to_string(m) << ",theoretical_max_m," << format_number(bound) << '\n';
            }
          }
        }
      }
    }
  }
  write_text_file(out / "sweep.csv", csv.str());
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const MissingInputError*>(&e)) return 2;
  if (dynamic_cast<const PrivacyViolation*>(&e)) return 3;
  if (dynamic_cast<const GammaTooSmallError*>(&e)) return 4;
  if (dynamic_cast<const MismatchError*>(&e)) return 5;
  return 1;
}

}  // namespace trajpriv
