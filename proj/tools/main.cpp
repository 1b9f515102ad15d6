// Copyright 2026 The hgens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "hgens/config.hpp"
#include "hgens/dataset_io.hpp"
#include "hgens/error.hpp"
#include "hgens/gradcheck.hpp"
#include "hgens/gradflow.hpp"
#include "hgens/model.hpp"
#include "hgens/scaling.hpp"
#include "hgens/synth.hpp"
#include "hgens/trainer.hpp"
#include "table.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hgens::cli {
namespace {

struct Common {
  std::string data;
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t threads = 1;
  bool threads_set = false;
  std::string format = "both";  // json | table | both
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--data", c.data, "dataset directory (HGT format)");
  sub->add_option("--config", c.config, "JSON config file");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { c.seed = s; c.seed_set = true; }, "seed");
  sub->add_option_function<std::size_t>("--threads", [&](std::size_t t) { c.threads = t; c.threads_set = true; },
                                        "worker threads");
  sub->add_option("--format", c.format, "json, table or both")->check(CLI::IsMember({"json", "table", "both"}));
  sub->allow_extras();
}

/// Unrecognized "--key=value" arguments become config overrides.
std::vector<std::string> overrides_of(const CLI::App* sub) {
  std::vector<std::string> out;
  for (const auto& arg : sub->remaining()) {
    if (arg.rfind("--", 0) != 0 || arg.find('=') == std::string::npos) {
      throw ValidationError("unexpected argument '" + arg + "' (overrides take the form --key=value)");
    }
    out.push_back(arg.substr(2));
  }
  return out;
}

TrainConfig train_config(const Common& c, const CLI::App* sub) {
  auto ovs = overrides_of(sub);
  if (c.seed_set) ovs.push_back("seed=" + std::to_string(c.seed));
  if (c.threads_set) ovs.push_back("threads=" + std::to_string(c.threads));
  auto cfg = load_config(c.config, ovs);
  validate_config(cfg);
  return cfg;
}

HeterogeneousGraph need_data(const Common& c) {
  if (c.data.empty()) throw ValidationError("--data is required");
  return load_dataset(c.data);
}

void emit(const Common& c, const json& j, const Table* table) {
  if (table && c.format != "json") table->print(c.format == "table" ? stdout : stderr);
  if (c.format != "table") std::printf("%s\n", j.dump(2).c_str());
}

void write_json(const fs::path& file, const json& j) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << j.dump(2) << "\n";
}

std::string g17(double v) { return fmt_double(v, "%.17g"); }

// ---------------------------------------------------------------------------

int cmd_ingest(const Common& c) {
  if (c.data.empty()) throw ValidationError("--data is required");
  const auto g = load_dataset(c.data);
  json j;
  j["ok"] = true;
  j["num_nodes"] = g.num_nodes();
  j["num_edges"] = g.num_edges();
  j["num_classes"] = g.num_classes;
  j["target_type"] = g.node_types[g.target_type].name;
  Table t({"node type", "count", "feature dim"});
  for (const auto& nt : g.node_types) {
    j["node_types"].push_back({{"name", nt.name}, {"count", nt.count}, {"feature_dim", nt.features.cols()}});
    t.add({nt.name, std::to_string(nt.count), std::to_string(nt.features.cols())});
  }
  for (const auto& et : g.edge_types) {
    j["edge_types"].push_back({{"name", et.name},
                               {"src_type", g.node_types[et.src_type].name},
                               {"dst_type", g.node_types[et.dst_type].name},
                               {"edges", et.edges.size()},
                               {"undirected", et.undirected}});
  }
  for (auto s : {Split::kTrain, Split::kVal, Split::kTest}) j["splits"][std::string(split_name(s))] = g.split_ids(s).size();
  std::vector<std::string> rels;
  for (const auto& r : default_metapath_relations(g)) rels.push_back(r.name);
  j["default_relations"] = rels;
  emit(c, j, &t);
  return 0;
}

SynthConfig synth_config(const Common& c, const CLI::App* sub) {
  json j = json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) throw ValidationError("cannot open config " + c.config);
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError("config " + c.config + ": " + e.what());
    }
  }
  for (const auto& ov : overrides_of(sub)) {
    const auto eq = ov.find('=');
    std::string key = ov.substr(0, eq);
    std::replace(key.begin(), key.end(), '-', '_');
    try {
      j[key] = json::parse(ov.substr(eq + 1));
    } catch (const json::exception&) {
      throw ValidationError("override '" + ov + "': value must be a number");
    }
  }
  if (c.seed_set) j["seed"] = c.seed;
  try {
    auto s = synth_config_from_json(j);
    validate_synth_config(s);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synth config: ") + e.what());
  }
}

int cmd_synth(const Common& c, const CLI::App* sub) {
  if (c.out.empty()) throw ValidationError("--out is required");
  const auto sc = synth_config(c, sub);
  const auto g = generate_synthetic(sc);
  export_dataset(g, c.out);
  json j{{"out", c.out}, {"config", synth_config_to_json(sc)}, {"num_nodes", g.num_nodes()}, {"num_edges", g.num_edges()}};
  Table t({"key", "value"});
  t.add({"out", c.out});
  t.add({"nodes", std::to_string(g.num_nodes())});
  t.add({"edges", std::to_string(g.num_edges())});
  emit(c, j, &t);
  return 0;
}

json metrics_json(const std::vector<EpochMetrics>& ms) {
  json arr = json::array();
  for (const auto& m : ms) {
    arr.push_back({{"epoch", m.epoch}, {"train_loss", m.train_loss}, {"ce", m.ce},
                   {"diversity", m.diversity}, {"val_acc", m.val_acc}, {"test_acc", m.test_acc}});
  }
  return arr;
}

void write_metrics_csv(const fs::path& file, const std::vector<EpochMetrics>& ms) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  out << "epoch,train_loss,ce,diversity,val_acc,test_acc\n";
  for (const auto& m : ms) {
    out << m.epoch << ',' << g17(m.train_loss) << ',' << g17(m.ce) << ',' << g17(m.diversity) << ','
        << g17(m.val_acc) << ',' << g17(m.test_acc) << '\n';
  }
}

int cmd_train(const Common& c, const CLI::App* sub) {
  const auto cfg = train_config(c, sub);
  const auto g = need_data(c);
  if (c.out.empty()) throw ValidationError("--out is required");
  fs::create_directories(c.out);
  const fs::path dir = c.out;
  write_json(dir / "config.json", config_to_json(cfg));

  const auto t0 = std::chrono::steady_clock::now();
  const auto run = train(cfg, g, TrainHooks{[&](const EpochMetrics& m) {
    if (c.format != "json") {
      std::fprintf(stderr, "epoch %4zu  loss %.6f  ce %.6f  div %.4g  val %.4f  test %.4f\n", m.epoch,
                   m.train_loss, m.ce, m.diversity, m.val_acc, m.test_acc);
    }
  }});
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;

  write_metrics_csv(dir / "metrics.csv", run.metrics);
  write_json(dir / "metrics.json", metrics_json(run.metrics));
  save_params(dir / "best_model.bin", run.best);
  json rep{{"seed", cfg.seed},
           {"epochs_run", run.metrics.size()},
           {"best_epoch", run.best_epoch},
           {"best_val_acc", run.best_val_acc},
           {"test_acc", run.test_acc},
           {"parameters", parameter_count(run.best)},
           {"wall_seconds", dt.count()}};
  write_json(dir / "report.json", rep);
  Table t({"key", "value"});
  t.add({"best epoch", std::to_string(run.best_epoch)});
  t.add({"best val acc", fmt_double(run.best_val_acc, "%.4f")});
  t.add({"test acc", fmt_double(run.test_acc, "%.4f")});
  emit(c, rep, &t);
  return 0;
}

int cmd_eval(const Common& c, const std::string& run_dir, const std::string& split_text) {
  if (run_dir.empty()) throw ValidationError("--run is required");
  Split split;
  if (!parse_split(split_text, split)) throw ValidationError("unknown split '" + split_text + "'");
  const auto g = need_data(c);
  auto cfg = load_config(fs::path(run_dir) / "config.json");
  if (c.threads_set) cfg.threads = c.threads;
  const auto pipe = make_pipeline(cfg, g);
  auto params = init_model(cfg, pipe);
  load_params(fs::path(run_dir) / "best_model.bin", params);
  const double acc = evaluate_run(params, cfg, pipe, split);
  json j{{"split", split_text}, {"accuracy", acc}, {"eval_seed", cfg.eval_seed}};
  Table t({"split", "accuracy"});
  t.add({split_text, fmt_double(acc, "%.4f")});
  emit(c, j, &t);
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoull(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("bad seed '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError("--seeds is empty");
  return out;
}

int cmd_ablate(const Common& c, const CLI::App* sub, const std::string& mode_text, const std::string& seeds_text) {
  const auto cfg = train_config(c, sub);
  const auto g = need_data(c);
  const auto mode = parse_ablation(mode_text);
  const auto rep = run_ablation(mode, cfg, g, parse_seeds(seeds_text));
  json j{{"mode", rep.mode}, {"seeds", rep.seeds}, {"full", rep.full}, {"variant", rep.variant},
         {"full_mean", mean(rep.full)}, {"variant_mean", mean(rep.variant)},
         {"full_variance", variance(rep.full)}, {"variant_variance", variance(rep.variant)}};
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(fs::path(c.out) / "ablation.json", j);
  }
  Table t({"seed", "full", rep.mode});
  for (std::size_t i = 0; i < rep.seeds.size(); ++i) {
    t.add({std::to_string(rep.seeds[i]), fmt_double(rep.full[i], "%.4f"), fmt_double(rep.variant[i], "%.4f")});
  }
  t.add({"mean", fmt_double(mean(rep.full), "%.4f"), fmt_double(mean(rep.variant), "%.4f")});
  emit(c, j, &t);
  return 0;
}

int cmd_gradcheck(const Common& c, double eps, double tol, bool unfrozen) {
  GradCheckOptions o;
  o.eps = eps;
  o.tol = tol;
  o.freeze_dropout = !unfrozen;
  const auto rep = run_gradcheck(c.seed_set ? c.seed : 7, o);
  json j{{"seed", rep.seed}, {"eps", rep.eps}, {"tol", rep.tol}, {"num_scalars", rep.num_scalars},
         {"max_rel_err", rep.max_rel_err}, {"worst_param", rep.worst_param}, {"pass", rep.pass}};
  Table t({"parameter", "count", "max rel err", "row", "col", "analytic", "numeric"});
  for (const auto& p : rep.params) {
    j["params"].push_back({{"name", p.name}, {"count", p.count}, {"max_rel_err", p.max_rel_err},
                           {"row", p.row}, {"col", p.col}, {"analytic", p.analytic}, {"numeric", p.numeric}});
    t.add({p.name, std::to_string(p.count), fmt_double(p.max_rel_err, "%.3e"), std::to_string(p.row),
           std::to_string(p.col), fmt_double(p.analytic, "%.6e"), fmt_double(p.numeric, "%.6e")});
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(fs::path(c.out) / "gradcheck.json", j);
  }
  emit(c, j, &t);
  return rep.pass ? 0 : 2;
}

json flow_json(const GradFlowReport& r) {
  return {{"k", r.k},
          {"spread", r.spread},
          {"theta", r.theta},
          {"normalized", r.normalized},
          {"min_source", r.min_source},
          {"norm_with_residual", r.norm_with},
          {"norm_without_residual", r.norm_without},
          {"second_term", r.second_term},
          {"min_source_with_residual", r.norm_with[r.min_source]},
          {"min_source_without_residual", r.norm_without[r.min_source]}};
}

int cmd_gradflow(const Common& c, std::size_t k, double spread, std::size_t d) {
  const auto r = vanishing_scenario(k, spread, d);
  const json j = flow_json(r);
  Table t({"source", "theta~", "with residual", "without residual", "score term"});
  for (std::size_t i = 0; i < r.k; ++i) {
    t.add({std::to_string(i) + (i == r.min_source ? " (min)" : ""), fmt_double(r.normalized[i], "%.4f"),
           fmt_double(r.norm_with[i], "%.6e"), fmt_double(r.norm_without[i], "%.6e"),
           fmt_double(r.second_term[i], "%.6e")});
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(fs::path(c.out) / "gradflow.json", j);
  }
  emit(c, j, &t);
  return 0;
}

int cmd_scaling(const Common& c, const CLI::App* sub, const std::string& sizes_text, std::size_t epochs) {
  auto cfg = train_config(c, sub);
  SynthConfig sc;
  if (c.seed_set) sc.seed = c.seed;
  std::vector<std::size_t> sizes;
  for (auto s : parse_seeds(sizes_text)) sizes.push_back(static_cast<std::size_t>(s));
  const auto rep = run_scaling(sizes, cfg, sc, epochs);
  json j{{"slope", rep.slope}, {"intercept", rep.intercept}, {"work_slope", rep.work_slope}};
  Table t({"edges requested", "|V|+|E|", "mean epoch s", "sampled nodes"});
  for (const auto& p : rep.points) {
    j["points"].push_back({{"requested_edges", p.requested_edges}, {"num_nodes", p.num_nodes},
                           {"num_edges", p.num_edges}, {"size", p.size},
                           {"mean_epoch_seconds", p.mean_epoch_seconds}, {"epochs", p.epochs},
                           {"sampled_nodes", p.sampled_nodes}});
    t.add({std::to_string(p.requested_edges), fmt_double(p.size, "%.0f"), fmt_double(p.mean_epoch_seconds, "%.4f"),
           fmt_double(p.sampled_nodes, "%.0f")});
  }
  t.add({"slope", fmt_double(rep.slope, "%.3f"), "", fmt_double(rep.work_slope, "%.3f")});
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_json(fs::path(c.out) / "scaling.json", j);
  }
  emit(c, j, &t);
  return 0;
}

}  // namespace
}  // namespace hgens::cli

int main(int argc, char** argv) {
  using namespace hgens::cli;
  CLI::App app{"Heterogeneous graph ensemble learning"};
  app.require_subcommand(1);
  Common c;

  auto* ingest = app.add_subcommand("ingest", "load and validate a dataset directory");
  add_common(ingest, c);
  auto* synth = app.add_subcommand("synth", "write a planted-partition synthetic dataset");
  add_common(synth, c);
  auto* train = app.add_subcommand("train", "train a model and write a run directory");
  add_common(train, c);
  auto* eval = app.add_subcommand("eval", "evaluate a run directory's best snapshot");
  add_common(eval, c);
  std::string run_dir, split = "test";
  eval->add_option("--run", run_dir, "run directory written by train");
  eval->add_option("--split", split, "train, val or test");
  auto* ablate = app.add_subcommand("ablate", "paired full-vs-variant runs over seeds");
  add_common(ablate, c);
  std::string mode, seeds = "0,1,2,3,4";
  ablate->add_option("--mode", mode, "softmax, minmax_noreg, naive_weighting, single_group:i, single_batchsize:b")
      ->required();
  ablate->add_option("--seeds", seeds, "comma separated seeds");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check on the tiny model");
  add_common(gradcheck, c);
  double eps = 1e-5, tol = 1e-4;
  bool unfrozen = false;
  gradcheck->add_option("--eps", eps, "central difference step");
  gradcheck->add_option("--tol", tol, "relative error tolerance");
  gradcheck->add_flag("--unfreeze-dropout", unfrozen, "re-draw dropout masks per evaluation (negative control)");
  auto* gradflow = app.add_subcommand("gradflow", "intermediate-gradient analysis of the residual fusion");
  add_common(gradflow, c);
  std::size_t k = 4, dim = 2;
  double spread = 1e6;
  gradflow->add_option("--k", k, "number of sources");
  gradflow->add_option("--spread", spread, "raw attention spread");
  gradflow->add_option("--dim", dim, "embedding dimension");
  auto* scaling = app.add_subcommand("scaling", "epoch time against graph size");
  add_common(scaling, c);
  std::string sizes = "10000,30000,100000";
  std::size_t epochs = 3;
  scaling->add_option("--sizes", sizes, "comma separated edge counts");
  scaling->add_option("--epochs", epochs, "timed epochs per size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(c);
    if (*synth) return cmd_synth(c, synth);
    if (*train) return cmd_train(c, train);
    if (*eval) return cmd_eval(c, run_dir, split);
    if (*ablate) return cmd_ablate(c, ablate, mode, seeds);
    if (*gradcheck) return cmd_gradcheck(c, eps, tol, unfrozen);
    if (*gradflow) return cmd_gradflow(c, k, spread, dim);
    if (*scaling) return cmd_scaling(c, scaling, sizes, epochs);
  } catch (const hgens::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
