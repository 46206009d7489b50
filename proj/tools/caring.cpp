// Command-line front end: stitching, metrics, generation, data and the service.

#include <csignal>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "caring/demo.hpp"
#include "caring/errors.hpp"
#include "caring/generator/dataset.hpp"
#include "caring/generator/train.hpp"
#include "caring/io.hpp"
#include "caring/metrics.hpp"
#include "caring/pipeline.hpp"
#include "caring/service.hpp"
#include "caring/smoothing.hpp"

namespace fs = std::filesystem;
using namespace caring;

namespace {

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::vector<std::size_t> parse_index_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (item.empty()) continue;
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError("boundaries", "bad frame index '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// [{"frame": f, "x_m": x, "y_m": y}, ...]
SpatialSpec load_targets(const std::string& path) {
  const auto j = parse_json_text(read_text_file(path));
  if (!j.is_array()) throw ParseError("targets: expected an array");
  SpatialSpec spec;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto p = "targets[" + std::to_string(i) + "]";
    const auto& f = require_field(j[i], "frame", p);
    if (!f.is_number_unsigned()) throw ParseError(p + ".frame: expected a non-negative integer");
    spec.targets.push_back({f.get<std::size_t>(),
                            {json_number(require_field(j[i], "x_m", p), p + ".x_m"),
                             json_number(require_field(j[i], "y_m", p), p + ".y_m")}});
  }
  return spec;
}

gen::Denoiser load_or_train(const std::string& checkpoint, int train_steps) {
  if (!checkpoint.empty() && fs::exists(checkpoint)) return gen::load_denoiser(checkpoint);
  std::cerr << "training humanoid model (" << train_steps << " steps)...\n";
  auto model = train_humanoid_denoiser(train_steps);
  if (!checkpoint.empty()) gen::save_denoiser(model, checkpoint);
  return model;
}

Service* g_service = nullptr;

void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware instruction motion tools"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // stitch
  auto* stitch_cmd = app.add_subcommand("stitch", "Join clips with sigmoid transitions");
  std::vector<std::string> stitch_in;
  std::size_t stitch_len = kDefaultBlendLength;
  std::string stitch_out;
  stitch_cmd->add_option("--in", stitch_in, "Motion files in order")->required()->expected(2, -1);
  stitch_cmd->add_option("--blend-len", stitch_len, "Transition window L in frames");
  stitch_cmd->add_option("--out", stitch_out, "Write the stitched motion here");

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Transition and spatial distances of a motion");
  std::string metrics_motion;
  std::string metrics_compare;
  std::string metrics_boundaries;
  std::string metrics_targets;
  metrics_cmd->add_option("--motion", metrics_motion, "Motion file (scored as 'after')")->required();
  metrics_cmd->add_option("--compare", metrics_compare, "Naive variant scored as 'before'");
  metrics_cmd->add_option("--boundaries", metrics_boundaries,
                          "Comma-separated first frames of each later step (default: from file)");
  metrics_cmd->add_option("--targets", metrics_targets, "JSON list of {frame, x_m, y_m}");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Run a generation plan");
  std::string gen_plan;
  std::uint64_t gen_seed = 0;
  std::string gen_ckpt;
  int gen_train_steps = 600;
  std::size_t gen_blend = kDefaultBlendLength;
  double gen_scale = 2.5;
  std::string gen_out;
  std::string gen_metrics_out;
  gen_cmd->add_option("--plan", gen_plan, "Plan file")->required();
  gen_cmd->add_option("--seed", gen_seed, "Sampling seed");
  gen_cmd->add_option("--checkpoint", gen_ckpt, "Model file; trained and saved here when missing");
  gen_cmd->add_option("--train-steps", gen_train_steps, "Training steps when no checkpoint exists");
  gen_cmd->add_option("--blend-len", gen_blend, "Transition window L in frames");
  gen_cmd->add_option("--guidance-scale", gen_scale, "Classifier-free guidance scale");
  gen_cmd->add_option("--out", gen_out, "Motion output (default stdout)");
  gen_cmd->add_option("--metrics-out", gen_metrics_out, "Metrics report output");

  // demo-data
  auto* data_cmd = app.add_subcommand("demo-data", "Write a synthetic training set");
  std::string data_task = "two-class";
  gen::SyntheticOptions data_opts;
  std::string data_out;
  data_cmd->add_option("--task", data_task, "two-class or humanoid");
  data_cmd->add_option("--n", data_opts.count, "Number of sequences");
  data_cmd->add_option("--seed", data_opts.seed, "Random seed");
  data_cmd->add_option("--frames", data_opts.frames, "Frames per sequence");
  data_cmd->add_option("--out", data_out, "Output file (default stdout)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a denoiser on synthetic data");
  std::string train_task = "two-class";
  gen::SyntheticOptions train_data;
  gen::TrainConfig train_cfg;
  std::string train_mode = "per_frame";
  std::string train_out;
  train_cmd->add_option("--task", train_task, "two-class or humanoid");
  train_cmd->add_option("--n", train_data.count, "Number of sequences");
  train_cmd->add_option("--data-seed", train_data.seed, "Dataset seed");
  train_cmd->add_option("--steps", train_cfg.steps, "Optimizer steps");
  train_cmd->add_option("--batch", train_cfg.batch, "Batch size");
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--hidden", train_cfg.hidden, "Hidden width");
  train_cmd->add_option("--seed", train_cfg.seed, "Initialization and batch seed");
  train_cmd->add_option("--mode", train_mode, "per_frame or prefix");
  train_cmd->add_option("--out", train_out, "Checkpoint path")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  ServiceConfig serve_cfg;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  std::string serve_dir = serve_cfg.data_dir.string();
  serve_cmd->add_option("--port", serve_port, "Port");
  serve_cmd->add_option("--host", serve_host, "Bind address");
  serve_cmd->add_option("--data-dir", serve_dir, "Store directory");
  serve_cmd->add_option("--train-steps", serve_cfg.train_steps, "Model training steps on first use");
  serve_cmd->add_option("--llm", serve_cfg.instruction_client, "Instruction client: mock or http");
  serve_cmd->add_option("--cors-origin", serve_cfg.cors_origin, "Allowed browser origin");

  // demo
  auto* demo_cmd = app.add_subcommand("demo", "Plan for a fixture scenario with a synthetic scan");
  std::string demo_name;
  std::string demo_out;
  std::string demo_scan_out;
  bool demo_list = false;
  demo_cmd->add_option("--scenario", demo_name, "Scenario slug, e.g. use-a-3d-printer");
  demo_cmd->add_flag("--list", demo_list, "List scenario slugs");
  demo_cmd->add_option("--out", demo_out, "Plan output (default stdout)");
  demo_cmd->add_option("--scan-out", demo_scan_out, "Also write the synthetic scan log");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stitch_cmd->parsed()) {
      std::vector<MotionClip> clips;
      for (const auto& p : stitch_in) clips.push_back(load_motion(p));
      const auto naive = concat(clips);
      const auto stitched = stitch(clips, BlendConfig{stitch_len});
      const auto spec = TransitionSpec::from_first_frames(naive.boundaries());
      const double before = transition_distance(naive, spec);
      const double after = transition_distance(stitched, spec);
      std::cout << std::setprecision(6) << "transition_distance before: " << before << " m\n"
                << "transition_distance after:  " << after << " m\n";
      if (!stitch_out.empty()) save_motion(stitched, stitch_out);
    } else if (metrics_cmd->parsed()) {
      const auto after = load_motion(metrics_motion);
      const auto before = metrics_compare.empty() ? after : load_motion(metrics_compare);
      const auto firsts =
          metrics_boundaries.empty() ? after.boundaries() : parse_index_list(metrics_boundaries);
      std::optional<SpatialSpec> spatial;
      if (!metrics_targets.empty()) spatial = load_targets(metrics_targets);
      const auto b = after.with_boundaries(firsts);
      const auto a = before.with_boundaries(firsts);
      std::cout << serialize_report(report(a, b, TransitionSpec::from_first_frames(firsts), spatial));
    } else if (gen_cmd->parsed()) {
      const auto plan = load_plan(gen_plan);
      const auto model = load_or_train(gen_ckpt, gen_train_steps);
      GenerationOptions opts;
      opts.seed = gen_seed;
      opts.blend_length = gen_blend;
      opts.guidance_scale = gen_scale;
      const auto result = run_generation(plan, model, opts);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      emit(serialize_motion(result.motion), gen_out);
      if (!gen_metrics_out.empty()) write_text_file(gen_metrics_out, serialize_report(result.report));
    } else if (data_cmd->parsed()) {
      emit(gen::to_json(gen::make_dataset(data_task, data_opts)).dump() + "\n", data_out);
    } else if (train_cmd->parsed()) {
      train_cfg.mode = gen::conditioning_mode_from_string(train_mode);
      const auto ds = gen::make_dataset(train_task, train_data);
      const auto r = gen::train(ds, train_cfg);
      std::cerr << "loss " << r.initial_loss << " -> " << r.final_loss << "\n";
      gen::save_denoiser(r.denoiser, train_out);
    } else if (serve_cmd->parsed()) {
      serve_cfg.data_dir = serve_dir;
      Service service(serve_cfg);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "serving on http://" << serve_host << ":" << serve_port << " (data in "
                << serve_dir << ")\n";
      service.listen(serve_host, serve_port);
      g_service = nullptr;
    } else if (demo_cmd->parsed()) {
      if (demo_list) {
        for (const auto& s : scenarios()) std::cout << s.slug << "\t" << s.task << "\n";
        return 0;
      }
      if (demo_name.empty()) throw ValidationError("scenario", "pass --scenario or --list");
      const auto& sc = find_scenario(demo_name);
      const auto project = demo_project(sc);
      if (!demo_scan_out.empty()) write_text_file(demo_scan_out, serialize_scan_log(demo_scan_log(sc)));
      const auto plan = compile_plan(project);
      for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
      emit(to_json(plan).dump(2) + "\n", demo_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
