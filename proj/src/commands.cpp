// Copyright 2026 the micarray authors
// SPDX-License-Identifier: Apache-2.0

#include "micarray/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "micarray/eval.hpp"
#include "micarray/io.hpp"
#include "micarray/pipeline.hpp"
#include "micarray/rng.hpp"
#include "micarray/splits.hpp"

namespace micarray::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Published reference results from the original hardware study; recorded in
// reports as context only, since synthetic runs are not comparable.
json reference_context() {
  return json{
      {"note",
       "Reference results measured on the original hardware; synthetic-data "
       "runs are not expected to reproduce them."},
      {"texture_accuracy_5fold", 0.773},
      {"texture_accuracy_excluding_slowest", 0.842},
      {"localization_mean_median_mm", {1.8, 1.5}},
      {"snr_baseline_mean_median_mm", {5.5, 5.3}},
      {"velocity_median_mm_s_by_history",
       {{"0.05", 5.1}, {"0.10", 4.5}, {"0.25", 5.3}}},
      {"velocity_from_position_median_mm_s", 9.7},
      {"response_time_range_ms", {2.6, 5.1}}};
}

const std::vector<std::string> kClassNames{"a", "b", "c", "d"};

void write_episode_and_register(const fs::path& dir, const DragEpisode& ep,
                                io::Manifest& manifest) {
  const std::string filename = ep.episode_id + ".mep";
  const fs::path file = dir / filename;
  io::write_episode(file, ep);
  io::ManifestEntry entry;
  entry.episode_id = ep.episode_id;
  entry.path = filename;
  entry.texture = to_string(ep.texture);
  entry.nominal_velocity_mm_s = ep.nominal_velocity_mm_s;
  entry.kind = to_string(ep.kind);
  entry.seed = ep.rng_seed;
  entry.sample_rate_hz = ep.sample_rate_hz;
  entry.sha256 = io::sha256_file(file);
  manifest.episodes.push_back(std::move(entry));
}

harness::SplitPlan build_plan(const pipeline::WindowDataset& ds,
                              const io::RunConfig& rc) {
  harness::SplitPlan plan;
  if (rc.split == "held-out-velocity") {
    plan = harness::make_held_out_velocity_splits(ds, {20, 30, 40, 50, 60}, 0.1,
                                                  rc.seed);
  } else {
    plan = harness::make_velocity_cv_splits(ds, 10, 0.1, rc.seed);
  }
  harness::check_split_hygiene(ds, plan);
  return plan;
}

fs::path checkpoint_path(const fs::path& run_dir, int fold) {
  return run_dir / ("checkpoint_fold" + std::to_string(fold) + ".ckpt");
}

}  // namespace

std::string default_output_root() {
  if (const char* env = std::getenv("MICARRAY_OUT")) return env;
  return "micarray-out";
}

void cmd_simulate(const SimulateArgs& args) {
  const fs::path dir = args.out_dir.empty()
                           ? fs::path(default_output_root()) / "episodes"
                           : fs::path(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory " + dir.string());
  }

  const SensorLayout layout = build_layout();
  io::Manifest manifest;
  manifest.layout = layout;

  int64_t count = 0;
  if (args.kind == "drag") {
    const int per_cell = args.paper_scale ? 200 : args.drags_per_cell;
    struct Job {
      TextureSpec texture;
      double velocity;
      uint64_t seed;
    };
    std::vector<Job> jobs;
    uint64_t index = 0;
    for (const auto& tex_name : args.textures) {
      const TextureSpec spec = texture_spec(texture_from_string(tex_name));
      for (const double v : args.velocities) {
        for (int k = 0; k < per_cell; ++k) {
          jobs.push_back({spec, v, Rng::mix(args.seed, index++)});
        }
      }
    }

    constexpr size_t kChunk = 64;
    std::vector<DragEpisode> episodes(std::min(kChunk, jobs.size()));
    for (size_t base = 0; base < jobs.size(); base += kChunk) {
      const size_t n = std::min(kChunk, jobs.size() - base);
      nn::detail::parallel_for(static_cast<int>(n), [&](int i) {
        const Job& job = jobs[base + i];
        episodes[i] = sim::simulate_drag(layout, job.texture, job.velocity,
                                         job.seed);
      });
      for (size_t i = 0; i < n; ++i) {
        write_episode_and_register(dir, episodes[i], manifest);
        ++count;
      }
    }
  } else if (args.kind == "tap") {
    const Vec2 ref = layout.mic_positions[args.reference_mic];
    Vec2 toward_center = -ref;
    if (toward_center.norm() < 1e-12) toward_center = Vec2(1, 0);
    toward_center.normalize();
    for (const double d : args.tap_distances) {
      for (const double v : args.tap_velocities) {
        for (int k = 0; k < args.taps_per_cell; ++k) {
          const uint64_t seed = Rng::mix(
              args.seed, static_cast<uint64_t>(d * 1000.0) * 1000 + k);
          DragEpisode ep =
              sim::simulate_tap(layout, ref + d * toward_center, v, seed);
          // Distance is encoded in the id to keep grid cells distinguishable.
          std::ostringstream id;
          id << "tap_d" << d << "_v" << v << "_k" << k << "_s" << seed;
          ep.episode_id = id.str();
          write_episode_and_register(dir, ep, manifest);
          ++count;
        }
      }
    }
  } else {
    throw std::invalid_argument("simulate: kind must be drag or tap");
  }

  io::write_manifest(dir / "manifest.json", manifest);
  if (!args.quiet) {
    std::cout << "wrote " << count << " episodes to " << dir.string() << "\n";
  }
}

void cmd_preprocess(const PreprocessArgs& args) {
  const io::Manifest manifest = io::read_manifest(args.manifest_path);
  const int window_len =
      args.window_len > 0 ? args.window_len : io::default_window_len(args.task);

  pipeline::WindowDataset ds;
  ds.task = args.task;
  ds.window_len = window_len;
  ds.offset = args.offset;
  ds.layout = manifest.layout;

  pipeline::PipelineConfig pc;
  int64_t episodes_used = 0;
  for (const auto& entry : manifest.episodes) {
    if (entry.kind != "drag") continue;
    const DragEpisode ep = io::load_manifest_episode(args.manifest_path, entry,
                                                     args.verify_hash);
    if (ds.sample_rate_hz == 0.0) ds.sample_rate_hz = ep.sample_rate_hz;
    if (ep.sample_rate_hz != ds.sample_rate_hz) {
      throw DataError("mixed sample rates in manifest");
    }
    pipeline::extract_windows(ep, window_len, args.offset, pc, ds);
    ++episodes_used;
  }

  const fs::path out = args.out_path.empty()
                           ? fs::path(default_output_root()) /
                                 ("windows_" + args.task + ".mwd")
                           : fs::path(args.out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  io::write_window_dataset(out, ds);

  if (!args.quiet) {
    std::cout << "task=" << args.task << " window=" << window_len
              << " offset=" << args.offset << " episodes=" << episodes_used
              << " drags=" << ds.drags.size() << " windows=" << ds.samples.size()
              << " -> " << out.string() << "\n";
  }
  if (manifest.episodes.empty() && !args.quiet) {
    std::cout << "warning: empty manifest, wrote an empty dataset\n";
  }
}

void cmd_train(const TrainArgs& args) {
  pipeline::WindowDataset ds = io::read_window_dataset(args.dataset_path);

  io::RunConfig rc = args.run;
  if (rc.task.empty()) rc.task = ds.task;
  rc.hyper.max_epochs = rc.hyper.max_epochs > 0 ? rc.hyper.max_epochs : 0;
  rc.window_len = ds.window_len;
  rc.apply_task_defaults();
  rc.model.window_len = ds.window_len;
  rc.hyper.seed = rc.seed;
  rc.model.init_seed = rc.seed;
  rc.fold = args.fold;
  rc.dataset_path = args.dataset_path;
  rc.validate();

  const fs::path run_dir = rc.out_dir.empty()
                               ? fs::path(default_output_root()) /
                                     ("run_" + rc.task)
                               : fs::path(rc.out_dir);
  fs::create_directories(run_dir);
  rc.out_dir = run_dir.string();

  const harness::SplitPlan plan = build_plan(ds, rc);
  std::vector<int> folds;
  if (args.fold >= 0) {
    if (args.fold >= static_cast<int>(plan.folds.size())) {
      throw DataError("fold " + std::to_string(args.fold) +
                      " out of range (plan has " +
                      std::to_string(plan.folds.size()) + ")");
    }
    folds.push_back(args.fold);
  } else {
    for (int k = 0; k < static_cast<int>(plan.folds.size()); ++k) {
      folds.push_back(k);
    }
  }

  io::save_run_config((run_dir / "run_config.json").string(), rc);
  for (const int k : folds) {
    const nn::FoldIndices idx = harness::fold_window_indices(ds, plan.folds[k]);
    if (!args.quiet) {
      std::cout << "fold " << k << ": train=" << idx.train.size()
                << " val=" << idx.val.size() << " test=" << idx.test.size()
                << "\n";
    }
    const nn::TrainResult result = nn::train(
        rc.model, ds, idx, rc.hyper,
        args.quiet ? std::function<void(int, double, double)>{}
                   : [&](int epoch, double tl, double vl) {
                       std::cout << "  epoch " << epoch << " train " << tl
                                 << " val " << vl << "\n";
                     });
    io::Checkpoint ckpt{rc.model, result.params, rc.seed};
    io::save_checkpoint(checkpoint_path(run_dir, k), ckpt);
    io::write_curves_csv(run_dir / ("curves_fold" + std::to_string(k) + ".csv"),
                         result.curves);
  }
  if (!args.quiet) {
    std::cout << "run written to " << run_dir.string() << "\n";
  }
}

namespace {

json texture_fold_json(int fold, const harness::Fold& fold_def,
                       const harness::TextureEval& ev) {
  json confusion = json::array();
  for (int r = 0; r < 4; ++r) {
    confusion.push_back({ev.confusion(r, 0), ev.confusion(r, 1),
                         ev.confusion(r, 2), ev.confusion(r, 3)});
  }
  json j{{"fold", fold},
         {"accuracy", ev.accuracy},
         {"adjacency_share_of_errors", ev.adjacency_share},
         {"test_windows", ev.total},
         {"confusion", std::move(confusion)}};
  if (fold_def.held_out_velocity_mm_s) {
    j["held_out_velocity_mm_s"] = *fold_def.held_out_velocity_mm_s;
  }
  return j;
}

json velocity_eval_json(const harness::VelocityEval& ev) {
  json bins = json::array();
  for (const auto& b : ev.bins) {
    bins.push_back({{"bin_mm_s", b.bin_mm_s},
                    {"mean_mm_s", b.mean},
                    {"median_mm_s", b.median},
                    {"count", b.count}});
  }
  return json{{"history_s", ev.history_s},
              {"overall_mean_mm_s", ev.overall_mean},
              {"overall_median_mm_s", ev.overall_median},
              {"count", ev.count},
              {"bins", std::move(bins)}};
}

}  // namespace

void cmd_eval(const EvalArgs& args) {
  const fs::path run_dir(args.run_dir);
  io::RunConfig rc = io::load_run_config((run_dir / "run_config.json").string());
  const std::string dataset_path =
      args.dataset_path.empty() ? rc.dataset_path : args.dataset_path;
  pipeline::WindowDataset ds = io::read_window_dataset(dataset_path);
  const harness::SplitPlan plan = build_plan(ds, rc);

  json report{{"task", rc.task},
              {"window_len", rc.window_len},
              {"history_s", rc.window_len / ds.sample_rate_hz},
              {"split", rc.split},
              {"seed", rc.seed},
              {"folds", json::array()},
              {"reference_context", reference_context()}};
  std::ostringstream csv;

  // Velocity baseline (position-model derivative) when a position run is
  // supplied.
  std::optional<io::Checkpoint> pos_ckpt;
  if (!args.position_run_dir.empty()) {
    for (int k = 0; k < 10; ++k) {
      const fs::path p = checkpoint_path(args.position_run_dir, k);
      if (fs::exists(p)) {
        pos_ckpt = io::load_checkpoint(p);
        break;
      }
    }
    if (!pos_ckpt) {
      throw DataError("no checkpoint found in position run " +
                      args.position_run_dir);
    }
  }

  double accuracy_sum = 0.0;
  int evaluated = 0;
  if (rc.task == "texture") csv << "fold,held_out_velocity,accuracy,test_windows\n";
  if (rc.task == "localize") {
    csv << "fold,held_out_velocity,mean_mm,median_mm,baseline_mean_mm,"
           "baseline_median_mm,test_windows\n";
  }
  if (rc.task == "velocity") {
    csv << "fold,bin_mm_s,mean_mm_s,median_mm_s,count\n";
  }

  for (int k = 0; k < static_cast<int>(plan.folds.size()); ++k) {
    const fs::path ckpt_path = checkpoint_path(run_dir, k);
    if (!fs::exists(ckpt_path)) continue;
    const io::Checkpoint ckpt = io::load_checkpoint(ckpt_path);
    const nn::FoldIndices idx = harness::fold_window_indices(ds, plan.folds[k]);
    const auto& fold_def = plan.folds[k];

    if (rc.task == "texture") {
      const harness::TextureEval ev =
          harness::eval_texture(ckpt.config, ckpt.params, ds, idx.test);
      report["folds"].push_back(texture_fold_json(k, fold_def, ev));
      io::write_confusion_svg(
          run_dir / ("confusion_fold" + std::to_string(k) + ".svg"),
          ev.confusion, kClassNames);
      csv << k << ","
          << (fold_def.held_out_velocity_mm_s ? *fold_def.held_out_velocity_mm_s
                                              : 0.0)
          << "," << ev.accuracy << "," << ev.total << "\n";
      accuracy_sum += ev.accuracy;
    } else if (rc.task == "localize") {
      const harness::LocalizationEval ev =
          harness::eval_localization(ckpt.config, ckpt.params, ds, idx.test);
      const harness::LocalizationEval base =
          harness::eval_snr_baseline(ds.layout, ds, idx.test);
      json j{{"fold", k},
             {"mean_mm", ev.mean_mm},
             {"median_mm", ev.median_mm},
             {"count", ev.count},
             {"snr_baseline",
              {{"mean_mm", base.mean_mm}, {"median_mm", base.median_mm}}}};
      if (fold_def.held_out_velocity_mm_s) {
        j["held_out_velocity_mm_s"] = *fold_def.held_out_velocity_mm_s;
      }
      report["folds"].push_back(std::move(j));
      csv << k << ","
          << (fold_def.held_out_velocity_mm_s ? *fold_def.held_out_velocity_mm_s
                                              : 0.0)
          << "," << ev.mean_mm << "," << ev.median_mm << "," << base.mean_mm
          << "," << base.median_mm << "," << ev.count << "\n";
    } else if (rc.task == "velocity") {
      const double history = rc.window_len / ds.sample_rate_hz;
      const harness::VelocityEval ev = harness::eval_velocity(
          ckpt.config, ckpt.params, ds, idx.test, history);
      json j{{"fold", k}, {"direct", velocity_eval_json(ev)}};
      if (pos_ckpt && rc.window_len == 200) {
        const harness::VelocityEval base = harness::eval_velocity_baseline(
            pos_ckpt->config, pos_ckpt->params, ds, idx.test);
        j["position_derivative_baseline"] = velocity_eval_json(base);
      }
      report["folds"].push_back(std::move(j));
      for (const auto& b : ev.bins) {
        csv << k << "," << b.bin_mm_s << "," << b.mean << "," << b.median << ","
            << b.count << "\n";
      }
    }
    ++evaluated;
  }

  if (evaluated == 0) {
    throw DataError("no checkpoints found in " + run_dir.string() +
                    "; run the train command first");
  }
  if (rc.task == "texture") {
    report["mean_accuracy"] = accuracy_sum / evaluated;
  }
  io::write_text_file(run_dir / "report.json", report.dump(2) + "\n");
  io::write_text_file(run_dir / "report.csv", csv.str());
  if (!args.quiet) {
    std::cout << "evaluated " << evaluated << " fold(s); report in "
              << run_dir.string() << "\n";
  }
}

void cmd_detect(const DetectArgs& args) {
  const fs::path dir = args.out_dir.empty()
                           ? fs::path(default_output_root()) / "detect"
                           : fs::path(args.out_dir);
  fs::create_directories(dir);

  detect::StudyTable table;
  if (!args.manifest_path.empty()) {
    const io::Manifest manifest = io::read_manifest(args.manifest_path);
    const SensorLayout layout = manifest.layout;
    const Vec2 ref = layout.mic_positions[args.study.reference_mic];

    std::map<std::pair<double, double>, std::vector<double>> cells;
    int64_t taps = 0;
    for (const auto& entry : manifest.episodes) {
      if (entry.kind != "tap") continue;
      const DragEpisode ep =
          io::load_manifest_episode(args.manifest_path, entry, true);
      detect::TapMeasurement m = detect::measure_tap(
          ep, args.study.reference_mic, args.study.mic_threshold_counts,
          args.study.mic_history);
      const double dist =
          std::round((ep.meta.tap_location_mm - ref).norm() * 10.0) / 10.0;
      m.distance_mm = dist;
      m.velocity_mm_s = ep.meta.approach_velocity_mm_s;
      cells[{m.velocity_mm_s, dist}].push_back(
          m.response_ms ? *m.response_ms
                        : std::numeric_limits<double>::quiet_NaN());
      table.measurements.push_back(std::move(m));
      ++taps;
    }
    if (taps == 0) throw DataError("no tap episodes in manifest");

    std::set<double> dists, vels;
    for (const auto& [key, _] : cells) {
      vels.insert(key.first);
      dists.insert(key.second);
    }
    table.distances_mm.assign(dists.begin(), dists.end());
    table.velocities_mm_s.assign(vels.begin(), vels.end());
    for (const double v : table.velocities_mm_s) {
      for (const double d : table.distances_mm) {
        detect::StudyCell cell;
        cell.distance_mm = d;
        cell.velocity_mm_s = v;
        const auto it = cells.find({v, d});
        if (it != cells.end()) {
          cell.episodes = static_cast<int>(it->second.size());
          std::vector<double> ok;
          for (const double r : it->second) {
            if (std::isfinite(r)) ok.push_back(r);
          }
          cell.detected = static_cast<int>(ok.size());
          cell.detection_rate =
              cell.episodes > 0
                  ? static_cast<double>(cell.detected) / cell.episodes
                  : 0.0;
          if (cell.detection_rate >= args.study.detection_rate_floor &&
              !ok.empty()) {
            cell.reported = true;
            double mean = 0.0;
            for (const double r : ok) mean += r;
            mean /= ok.size();
            double var = 0.0;
            for (const double r : ok) var += (r - mean) * (r - mean);
            cell.mean_ms = mean;
            cell.std_ms = ok.size() > 1 ? std::sqrt(var / (ok.size() - 1)) : 0.0;
          }
        }
        table.cells.push_back(cell);
      }
    }
  } else {
    const SensorLayout layout = build_layout();
    table = detect::response_time_study(layout, args.study);
  }

  io::write_study_csv(dir / "response_time.csv", table);

  json cells_json = json::array();
  for (const auto& cell : table.cells) {
    cells_json.push_back({{"velocity_mm_s", cell.velocity_mm_s},
                          {"distance_mm", cell.distance_mm},
                          {"episodes", cell.episodes},
                          {"detected", cell.detected},
                          {"detection_rate", cell.detection_rate},
                          {"reported", cell.reported},
                          {"mean_ms", cell.mean_ms},
                          {"std_ms", cell.std_ms},
                          {"formatted", cell.format()}});
  }
  const json report{{"task", "detect"},
                    {"distances_mm", table.distances_mm},
                    {"velocities_mm_s", table.velocities_mm_s},
                    {"cells", std::move(cells_json)},
                    {"reference_context", reference_context()}};
  io::write_text_file(dir / "response_time.json", report.dump(2) + "\n");

  std::ostringstream events;
  events << "episode_id,distance_mm,velocity_mm_s,mic_index,ft_index,"
            "response_ms,ground_truth_contact_s\n";
  for (const auto& m : table.measurements) {
    events << m.episode_id << "," << m.distance_mm << "," << m.velocity_mm_s
           << ",";
    if (m.mic_event) events << m.mic_event->time_index;
    events << ",";
    if (m.ft_event) events << m.ft_event->time_index;
    events << ",";
    if (m.response_ms) events << *m.response_ms;
    events << "," << m.ground_truth_contact_s << "\n";
  }
  io::write_text_file(dir / "events.csv", events.str());

  if (!args.quiet) {
    std::cout << "response-time study written to " << dir.string() << "\n";
  }
}

void cmd_report(const ReportArgs& args) {
  std::ostringstream md;
  md << "# micarray run summary\n";

  // Velocity runs merge into one history-by-bin grid.
  std::map<double, json> velocity_rows;

  for (const auto& dir : args.run_dirs) {
    const fs::path report_path = fs::path(dir) / "report.json";
    const fs::path detect_path = fs::path(dir) / "response_time.json";
    if (fs::exists(report_path)) {
      const json report = json::parse(
          io::detail::read_file_bytes(report_path.string()));
      const std::string task = report.at("task").get<std::string>();
      md << "\n## " << task << " (" << dir << ")\n\n";
      if (task == "texture") {
        md << "| fold | held-out (mm/s) | accuracy |\n|---|---|---|\n";
        for (const auto& f : report.at("folds")) {
          md << "| " << f.at("fold") << " | "
             << (f.contains("held_out_velocity_mm_s")
                     ? f.at("held_out_velocity_mm_s").dump()
                     : "-")
             << " | " << f.at("accuracy") << " |\n";
        }
        md << "\nmean accuracy: " << report.at("mean_accuracy") << "\n";
      } else if (task == "localize") {
        md << "| fold | held-out | mean (mm) | median (mm) | baseline median "
              "(mm) |\n|---|---|---|---|---|\n";
        for (const auto& f : report.at("folds")) {
          md << "| " << f.at("fold") << " | "
             << (f.contains("held_out_velocity_mm_s")
                     ? f.at("held_out_velocity_mm_s").dump()
                     : "-")
             << " | " << f.at("mean_mm") << " | " << f.at("median_mm") << " | "
             << f.at("snr_baseline").at("median_mm") << " |\n";
        }
      } else if (task == "velocity") {
        const double history = report.at("history_s").get<double>();
        md << "history " << history << " s: per-bin median errors in the "
              "merged table below.\n";
        velocity_rows[history] = report;
      }
    } else if (fs::exists(detect_path)) {
      const json report =
          json::parse(io::detail::read_file_bytes(detect_path.string()));
      md << "\n## response time (" << dir << ")\n\n|  |";
      for (const auto& d : report.at("distances_mm")) md << " " << d << " mm |";
      md << "\n|---|";
      for (size_t i = 0; i < report.at("distances_mm").size(); ++i) md << "---|";
      md << "\n";
      size_t idx = 0;
      for (const auto& v : report.at("velocities_mm_s")) {
        md << "| " << v << " mm/s |";
        for (size_t d = 0; d < report.at("distances_mm").size(); ++d) {
          md << " " << report.at("cells")[idx++].at("formatted").get<std::string>()
             << " |";
        }
        md << "\n";
      }
    } else {
      md << "\n## " << dir << "\n\n(no report found)\n";
    }
  }

  if (!velocity_rows.empty()) {
    // History rows x 5 mm/s velocity bins, mean/median per cell.
    std::set<double> bins;
    for (const auto& [history, report] : velocity_rows) {
      for (const auto& f : report.at("folds")) {
        for (const auto& b : f.at("direct").at("bins")) {
          bins.insert(b.at("bin_mm_s").get<double>());
        }
      }
    }
    md << "\n## velocity error by history and bin (mean / median, mm/s)\n\n"
       << "| history (s) |";
    for (const double b : bins) md << " " << b << " |";
    md << "\n|---|";
    for (size_t i = 0; i < bins.size(); ++i) md << "---|";
    md << "\n";
    for (const auto& [history, report] : velocity_rows) {
      // Pool errors across folds per bin.
      std::map<double, std::pair<double, int64_t>> mean_acc;
      std::map<double, std::vector<double>> medians;
      for (const auto& f : report.at("folds")) {
        for (const auto& b : f.at("direct").at("bins")) {
          const double bin = b.at("bin_mm_s").get<double>();
          const int64_t n = b.at("count").get<int64_t>();
          mean_acc[bin].first += b.at("mean_mm_s").get<double>() * n;
          mean_acc[bin].second += n;
          medians[bin].push_back(b.at("median_mm_s").get<double>());
        }
      }
      md << "| " << history << " |";
      for (const double b : bins) {
        if (mean_acc.count(b)) {
          const double mean = mean_acc[b].first / mean_acc[b].second;
          md << " " << std::round(mean * 10) / 10 << " / "
             << std::round(pipeline::median(medians[b]) * 10) / 10 << " |";
        } else {
          md << " - |";
        }
      }
      md << "\n";
    }
  }

  const std::string out = args.out_path.empty() ? "summary.md" : args.out_path;
  io::write_text_file(out, md.str());
  if (!args.quiet) std::cout << "summary written to " << out << "\n";
}

}  // namespace micarray::cli
