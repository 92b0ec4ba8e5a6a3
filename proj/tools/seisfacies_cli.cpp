// Command-line front end for the seisfacies toolkit.
//
//   seisfacies synth    generate a synthetic layered SEG-Y volume
//   seisfacies ingest   SEG-Y -> attributes -> z-scored chunked store
//   seisfacies train    fit K-means on a store, write a model
//   seisfacies predict  label every cell of a store with a model
//   seisfacies slice    render a section of a label volume as a PPM image
//   seisfacies bench    time fit() across k and worker counts

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <seisfacies/seisfacies.hpp>

namespace sf = seisfacies;

namespace {

void add_synth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic SEG-Y volume");
  auto spec = std::make_shared<sf::segy::SynthSpec>();
  auto out = std::make_shared<std::string>();
  auto ibm = std::make_shared<bool>(false);
  spec->geometry = {16, 16, 64};

  cmd->add_option("--out", *out, "Output SEG-Y path")->required();
  cmd->add_option("--inlines", spec->geometry.n_inline, "Inline count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--crosslines", spec->geometry.n_crossline,
                  "Crossline count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--samples", spec->geometry.n_sample, "Samples per trace")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--layers", spec->n_layers, "Number of layers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--peak-hz", spec->wavelet_peak_hz,
                  "Ricker wavelet peak frequency (Hz)");
  cmd->add_option("--noise-std", spec->noise_std,
                  "Gaussian noise standard deviation");
  cmd->add_option("--dt", spec->dt_s, "Sample interval (s)");
  cmd->add_option("--seed", spec->seed, "Random seed");
  cmd->add_flag("--ibm", *ibm, "Write IBM floats (format 1) instead of IEEE");

  cmd->callback([spec, out, ibm]() {
    const sf::segy::SeismicVolume volume = sf::segy::synth_volume(*spec);
    sf::segy::write_volume(volume, *out, *ibm ? 1 : 5);
    std::printf("wrote %s: %d x %d x %d, dt=%g s, %s floats\n", out->c_str(),
                volume.geometry.n_inline, volume.geometry.n_crossline,
                volume.geometry.n_sample, volume.dt_s,
                *ibm ? "IBM" : "IEEE");
  });
}

void add_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "ingest", "Compute attributes from SEG-Y and write a feature store");
  auto input = std::make_shared<std::string>();
  auto store_dir = std::make_shared<std::string>();
  auto window = std::make_shared<int>(sf::attributes::kDefaultWindowSamples);
  auto chunk_rows = std::make_shared<std::int64_t>(sf::store::kDefaultChunkRows);
  auto workers = std::make_shared<int>(0);

  cmd->add_option("--input", *input, "Input SEG-Y path")->required();
  cmd->add_option("--store", *store_dir, "Output store directory")->required();
  cmd->add_option("--window", *window,
                  "Reflection-intensity window (odd sample count)");
  cmd->add_option("--chunk-rows", *chunk_rows, "Rows per store chunk")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", *workers, "Worker threads (0 = all cores)");

  cmd->callback([input, store_dir, window, chunk_rows, workers]() {
    const sf::pipeline::IngestSummary s = sf::pipeline::run_ingest(
        *input, *store_dir, *window, *chunk_rows,
        sf::resolve_workers(*workers));
    std::printf(
        "ingested %s -> %s: %d x %d x %d, %" PRId64
        " rows x %d features, %d chunks, %.1f MiB, %.3f s\n",
        input->c_str(), store_dir->c_str(), s.geometry.n_inline,
        s.geometry.n_crossline, s.geometry.n_sample, s.n_rows, s.n_features,
        s.n_chunks, static_cast<double>(s.store_bytes) / (1024.0 * 1024.0),
        s.seconds);
  });
}

void add_train(CLI::App& app) {
  auto* cmd = app.add_subcommand("train", "Fit K-means on a feature store");
  auto store_dir = std::make_shared<std::string>();
  auto model_path = std::make_shared<std::string>();
  auto cfg = std::make_shared<sf::kmeans::KMeansConfig>();
  auto init_name = std::make_shared<std::string>("kmeanspp");
  auto workers = std::make_shared<int>(0);

  cmd->add_option("--store", *store_dir, "Feature store directory")
      ->required();
  cmd->add_option("--model", *model_path, "Output model path")->required();
  cmd->add_option("--k", cfg->k, "Number of clusters")
      ->check(CLI::Range(1, sf::kmeans::kMaxClusters));
  cmd->add_option("--tol", cfg->tol, "Relative objective tolerance");
  cmd->add_option("--max-iters", cfg->max_iters, "Iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg->seed, "Random seed");
  cmd->add_option("--init", *init_name, "Initialization: kmeanspp|random")
      ->check(CLI::IsMember({"kmeanspp", "random"}));
  cmd->add_option("--workers", *workers, "Worker threads (0 = all cores)");

  cmd->callback([store_dir, model_path, cfg, init_name, workers]() {
    cfg->init = sf::kmeans::parse_init_method(*init_name);
    const sf::pipeline::TrainSummary s = sf::pipeline::run_train(
        *store_dir, *model_path, *cfg, sf::resolve_workers(*workers));
    std::printf(
        "trained k=%d on %" PRId64 " rows: %d iterations, %s, objective "
        "%.6e, %" PRId64 " distance evals, %.3f s -> %s\n",
        s.model.centroids.k, s.model.n_rows, s.model.iterations_run,
        s.model.converged ? "converged" : "iteration cap reached",
        s.model.objective(), s.model.distance_evals, s.seconds,
        model_path->c_str());
    std::printf("objective history:");
    for (double e : s.model.objective_history) std::printf(" %.9e", e);
    std::printf("\n");
  });
}

void add_predict(CLI::App& app) {
  auto* cmd =
      app.add_subcommand("predict", "Label a feature store with a model");
  auto store_dir = std::make_shared<std::string>();
  auto model_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto workers = std::make_shared<int>(0);
  auto slice_il = std::make_shared<std::vector<int>>();
  auto slice_xl = std::make_shared<std::vector<int>>();

  cmd->add_option("--store", *store_dir, "Feature store directory")
      ->required();
  cmd->add_option("--model", *model_path, "Model path")->required();
  cmd->add_option("--out", *out, "Output label volume path")->required();
  cmd->add_option("--workers", *workers, "Worker threads (0 = all cores)");
  cmd->add_option("--slice-inline", *slice_il,
                  "Also render these inline sections as PPM images");
  cmd->add_option("--slice-crossline", *slice_xl,
                  "Also render these crossline sections as PPM images");

  cmd->callback([store_dir, model_path, out, workers, slice_il, slice_xl]() {
    const sf::pipeline::PredictSummary s = sf::pipeline::run_predict(
        *store_dir, *model_path, *out, sf::resolve_workers(*workers),
        *slice_il, *slice_xl);
    std::printf("labeled %" PRId64
                " cells (%d x %d x %d, k=%d) in %.3f s -> %s\n",
                s.n_rows, s.geometry.n_inline, s.geometry.n_crossline,
                s.geometry.n_sample, s.k, s.seconds, out->c_str());
    for (const auto& img : s.images) {
      std::printf("wrote %s\n", img.c_str());
    }
  });
}

void add_slice(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "slice", "Render a label-volume section as a P6 PPM image");
  auto input = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto axis_name = std::make_shared<std::string>("inline");
  auto index = std::make_shared<int>(0);

  cmd->add_option("--input", *input, "Label volume path")->required();
  cmd->add_option("--out", *out, "Output PPM path")->required();
  cmd->add_option("--axis", *axis_name, "Section axis: inline|crossline")
      ->check(CLI::IsMember({"inline", "crossline"}));
  cmd->add_option("--index", *index, "Zero-based section index");

  cmd->callback([input, out, axis_name, index]() {
    const sf::labels::LabelVolume volume = sf::labels::read_label_volume(*input);
    const auto axis = *axis_name == "inline"
                          ? sf::labels::SliceAxis::inline_axis
                          : sf::labels::SliceAxis::crossline_axis;
    sf::labels::export_slice_image(volume, axis, *index, *out);
    std::printf("wrote %s section %d of %s -> %s\n", axis_name->c_str(),
                *index, input->c_str(), out->c_str());
  });
}

void add_bench(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "bench", "Benchmark training across k and worker counts");
  auto store_dir = std::make_shared<std::string>();
  auto cfg = std::make_shared<sf::bench::BenchConfig>();
  auto out = std::make_shared<std::string>();
  cfg->worker_counts.clear();

  cmd->add_option("--store", *store_dir, "Feature store directory")
      ->required();
  cmd->add_option("--k-min", cfg->k_min, "Smallest cluster count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--k-max", cfg->k_max, "Largest cluster count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", cfg->worker_counts,
                  "Worker counts to compare (repeatable)")
      ->expected(-1);
  cmd->add_option("--reps", cfg->reps, "Repetitions per cell (median wins)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg->tol, "Relative objective tolerance");
  cmd->add_option("--max-iters", cfg->max_iters, "Iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg->seed, "Random seed");
  cmd->add_option("--out", *out, "Optional CSV output path");

  cmd->callback([store_dir, cfg, out]() {
    if (cfg->worker_counts.empty()) {
      cfg->worker_counts = {1, sf::resolve_workers(0)};
    }
    cfg->dataset_name = *store_dir;
    const std::vector<sf::bench::BenchRecord> records =
        sf::bench::run_bench(sf::store::open_store(*store_dir), *cfg);
    std::fputs(sf::bench::speedup_table_text(records).c_str(), stdout);
    if (!out->empty()) {
      std::ofstream csv(*out, std::ios::trunc);
      if (!csv) {
        sf::raise(sf::Errc::io_error, "cannot create " + *out);
      }
      csv << sf::bench::bench_records_csv(records);
      std::printf("wrote %s\n", out->c_str());
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Out-of-core seismic facies classification toolkit"};
  app.set_version_flag("--version", "seisfacies 1.0.0");
  app.require_subcommand(1);
  app.set_config("--config")->envname("SEISFACIES_CONFIG");

  add_synth(app);
  add_ingest(app);
  add_train(app);
  add_predict(app);
  add_slice(app);
  add_bench(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const sf::Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", sf::errc_name(e.code()),
                 e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
