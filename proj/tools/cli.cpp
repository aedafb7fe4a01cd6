#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "oarpost/anatomy.hpp"
#include "oarpost/error.hpp"
#include "oarpost/fusion.hpp"
#include "oarpost/metrics.hpp"
#include "oarpost/nrrd_io.hpp"
#include "oarpost/parallel.hpp"
#include "oarpost/params.hpp"
#include "oarpost/phantom.hpp"
#include "oarpost/preprocess.hpp"
#include "oarpost/train_support.hpp"

namespace oarpost::cli {
namespace fs = std::filesystem;

namespace {

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return parse_pipeline_config(read_file(path));
}

RegistryPtr load_registry(const std::string& spec) {
  if (spec == "default") return ClassRegistry::default_registry();
  return std::make_shared<const ClassRegistry>(ClassRegistry::parse(read_file(spec)));
}

Encoding encoding_of(bool gzip) { return gzip ? Encoding::Gzip : Encoding::Raw; }

struct PhantomArgs {
  std::uint64_t seed = 0;
  std::uint64_t corrupt_seed = 0;
  bool corrupt_seed_set = false;
  std::string out;
  std::string params;
  bool gzip = false;
};

void cmd_phantom(const PhantomArgs& a) {
  const auto cfg = load_config(a.params);
  const Phantom ph = generate_phantom(a.seed);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  const Encoding enc = encoding_of(a.gzip);
  write_volume(ph.intensities, dir / "intensity.nrrd", ScalarType::F32, enc);
  write_volume(ph.truth, dir / "truth.nrrd", enc);
  const auto corrupted = corrupt_prediction(ph.truth, a.corrupt_seed_set ? a.corrupt_seed : a.seed + 1,
                                            cfg.corruption);
  const char* names[3] = {"pred_axial.nrrd", "pred_coronal.nrrd", "pred_sagittal.nrrd"};
  for (int k = 0; k < 3; ++k) write_volume(corrupted.variants[k], dir / names[k], enc);
  std::ostringstream log;
  log << "class,kind,x,y,z,radius_mm,voxels,axial,coronal,sagittal\n";
  for (const auto& e : corrupted.log) {
    log << e.class_name << ',' << to_string(e.kind) << ',' << e.center.x << ',' << e.center.y << ','
        << e.center.z << ',' << e.radius_mm << ',' << e.voxels << ',' << e.variants[0] << ','
        << e.variants[1] << ',' << e.variants[2] << '\n';
  }
  write_file_atomic(dir / "corruption_log.csv", log.str());
  std::cout << "phantom written to " << dir.string() << " (" << corrupted.log.size()
            << " corruption events)\n";
}

void cmd_fuse(const std::string& axial, const std::string& coronal, const std::string& sagittal,
              const std::string& out, bool gzip) {
  const auto fused =
      fuse_multiclass(read_label_mask(axial), read_label_mask(coronal), read_label_mask(sagittal));
  write_volume(fused, out, encoding_of(gzip));
}

void cmd_postprocess(const std::string& pred, const std::string& intensity, const std::string& params,
                     const std::string& out, const std::string& sided_out, bool gzip) {
  const auto cfg = load_config(params);
  const auto result = postprocess_all(read_label_mask(pred), read_scalar_volume(intensity), cfg.postprocess);
  write_volume(result.labels, out, encoding_of(gzip));
  if (!sided_out.empty()) write_volume(result.sided, sided_out, encoding_of(gzip));
  for (const auto& n : result.nerves) {
    std::cout << "optic nerve " << to_string(n.side) << ": "
              << (n.reconstructed ? "reconstructed" : "kept fused prediction");
    if (n.landmarks) {
      const auto& l = *n.landmarks;
      std::cout << " eye_end=(" << l.eye_end.x << ',' << l.eye_end.y << ',' << l.eye_end.z << ") chiasm_end=("
                << l.chiasm_end.x << ',' << l.chiasm_end.y << ',' << l.chiasm_end.z << ')';
    }
    if (!n.note.empty()) std::cout << " [" << n.note << ']';
    std::cout << '\n';
  }
}

void cmd_metrics(const std::string& pred, const std::string& gt, const std::string& out) {
  const auto report = evaluate(read_label_mask(pred), read_label_mask(gt));
  write_file_atomic(out + ".txt", report.to_text());
  write_file_atomic(out + ".csv", report.to_csv());
  std::cout << report.to_text();
}

void cmd_mask_encode(const std::string& registry, const std::vector<std::string>& class_files,
                     const std::string& out, bool gzip) {
  const auto reg = load_registry(registry);
  std::map<std::string, BinaryMask> masks;
  for (const auto& item : class_files) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error("expected --class name=file, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    if (!masks.emplace(name, read_binary_mask(item.substr(eq + 1))).second) {
      throw Error("class given twice: " + name);
    }
  }
  if (masks.empty()) throw Error("no class masks given");
  write_volume(encode(masks, reg), out, encoding_of(gzip));
}

void cmd_mask_decode(const std::string& registry, const std::string& in, const std::vector<std::string>& names,
                     const std::string& out_dir, bool gzip) {
  const auto mask = read_label_mask(in);
  if (!registry.empty() && *load_registry(registry) != mask.registry()) throw Error("registry mismatch");
  fs::create_directories(out_dir);
  std::vector<std::string> wanted = names;
  if (wanted.empty()) {
    for (const auto& c : mask.registry().classes()) wanted.push_back(c.name);
  }
  for (const auto& name : wanted) {
    write_volume(decode(mask, name), fs::path(out_dir) / (name + ".nrrd"), encoding_of(gzip));
  }
}

void cmd_plan(const std::vector<std::string>& gts, std::size_t batch_size, const std::string& orientation,
              std::uint64_t seed, const std::string& out) {
  if (gts.empty()) throw Error("no ground truth given");
  Availability availability;
  RegistryPtr registry;
  for (const auto& path : gts) {
    const auto gt = read_label_mask(path);
    if (!registry) registry = gt.registry_ptr();
    else if (*registry != gt.registry()) throw Error("registry mismatch");
    const std::string image = fs::path(path).stem().string();
    for (auto& [name, boxes] : class_boxes(gt)) availability[name][image] = std::move(boxes);
  }
  const auto plan = build_batch_plan(*registry, availability, batch_size, parse_orientation(orientation), seed);
  write_file_atomic(out, plan.to_csv());
  std::cout << plan.entries.size() << " batch entries written to " << out << '\n';
}

void cmd_weights(const std::string& gt_path, const std::string& cls, const std::vector<std::string>& missing,
                 double t_c, const std::string& out) {
  const auto gt = read_label_mask(gt_path);
  std::map<std::string, BinaryMask> available;
  for (const auto& c : gt.registry().classes()) available.emplace(c.name, decode(gt, c.name));
  for (const auto& m : missing) {
    gt.registry().at(m);
    available.erase(m);
  }
  if (available.empty()) throw Error("every class marked missing");
  auto fields = reconstruct_labels(available, gt.registry());
  const auto it = fields.find(cls);
  if (it == fields.end()) throw Error("unknown class: " + cls);
  const auto batch = pixel_weights({it->second}, t_c);
  std::vector<float> w(batch.weights.front().begin(), batch.weights.front().end());
  write_volume(Volume3D(gt.geometry(), std::move(w)), out, ScalarType::F32);
  std::cout << "class " << cls << ": positive " << batch.n_positive << ", negative " << batch.n_negative
            << ", unknown " << batch.n_unknown << "; weights " << batch.positive_weight() << " / "
            << batch.negative_weight() << '\n';
  if (batch.positives_missing) std::cout << "warning: no positive pixels, positive mass dropped\n";
  if (batch.negatives_missing) std::cout << "warning: no negative pixels, negative mass dropped\n";
}

void cmd_preprocess(const std::string& in, const std::vector<double>& spacing, const std::vector<std::int64_t>& size,
                    double scale, const std::string& interp, const std::string& out, bool gzip) {
  const Interpolation mode = interp == "nearest" ? Interpolation::Nearest : Interpolation::Trilinear;
  Volume3D v = read_scalar_volume(in);
  v = resample(v, {spacing[0], spacing[1], spacing[2]}, mode);
  v = crop_or_pad(v, {size[0], size[1], size[2]});
  v = normalize_intensity(v, scale);
  write_volume(v, out, ScalarType::F32, encoding_of(gzip));
  const auto& g = v.geometry();
  std::cout << "sizes " << g.nx() << ' ' << g.ny() << ' ' << g.nz() << " spacing " << g.spacing[0] << ' '
            << g.spacing[1] << ' ' << g.spacing[2] << '\n';
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Organ-at-risk segmentation postprocessing and evaluation toolkit", "oarpost"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: OARPOST_THREADS or 1)");
  bool gzip = false;
  app.add_flag("--gzip", gzip, "Write gzip-encoded volumes");

  PhantomArgs ph;
  auto* phantom = app.add_subcommand("phantom", "Synthetic phantom, ground truth and corrupted triplet");
  phantom->add_option("--seed", ph.seed, "Phantom noise seed")->required();
  phantom->add_option("--corrupt-seed", ph.corrupt_seed, "Corruption seed (default: seed + 1)");
  phantom->add_option("--params", ph.params, "key = value parameter file");
  phantom->add_option("--out", ph.out, "Output directory")->required();

  std::string axial, coronal, sagittal, out;
  auto* fuse = app.add_subcommand("fuse", "Per-class majority vote of three orientation predictions");
  fuse->add_option("--axial", axial)->required();
  fuse->add_option("--coronal", coronal)->required();
  fuse->add_option("--sagittal", sagittal)->required();
  fuse->add_option("--out", out)->required();

  std::string pred, intensity, params, sided_out;
  auto* post = app.add_subcommand("postprocess", "Anatomical consistency and optic nerve reconstruction");
  post->add_option("--pred", pred, "Fused label volume")->required();
  post->add_option("--intensity", intensity, "Intensity volume")->required();
  post->add_option("--params", params, "key = value parameter file");
  post->add_option("--out", out)->required();
  post->add_option("--sided-out", sided_out, "Also write the left/right split labels");

  std::string gt;
  auto* metrics = app.add_subcommand("metrics", "Per-class overlap and distance report");
  metrics->add_option("--pred", pred)->required();
  metrics->add_option("--gt", gt)->required();
  metrics->add_option("--out", out, "Report path stem; writes <out>.txt and <out>.csv")->required();

  std::string registry;
  std::vector<std::string> classes;
  std::string in;
  auto* mask = app.add_subcommand("mask", "Multilabel codec");
  mask->require_subcommand(1);
  auto* enc = mask->add_subcommand("encode", "Binary masks to one label volume");
  enc->add_option("--registry", registry, "Registry file or 'default'")->required();
  enc->add_option("--class", classes, "name=file.nrrd, repeatable")->required();
  enc->add_option("--out", out)->required();
  auto* dec = mask->add_subcommand("decode", "Label volume to binary masks");
  dec->add_option("--registry", registry, "Expected registry file or 'default'");
  dec->add_option("--in", in)->required();
  dec->add_option("--class", classes, "Class to extract, repeatable (default: all)");
  dec->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> gts;
  std::size_t batch_size = 10;
  std::string orientation = "axial";
  std::uint64_t seed = 0;
  std::string cls;
  std::vector<std::string> missing;
  double t_c = 0.5;
  auto* trainprep = app.add_subcommand("trainprep", "Training support: batch plans and pixel weights");
  trainprep->require_subcommand(1);
  auto* plan = trainprep->add_subcommand("plan", "Patch-center batch plan");
  plan->add_option("--gt", gts, "Ground truth label volumes, repeatable")->required();
  plan->add_option("--batch-size", batch_size, "Batch size M")->capture_default_str();
  plan->add_option("--orientation", orientation)->check(CLI::IsMember({"axial", "coronal", "sagittal"}))
      ->capture_default_str();
  plan->add_option("--seed", seed)->required();
  plan->add_option("--out", out, "CSV output")->required();
  auto* weights = trainprep->add_subcommand("weights", "Adaptive pixel weights of one class");
  weights->add_option("--gt", in, "Ground truth label volume")->required();
  weights->add_option("--class", cls)->required();
  weights->add_option("--missing", missing, "Classes treated as not annotated, repeatable");
  weights->add_option("--t-c", t_c, "Target weight of the positives")->capture_default_str();
  weights->add_option("--seed", seed, "Unused; accepted for symmetry with plan");
  weights->add_option("--out", out, "f32 weight volume")->required();

  std::vector<double> spacing{0.7, 0.7, 0.9};
  std::vector<std::int64_t> size{320, 365, 200};
  double scale = kDefaultIntensityScale;
  std::string interp = "linear";
  auto* pre = app.add_subcommand("preprocess", "Resample, crop or pad, normalize");
  pre->add_option("--in", in)->required();
  pre->add_option("--spacing", spacing)->expected(3)->capture_default_str();
  pre->add_option("--size", size)->expected(3)->capture_default_str();
  pre->add_option("--scale", scale, "Output maximum")->capture_default_str();
  pre->add_option("--interp", interp)->check(CLI::IsMember({"linear", "nearest"}))->capture_default_str();
  pre->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    ph.corrupt_seed_set = phantom->count("--corrupt-seed") > 0;
    ph.gzip = gzip;
    if (phantom->parsed()) cmd_phantom(ph);
    else if (fuse->parsed()) cmd_fuse(axial, coronal, sagittal, out, gzip);
    else if (post->parsed()) cmd_postprocess(pred, intensity, params, out, sided_out, gzip);
    else if (metrics->parsed()) cmd_metrics(pred, gt, out);
    else if (enc->parsed()) cmd_mask_encode(registry, classes, out, gzip);
    else if (dec->parsed()) cmd_mask_decode(registry, in, classes, out, gzip);
    else if (plan->parsed()) cmd_plan(gts, batch_size, orientation, seed, out);
    else if (weights->parsed()) cmd_weights(in, cls, missing, t_c, out);
    else if (pre->parsed()) cmd_preprocess(in, spacing, size, scale, interp, out, gzip);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace oarpost::cli
