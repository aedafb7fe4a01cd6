// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "oarpost/anatomy.hpp"
#include "oarpost/components.hpp"
#include "oarpost/fusion.hpp"
#include "oarpost/measure.hpp"
#include "oarpost/metrics.hpp"
#include "oarpost/nrrd_io.hpp"
#include "oarpost/phantom.hpp"
#include "oarpost/preprocess.hpp"
#include "oarpost/train_support.hpp"
#include "oracles.hpp"

using namespace oarpost;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("criterion %d [%s]: %s (%s)\n", id, title, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  return ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool rel_close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool criterion_centerline() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::int64_t> nx(2, 6), ny(2, 8), nz(2, 6);
  std::uniform_real_distribution<double> density(0.2, 0.9);
  NerveParams params;
  int grids = 0, mismatches = 0;
  double worst = 0.0, impl_time = 0.0;
  while (grids < 120) {
    const GridGeometry g({nx(rng), ny(rng), nz(rng)}, {0.7, 0.7, 0.9});
    const auto refined = oracle::random_mask(g, density(rng), rng);
    std::uniform_int_distribution<std::int64_t> ux(0, g.nx() - 1), uz(0, g.nz() - 1);
    NerveLandmarks lm;
    lm.eye_end = {ux(rng), 0, uz(rng)};
    lm.chiasm_end = {ux(rng), g.ny() - 1, uz(rng)};
    if (grids % 3 == 2) std::swap(lm.eye_end, lm.chiasm_end);
    const auto dy = g.ny() - 1;
    if (std::abs(lm.eye_end.x - lm.chiasm_end.x) > dy || std::abs(lm.eye_end.z - lm.chiasm_end.z) > dy) continue;
    params.radius_chiasm = 1.0 + double(grids % 3);
    params.radius_eye = params.radius_chiasm + double(grids % 4);
    const auto t0 = Clock::now();
    const auto path = shortest_centerline(refined, lm, params);
    impl_time += seconds_since(t0);
    const auto grid = build_cost_grid(refined, lm, params);
    const double expect = oracle::enumerate_min_cost(grid, lm.eye_end, lm.chiasm_end);
    const double diff = std::abs(path.total_cost - expect);
    worst = std::max(worst, diff);
    if (!(diff <= 1e-9)) ++mismatches;
    ++grids;
  }
  return report(1, "centerline optimality", mismatches == 0 && impl_time < 5.0,
                fmt("%d grids up to 6x8x6, %d mismatches, max |diff| %.3g, solver time %.3f s", grids, mismatches,
                    worst, impl_time));
}

bool criterion_metrics() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<std::int64_t> n(1, 12);
  std::uniform_real_distribution<double> density(0.02, 0.6);
  std::vector<std::string> failures;
  double impl_time = 0.0;
  int pairs = 0;
  for (; pairs < 220; ++pairs) {
    const GridGeometry g({n(rng), n(rng), n(rng)}, {0.7, 0.8, 0.9});
    auto a = oracle::random_mask(g, density(rng), rng), b = oracle::random_mask(g, density(rng), rng);
    std::uniform_int_distribution<std::size_t> any(0, g.voxel_count() - 1);
    a.set(any(rng));
    b.set(any(rng));
    const auto t0 = Clock::now();
    const double d = dice(a, b);
    const auto tol = tolerant_overlap(a, b);
    const double h = hausdorff(a, b);
    const double m = mean_distance(a, b);
    impl_time += seconds_since(t0);

    std::size_t inter = 0;
    for (std::size_t i = 0; i < a.size(); ++i) inter += a.test(i) && b.test(i);
    const double d_oracle = 2.0 * double(inter) / double(a.count() + b.count());
    const auto c = oracle::tolerant_counts(a, b);
    const bool counts_ok = tol.tp == c.tp && tol.fp == c.fp && tol.fn == c.fn && tol.tn == c.tn &&
                           tol.ignored_fp == c.ignored_fp && tol.ignored_fn == c.ignored_fn;
    if (!rel_close(d, d_oracle)) failures.push_back("dice");
    if (!counts_ok) failures.push_back("tolerant counts");
    if (!rel_close(h, oracle::hausdorff(a, b))) failures.push_back("hausdorff");
    if (!rel_close(m, oracle::mean_distance(a, b))) failures.push_back("mean distance");
  }
  return report(2, "metric oracle equivalence", failures.empty() && impl_time < 10.0,
                fmt("%d mask pairs up to 12^3, %zu mismatches%s%s, metric time %.3f s", pairs, failures.size(),
                    failures.empty() ? "" : ", first: ", failures.empty() ? "" : failures.front().c_str(),
                    impl_time));
}

bool criterion_weights() {
  std::mt19937_64 rng(3003);
  std::uniform_int_distribution<int> fields(1, 6), size(1, 400), label(-1, 1);
  std::uniform_real_distribution<double> tc(0.01, 0.99);
  int batches = 0, bad = 0;
  double worst = 0.0;
  while (batches < 150) {
    std::vector<TernaryLabelField> batch;
    const int k = fields(rng);
    for (int f = 0; f < k; ++f) {
      TernaryLabelField field;
      const int n = size(rng);
      field.geometry = GridGeometry({n, 1, 1}, {1, 1, 1});
      field.class_name = "c";
      for (int i = 0; i < n; ++i) field.labels.push_back(static_cast<TernaryLabel>(label(rng)));
      batch.push_back(std::move(field));
    }
    std::size_t pos = 0, neg = 0;
    for (const auto& f : batch) pos += f.count(TernaryLabel::Positive), neg += f.count(TernaryLabel::Negative);
    if (pos == 0 || neg == 0) continue;
    const double t = tc(rng);
    const auto w = pixel_weights(batch, t);
    std::vector<double> wp, wn;
    bool unknown_zero = true;
    for (std::size_t f = 0; f < batch.size(); ++f) {
      for (std::size_t i = 0; i < batch[f].labels.size(); ++i) {
        switch (batch[f].labels[i]) {
          case TernaryLabel::Positive: wp.push_back(w.weights[f][i]); break;
          case TernaryLabel::Negative: wn.push_back(w.weights[f][i]); break;
          case TernaryLabel::Unknown: unknown_zero = unknown_zero && w.weights[f][i] == 0.0; break;
        }
      }
    }
    const double ep = std::abs(oracle::exact_sum(wp) - t), en = std::abs(oracle::exact_sum(wn) - (1 - t));
    worst = std::max({worst, ep, en});
    if (ep > 1e-12 || en > 1e-12 || !unknown_zero) ++bad;
    ++batches;
  }
  return report(3, "weight-sum law", bad == 0,
                fmt("%d batches, %d violations, max sum error %.3g", batches, bad, worst));
}

bool criterion_codec() {
  std::mt19937_64 rng(4004);
  const auto reg = ClassRegistry::default_registry();
  std::uniform_int_distribution<std::int64_t> n(1, 10);
  std::uniform_real_distribution<double> density(0.0, 1.0);
  int codec_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const GridGeometry g({n(rng), n(rng), n(rng)}, {1, 1, 1});
    std::map<std::string, BinaryMask> masks;
    for (const auto& c : reg->classes()) masks.emplace(c.name, oracle::random_mask(g, density(rng), rng));
    const auto enc = encode(masks, reg);
    for (const auto& [name, m] : masks) codec_bad += decode(enc, name) == m ? 0 : 1;
  }

  const auto dir = fs::temp_directory_path() / ("oarpost_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int io_cases = 0, io_bad = 0;
  const GridGeometry g({13, 7, 5}, {0.7, 0.7, 0.9}, {-3.5, 2.25, 10.0});
  std::uniform_int_distribution<int> u8(0, 255), u16(0, 65535), i16(-32768, 32767);
  std::normal_distribution<float> f32(0.0F, 1000.0F);
  const std::pair<ScalarType, std::function<float()>> types[] = {
      {ScalarType::U8, [&] { return float(u8(rng)); }},
      {ScalarType::U16, [&] { return float(u16(rng)); }},
      {ScalarType::I16, [&] { return float(i16(rng)); }},
      {ScalarType::F32, [&] { return f32(rng); }}};
  for (const auto& [type, draw] : types) {
    Volume3D v(g);
    for (auto& x : v.values()) x = draw();
    for (auto enc : {Encoding::Raw, Encoding::Gzip}) {
      write_volume(v, dir / "v.nrrd", type, enc);
      ++io_cases;
      io_bad += read_scalar_volume(dir / "v.nrrd") == v ? 0 : 1;
    }
  }
  std::map<std::string, BinaryMask> masks;
  for (const auto& c : reg->classes()) masks.emplace(c.name, oracle::random_mask(g, 0.3, rng));
  const auto labels = encode(masks, reg);
  for (auto enc : {Encoding::Raw, Encoding::Gzip}) {
    write_volume(labels, dir / "l.nrrd", enc);
    ++io_cases;
    io_bad += read_label_mask(dir / "l.nrrd") == labels ? 0 : 1;
  }
  fs::remove_all(dir);
  return report(4, "codec and NRRD round trip", codec_bad == 0 && io_bad == 0,
                fmt("1000 random 8-class masks, %d class mismatches; %d NRRD cases, %d mismatches", codec_bad,
                    io_cases, io_bad));
}

struct PipelineRun {
  Phantom phantom;
  MultiLabelMask fused;
  PostprocessResult post;
};

PipelineRun run_pipeline(std::uint64_t seed) {
  PipelineRun r{generate_phantom(seed), {}, {}};
  const auto c = corrupt_prediction(r.phantom.truth, seed * 7919 + 1, CorruptionSpec::standard());
  r.fused = fuse_multiclass(c.variants[0], c.variants[1], c.variants[2]);
  r.post = postprocess_all(r.fused, r.phantom.intensities);
  return r;
}

bool criterion_consistency() {
  const auto t0 = Clock::now();
  const auto r = run_pipeline(5);
  const double elapsed = seconds_since(t0);
  std::vector<std::string> broken;

  const auto brain = decode(r.post.labels, "brain");
  if (connected_components_3d(brain).component_count() != 1) broken.push_back("brain components");
  for (int axis = 0; axis < 3; ++axis) {
    if (oracle::has_interior_2d_hole(brain, axis)) broken.push_back("brain 2D hole, normal axis " + std::to_string(axis));
  }
  const auto eye = decode(r.post.labels, "eye");
  if (!mask_minus(decode(r.post.labels, "lens"), eye).empty()) broken.push_back("lens outside eye");
  const auto eyes = connected_components_3d(eye);
  for (std::uint32_t id = 1; id <= eyes.component_count(); ++id) {
    if (physical_volume(eyes.component_mask(id)) < 4000.0) broken.push_back("eye component below 4000 mm^3");
  }
  const auto nerve_sides = split_left_right(decode(r.post.labels, "optic_nerve"), *bounding_box(brain));
  int rebuilt = 0;
  for (const auto& n : r.post.nerves) {
    if (!n.reconstructed || !n.landmarks) {
      broken.push_back(std::string("nerve not reconstructed: ") + n.note);
      continue;
    }
    ++rebuilt;
    const auto& m = nerve_sides.get(n.side);
    const auto cc = connected_components_3d(m);
    if (cc.component_count() != 1) broken.push_back(std::string(to_string(n.side)) + " nerve components");
    if (!m.test(n.landmarks->eye_end) || !m.test(n.landmarks->chiasm_end)) {
      broken.push_back(std::string(to_string(n.side)) + " nerve misses a landmark");
    }
  }
  if (rebuilt != 2) broken.push_back("expected two nerves");
  return report(5, "end-to-end phantom consistency", broken.empty() && elapsed < 60.0,
                fmt("160x180x100 phantom, %zu violations%s%s, %.2f s", broken.size(), broken.empty() ? "" : ", first: ",
                    broken.empty() ? "" : broken.front().c_str(), elapsed));
}

bool criterion_hausdorff() {
  const char* classes[] = {"eye", "optic_nerve", "optic_chiasm", "brain"};
  int lower[4] = {0, 0, 0, 0};
  int all_lower = 0;
  const int trials = 20;
  double mean_before[4] = {}, mean_after[4] = {};
  for (int t = 0; t < trials; ++t) {
    const auto r = run_pipeline(100 + std::uint64_t(t));
    bool all = true;
    for (int k = 0; k < 4; ++k) {
      const auto gt = decode(r.phantom.truth, classes[k]);
      const double before = hausdorff(decode(r.fused, classes[k]), gt);
      const double after = hausdorff(decode(r.post.labels, classes[k]), gt);
      mean_before[k] += before / trials;
      mean_after[k] += after / trials;
      if (after < before) ++lower[k];
      else all = false;
    }
    all_lower += all ? 1 : 0;
  }
  bool ok = true;
  std::string detail = fmt("%d seeds;", trials);
  for (int k = 0; k < 4; ++k) {
    ok = ok && lower[k] * 100 >= 95 * trials;
    detail += fmt(" %s %d/%d (%.1f -> %.1f mm)", classes[k], lower[k], trials, mean_before[k], mean_after[k]);
  }
  detail += fmt("; all four lower in %d/%d", all_lower, trials);
  return report(6, "Hausdorff reduction", ok, detail);
}

bool criterion_clean() {
  const auto p = generate_phantom(42);
  const auto post = postprocess_all(p.truth, p.intensities);
  double worst = 1.0;
  std::string worst_name;
  for (const auto& c : p.truth.registry().classes()) {
    const double d = dice(decode(post.labels, c.name), decode(p.truth, c.name));
    if (d < worst) worst = d, worst_name = c.name;
  }
  return report(7, "clean-input near-identity", worst >= 0.98,
                fmt("minimum Dice %.4f (%s), threshold 0.98", worst, worst_name.empty() ? "all 1.0" : worst_name.c_str()));
}

bool criterion_preprocess() {
  const GridGeometry g({224, 256, 120}, {1.0, 1.0, 1.5});
  Volume3D v(g);
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<float> u(0.0F, 2000.0F);
  for (auto& x : v.values()) x = u(rng);
  const double scale = 100.0;
  auto out = normalize_intensity(crop_or_pad(resample(v, {0.7, 0.7, 0.9}), {320, 365, 200}), scale);
  const auto dir = fs::temp_directory_path() / ("oarpost_acceptance_pre_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  write_volume(out, dir / "pre.nrrd");
  const auto text = read_file(dir / "pre.nrrd");
  const auto header = parse_header(text.substr(0, text.find("\n\n") + 1));
  fs::remove_all(dir);
  const bool geometry_ok = header.sizes == Sizes3{320, 365, 200} && header.spacing == Spacing3{0.7, 0.7, 0.9} &&
                           out.geometry().sizes == header.sizes;
  const float mx = *std::max_element(out.values().begin(), out.values().end());
  return report(8, "preprocessing contract", geometry_ok && mx == float(scale),
                fmt("header sizes %lld %lld %lld spacing %g %g %g, normalized max %.9g", (long long)header.sizes[0],
                    (long long)header.sizes[1], (long long)header.sizes[2], header.spacing[0], header.spacing[1],
                    header.spacing[2], double(mx)));
}

}  // namespace

int main() {
  const std::function<bool()> criteria[] = {criterion_centerline, criterion_metrics, criterion_weights,
                                            criterion_codec,      criterion_consistency, criterion_hausdorff,
                                            criterion_clean,      criterion_preprocess};
  int failed = 0;
  for (const auto& c : criteria) {
    try {
      failed += c() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("criterion raised an exception: %s\n", e.what());
      ++failed;
    }
  }
  std::printf("%d of 8 criteria passed\n", 8 - failed);
  return failed == 0 ? 0 : 1;
}
