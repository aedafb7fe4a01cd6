#include "oarpost/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "oarpost/distance.hpp"
#include "oarpost/error.hpp"
#include "oarpost/parallel.hpp"
#include "oarpost/simd.hpp"

namespace oarpost {

void OverlapStats::finalize() {
  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  dice = ratio(2.0 * double(tp), double(2 * tp + fp + fn));
  sensitivity = ratio(double(tp), double(tp + fn));
  specificity = ratio(double(tn), double(tn + fp));
  precision = ratio(double(tp), double(tp + fp));
}

double dice(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_grid(pred.geometry(), gt.geometry());
  const auto a = pred.count();
  const auto b = gt.count();
  if (a + b == 0) throw Error("undefined overlap");
  return 2.0 * double(simd::count_and(pred.bits(), gt.bits())) / double(a + b);
}

OverlapStats raw_overlap(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_grid(pred.geometry(), gt.geometry());
  OverlapStats s;
  s.tp = simd::count_and(pred.bits(), gt.bits());
  s.fp = pred.count() - s.tp;
  s.fn = gt.count() - s.tp;
  s.tn = pred.size() - s.tp - s.fp - s.fn;
  s.finalize();
  return s;
}

OverlapStats tolerant_overlap(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_grid(pred.geometry(), gt.geometry());
  if (gt.empty()) throw Error("empty ground truth");
  const auto& g = gt.geometry();
  auto any_neighbour = [&](const Index3& p, bool want_gt) {
    for (std::int64_t dz = -1; dz <= 1; ++dz) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          if (gt.test_clipped(p.x + dx, p.y + dy, p.z + dz) == want_gt) return true;
        }
      }
    }
    return false;
  };
  OverlapStats s;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool p = pred.test(i);
    const bool t = gt.test(i);
    if (p && t) {
      ++s.tp;
    } else if (!p && !t) {
      ++s.tn;
    } else if (p) {
      ++(any_neighbour(g.coords(i), true) ? s.ignored_fp : s.fp);
    } else {
      ++(any_neighbour(g.coords(i), false) ? s.ignored_fn : s.fn);
    }
  }
  s.finalize();
  return s;
}

SurfaceDistances nearest_distances(const BinaryMask& a, const BinaryMask& b) {
  if (a.empty() || b.empty()) throw Error("empty mask");
  return {nearest_feature_distances(a, b), nearest_feature_distances(b, a)};
}

double hausdorff(const BinaryMask& a, const BinaryMask& b) {
  const auto d = nearest_distances(a, b);
  return std::max(*std::max_element(d.a_to_b.begin(), d.a_to_b.end()),
                  *std::max_element(d.b_to_a.begin(), d.b_to_a.end()));
}

double mean_distance(const BinaryMask& a, const BinaryMask& b) {
  const auto d = nearest_distances(a, b);
  const double sum = std::accumulate(d.a_to_b.begin(), d.a_to_b.end(), 0.0) +
                     std::accumulate(d.b_to_a.begin(), d.b_to_a.end(), 0.0);
  return sum / double(d.a_to_b.size() + d.b_to_a.size());
}

const ClassMetrics* MetricsReport::find(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string MetricsReport::to_text() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %8s %8s %8s %8s %8s %10s %10s\n", "class", "dice", "tol_dice",
                "tol_sens", "tol_spec", "tol_prec", "hd_mm", "mean_mm");
  out << line;
  for (const auto& c : classes) {
    if (!c.scored()) {
      const char* flag = c.pred_empty && c.gt_empty ? "absent in both"
                         : c.gt_empty               ? "absent in ground truth"
                                                    : "absent in prediction";
      std::snprintf(line, sizeof line, "%-18s %s\n", c.name.c_str(), flag);
    } else {
      std::snprintf(line, sizeof line, "%-18s %8.4f %8.4f %8.4f %8.4f %8.4f %10.3f %10.3f\n", c.name.c_str(),
                    c.raw.dice, c.tolerant.dice, c.tolerant.sensitivity, c.tolerant.specificity,
                    c.tolerant.precision, c.hausdorff_mm, c.mean_distance_mm);
    }
    out << line;
  }
  return out.str();
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out << "class,metric,value\n";
  for (const auto& c : classes) {
    if (!c.scored()) {
      out << c.name << ",pred_empty," << (c.pred_empty ? 1 : 0) << '\n';
      out << c.name << ",gt_empty," << (c.gt_empty ? 1 : 0) << '\n';
      continue;
    }
    auto row = [&](const char* metric, const std::string& v) { out << c.name << ',' << metric << ',' << v << '\n'; };
    row("dice", fixed(c.raw.dice, 9));
    row("sensitivity", fixed(c.raw.sensitivity, 9));
    row("specificity", fixed(c.raw.specificity, 9));
    row("precision", fixed(c.raw.precision, 9));
    row("tolerant_dice", fixed(c.tolerant.dice, 9));
    row("tolerant_sensitivity", fixed(c.tolerant.sensitivity, 9));
    row("tolerant_specificity", fixed(c.tolerant.specificity, 9));
    row("tolerant_precision", fixed(c.tolerant.precision, 9));
    row("tp", std::to_string(c.raw.tp));
    row("fp", std::to_string(c.raw.fp));
    row("fn", std::to_string(c.raw.fn));
    row("ignored_fp", std::to_string(c.tolerant.ignored_fp));
    row("ignored_fn", std::to_string(c.tolerant.ignored_fn));
    row("hausdorff_mm", fixed(c.hausdorff_mm, 6));
    row("mean_distance_mm", fixed(c.mean_distance_mm, 6));
  }
  return out.str();
}

MetricsReport evaluate(const MultiLabelMask& pred, const MultiLabelMask& gt) {
  require_compatible(pred, gt);
  MetricsReport report;
  const auto& classes = gt.registry().classes();
  report.classes.resize(classes.size());
  parallel_for(classes.size(), [&](std::size_t k) {
    ClassMetrics& m = report.classes[k];
    m.name = classes[k].name;
    const BinaryMask p = decode(pred, m.name);
    const BinaryMask t = decode(gt, m.name);
    m.pred_empty = p.empty();
    m.gt_empty = t.empty();
    if (!m.scored()) return;
    m.raw = raw_overlap(p, t);
    m.tolerant = tolerant_overlap(p, t);
    m.hausdorff_mm = hausdorff(p, t);
    m.mean_distance_mm = mean_distance(p, t);
  });
  return report;
}

}  // namespace oarpost
