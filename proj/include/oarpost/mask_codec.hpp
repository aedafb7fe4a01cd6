#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "oarpost/volume.hpp"

namespace oarpost {

using LabelWord = std::uint16_t;
inline constexpr unsigned kLabelWordBits = 16;

struct ClassInfo {
  std::string name;
  unsigned bit = 0;
  bool bilateral = false;
  std::vector<std::string> parents;  // classes this one must lie inside

  LabelWord code() const { return static_cast<LabelWord>(1U << bit); }
  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

/// Ordered class table. Construction validates unique names and bits,
/// bit < 16, known parents and an acyclic containment graph.
class ClassRegistry {
public:
  ClassRegistry() = default;
  explicit ClassRegistry(std::vector<ClassInfo> classes);

  /// eye=0 lens=1 optic_nerve=2 optic_chiasm=3 pituitary=4 hippocampus=5
  /// brainstem=6 brain=7, with lens inside eye and brainstem inside brain.
  static std::shared_ptr<const ClassRegistry> default_registry();

  /// One "name bit bilateral parents" line per class; parents comma
  /// separated or "-". Lines starting with '#' are comments.
  static ClassRegistry parse(std::string_view text);
  std::string serialize() const;

  const std::vector<ClassInfo>& classes() const { return classes_; }
  std::size_t size() const { return classes_.size(); }
  const ClassInfo* find(std::string_view name) const;
  /// Throws Error("unknown class: <name>").
  const ClassInfo& at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  /// OR of all codes.
  LabelWord valid_bits() const;

  friend bool operator==(const ClassRegistry&, const ClassRegistry&) = default;

private:
  std::vector<ClassInfo> classes_;
};

using RegistryPtr = std::shared_ptr<const ClassRegistry>;

/// One 16-bit label word per voxel; bit k set means membership in the class
/// whose bit index is k. Classes are non-exclusive.
class MultiLabelMask {
public:
  MultiLabelMask() = default;
  MultiLabelMask(const GridGeometry& geometry, RegistryPtr registry);
  /// Throws Error on size mismatch or bits outside the registry.
  MultiLabelMask(const GridGeometry& geometry, RegistryPtr registry, std::vector<LabelWord> words);

  const GridGeometry& geometry() const { return geometry_; }
  const ClassRegistry& registry() const { return *registry_; }
  const RegistryPtr& registry_ptr() const { return registry_; }
  std::size_t size() const { return words_.size(); }

  LabelWord operator[](std::size_t i) const { return words_[i]; }
  LabelWord& operator[](std::size_t i) { return words_[i]; }
  std::span<const LabelWord> words() const { return words_; }
  std::span<LabelWord> words() { return words_; }

  friend bool operator==(const MultiLabelMask& a, const MultiLabelMask& b) {
    return a.geometry_ == b.geometry_ && a.words_ == b.words_ && *a.registry_ == *b.registry_;
  }

private:
  GridGeometry geometry_;
  RegistryPtr registry_;
  std::vector<LabelWord> words_;
};

/// word(v) = OR of the codes of the classes set at v. Throws Error on
/// unknown class names or mismatched geometry.
MultiLabelMask encode(const std::map<std::string, BinaryMask>& masks, RegistryPtr registry);

/// Bit set iff (word AND code) != 0. Throws Error on unknown class.
BinaryMask decode(const MultiLabelMask& mask, std::string_view class_name);

/// Names of classes with at least one set voxel.
std::set<std::string> present_classes(const MultiLabelMask& mask);

/// Throws Error("registry mismatch") unless both masks share a registry
/// (by content) and grid.
void require_compatible(const MultiLabelMask& a, const MultiLabelMask& b);

}  // namespace oarpost
