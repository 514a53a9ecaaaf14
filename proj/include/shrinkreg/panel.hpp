#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace shrinkreg {

/// One unit (teacher, school, firm): repeated measurements of its latent
/// effect, a unit-level outcome, and optional cluster label and controls.
struct Unit {
  std::string id;
  std::vector<double> measurements;
  double outcome = 0.0;
  std::optional<std::string> cluster;
  std::vector<double> controls;

  std::size_t count() const noexcept { return measurements.size(); }

  bool operator==(const Unit&) const = default;
};

/// Immutable, validated collection of units.
///
/// Invariants enforced at construction: at least two units, unique ids,
/// nonempty finite measurements, finite outcomes and controls, and the same
/// number of controls on every unit. Cluster labels are all-or-nothing.
class PanelData {
 public:
  /// Throws DataError when any invariant is violated.
  explicit PanelData(std::vector<Unit> units);

  std::size_t size() const noexcept { return units_.size(); }
  std::span<const Unit> units() const noexcept { return units_; }
  const Unit& operator[](std::size_t i) const { return units_[i]; }

  std::size_t num_controls() const noexcept {
    return units_.front().controls.size();
  }
  bool has_clusters() const noexcept { return units_.front().cluster.has_value(); }

  /// Smallest J_i across units.
  std::size_t min_count() const noexcept;

  std::vector<double> outcomes() const;
  std::vector<std::string> cluster_labels() const;

  bool operator==(const PanelData&) const = default;

 private:
  std::vector<Unit> units_;
};

double mean(std::span<const double> xs);

/// X̄_i for every unit, in panel order.
std::vector<double> unit_means(const PanelData& panel);

/// Unweighted average of the unit means. Every shrinkage estimator uses
/// this as its target.
double grand_mean(const PanelData& panel);

/// Reads the long-format measurements CSV (`unit_id,x`) and the unit-level
/// outcomes CSV (`unit_id,y[,cluster][,c1,c2,...]`). Units are ordered by
/// first appearance in the outcomes file; measurements keep file order.
PanelData load_panel(const std::filesystem::path& measurements_path,
                     const std::filesystem::path& outcomes_path);

/// Writes the CSV pair read by load_panel. Numbers use round-trip precision.
void save_panel(const PanelData& panel,
                const std::filesystem::path& measurements_path,
                const std::filesystem::path& outcomes_path);

}  // namespace shrinkreg
