#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hng/types.hpp"

namespace hng {

enum class FileFormat { csv, binary };

std::string to_string(FileFormat format);
FileFormat format_from_string(const std::string& name);

// N x d features plus aligned integer labels in [0, class_count).
struct FeatureMatrix {
  Eigen::MatrixXd rows;
  std::vector<int> labels;
  int class_count = 0;
};

struct LoadedDataset {
  FeatureMatrix features;
  BinaryMatrix class_attrs;  // M x L
};

// Real-valued matrix I/O. CSV: comma-separated, no header, one row per
// line, 17 significant digits. Binary: magic HNGM, u32 version, u32 rows,
// u32 cols, u8 dtype tag, little-endian row-major payload.
Eigen::MatrixXd load_real_matrix(const std::filesystem::path& path,
                                 FileFormat format);
void save_real_matrix(const Eigen::MatrixXd& matrix,
                      const std::filesystem::path& path, FileFormat format);

// Binary {0,1} matrix I/O; a cell outside {0,1} is an error naming the cell.
BinaryMatrix load_binary_matrix(const std::filesystem::path& path,
                                FileFormat format);
void save_binary_matrix(const BinaryMatrix& matrix,
                        const std::filesystem::path& path, FileFormat format);

// Labels: one integer per line, always text.
std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<int>& labels,
                 const std::filesystem::path& path);

// Loads features, labels, and class attributes together and cross-checks
// dimensions: one label per feature row, every label within the attribute
// matrix's class count.
LoadedDataset load_dataset(const std::filesystem::path& feature_path,
                           const std::filesystem::path& label_path,
                           const std::filesystem::path& class_attr_path,
                           FileFormat format);

struct SyntheticSpec {
  int cluster_count = 1;
  int points_per_cluster = 1;
  int dimension = 1;
  double cluster_spread = 1.0;
  int attribute_count = 1;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  FeatureMatrix features;
  BinaryMatrix class_attrs;    // M x L, columns pairwise distinct
  BinaryMatrix ground_truth;   // M x N expanded per-sample attributes
  BinaryMatrix observed;       // ground_truth with noise_mask cells flipped
  std::vector<std::pair<int, int>> noise_mask;  // (attribute, sample), sorted
  Eigen::MatrixXd centers;     // L x d cluster centers
};

// Gaussian clusters around centers that are linear images of the class
// attribute signatures, rescaled so the closest pair of centers sits
// 6 * cluster_spread apart. floor(noise_rate * M * N) cells are flipped,
// sampled without replacement. Deterministic in spec.seed.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Noise mask CSV: header `attribute_index,sample_index`, one cell per row.
void save_noise_mask(const std::vector<std::pair<int, int>>& mask,
                     const std::filesystem::path& path);
std::vector<std::pair<int, int>> load_noise_mask(
    const std::filesystem::path& path);

}  // namespace hng
