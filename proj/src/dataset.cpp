#include "hng/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "hng/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

namespace hng {

namespace {

constexpr std::uint32_t kBinaryVersion = 1;
constexpr std::uint8_t kDtypeF64 = 0;
constexpr std::uint8_t kDtypeU8 = 1;
constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 28;
constexpr double kCenterSeparationFactor = 6.0;

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line,
                             const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

// Lines of the file with trailing blank lines dropped; an interior blank
// line is a parse error.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in = open_input(path, false);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].empty()) parse_fail(path, i + 1, "blank line inside data");
  if (lines.empty()) throw DataError("'" + path.string() + "' holds no data");
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& field, const std::filesystem::path& path,
                    std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  double value = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0'))
    parse_fail(path, line, "'" + field + "' is not a number");
  if (!std::isfinite(value))
    parse_fail(path, line, "'" + field + "' is not finite");
  return value;
}

long parse_long(const std::string& field, const std::filesystem::path& path,
                std::size_t line) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  long value = std::strtol(begin, &end, 10);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE)
    parse_fail(path, line, "'" + field + "' is not an integer");
  return value;
}

void write_u32(std::ofstream& out, std::uint32_t value) {
  unsigned char bytes[4] = {
      static_cast<unsigned char>(value & 0xff),
      static_cast<unsigned char>((value >> 8) & 0xff),
      static_cast<unsigned char>((value >> 16) & 0xff),
      static_cast<unsigned char>((value >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t read_u32(std::ifstream& in, const std::filesystem::path& path) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4))
    throw DataError("'" + path.string() + "' is truncated");
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

// Reads the HNGM header and returns (rows, cols) after checking the dtype tag.
std::pair<Eigen::Index, Eigen::Index> read_binary_header(
    std::ifstream& in, const std::filesystem::path& path,
    std::uint8_t expected_dtype) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "HNGM", 4) != 0)
    throw DataError("'" + path.string() + "' is not a binary matrix file");
  std::uint32_t version = read_u32(in, path);
  if (version != kBinaryVersion)
    throw DataError("'" + path.string() + "' has unsupported version " +
                    std::to_string(version));
  std::uint32_t rows = read_u32(in, path);
  std::uint32_t cols = read_u32(in, path);
  char dtype;
  if (!in.read(&dtype, 1)) throw DataError("'" + path.string() + "' is truncated");
  if (static_cast<std::uint8_t>(dtype) != expected_dtype)
    throw DataError("'" + path.string() + "' holds dtype tag " +
                    std::to_string(static_cast<int>(dtype)) + ", expected " +
                    std::to_string(static_cast<int>(expected_dtype)));
  if (rows == 0 || cols == 0)
    throw DataError("'" + path.string() + "' declares an empty matrix");
  if (static_cast<std::uint64_t>(rows) * cols > kMaxCells)
    throw DataError("'" + path.string() + "' declares an implausibly large matrix");
  return {static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

void write_binary_header(std::ofstream& out, const Eigen::Index rows,
                         const Eigen::Index cols, std::uint8_t dtype) {
  out.write("HNGM", 4);
  write_u32(out, kBinaryVersion);
  write_u32(out, static_cast<std::uint32_t>(rows));
  write_u32(out, static_cast<std::uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(&dtype), 1);
}

}  // namespace

std::string to_string(FileFormat format) {
  return format == FileFormat::csv ? "csv" : "binary";
}

FileFormat format_from_string(const std::string& name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "binary") return FileFormat::binary;
  throw InvalidInputError("unknown format '" + name + "' (expected csv or binary)");
}

Eigen::MatrixXd load_real_matrix(const std::filesystem::path& path,
                                 FileFormat format) {
  if (format == FileFormat::binary) {
    std::ifstream in = open_input(path, true);
    auto [rows, cols] = read_binary_header(in, path, kDtypeF64);
    Eigen::MatrixXd matrix(rows, cols);
    std::vector<double> row(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!in.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(sizeof(double) * row.size())))
        throw DataError("'" + path.string() + "' is truncated");
      for (Eigen::Index c = 0; c < cols; ++c) {
        double value = row[static_cast<std::size_t>(c)];
        if (!std::isfinite(value))
          throw DataError("'" + path.string() + "' row " + std::to_string(r) +
                          " col " + std::to_string(c) + ": non-finite value");
        matrix(r, c) = value;
      }
    }
    return matrix;
  }

  std::vector<std::string> lines = read_lines(path);
  const Eigen::Index rows = static_cast<Eigen::Index>(lines.size());
  Eigen::Index cols = 0;
  Eigen::MatrixXd matrix;
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::vector<std::string> fields = split_fields(lines[static_cast<std::size_t>(r)]);
    if (r == 0) {
      cols = static_cast<Eigen::Index>(fields.size());
      matrix.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(fields.size()) != cols) {
      parse_fail(path, static_cast<std::size_t>(r) + 1,
                 "expected " + std::to_string(cols) + " fields, got " +
                     std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c)
      matrix(r, c) = parse_double(fields[static_cast<std::size_t>(c)], path,
                                  static_cast<std::size_t>(r) + 1);
  }
  return matrix;
}

void save_real_matrix(const Eigen::MatrixXd& matrix,
                      const std::filesystem::path& path, FileFormat format) {
  if (matrix.rows() < 1 || matrix.cols() < 1)
    throw InvalidInputError("refusing to save an empty matrix");
  if (format == FileFormat::binary) {
    std::ofstream out = open_output(path, true);
    write_binary_header(out, matrix.rows(), matrix.cols(), kDtypeF64);
    std::vector<double> row(static_cast<std::size_t>(matrix.cols()));
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < matrix.cols(); ++c)
        row[static_cast<std::size_t>(c)] = matrix(r, c);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * row.size()));
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
    return;
  }

  std::ofstream out = open_output(path, false);
  char buf[32];
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", matrix(r, c));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

BinaryMatrix load_binary_matrix(const std::filesystem::path& path,
                                FileFormat format) {
  if (format == FileFormat::binary) {
    std::ifstream in = open_input(path, true);
    auto [rows, cols] = read_binary_header(in, path, kDtypeU8);
    BinaryMatrix matrix(rows, cols);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(cols));
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (!in.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(row.size())))
        throw DataError("'" + path.string() + "' is truncated");
      for (Eigen::Index c = 0; c < cols; ++c) {
        std::uint8_t value = row[static_cast<std::size_t>(c)];
        if (value > 1)
          throw DataError("'" + path.string() + "' row " + std::to_string(r) +
                          " col " + std::to_string(c) + ": value " +
                          std::to_string(static_cast<int>(value)) +
                          " is not binary (expected 0 or 1)");
        matrix(r, c) = value;
      }
    }
    return matrix;
  }

  std::vector<std::string> lines = read_lines(path);
  const Eigen::Index rows = static_cast<Eigen::Index>(lines.size());
  Eigen::Index cols = 0;
  BinaryMatrix matrix;
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::vector<std::string> fields = split_fields(lines[static_cast<std::size_t>(r)]);
    if (r == 0) {
      cols = static_cast<Eigen::Index>(fields.size());
      matrix.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(fields.size()) != cols) {
      parse_fail(path, static_cast<std::size_t>(r) + 1,
                 "expected " + std::to_string(cols) + " fields, got " +
                     std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      long value = parse_long(fields[static_cast<std::size_t>(c)], path,
                              static_cast<std::size_t>(r) + 1);
      if (value != 0 && value != 1)
        parse_fail(path, static_cast<std::size_t>(r) + 1,
                   "column " + std::to_string(c) + ": value " +
                       std::to_string(value) + " is not binary (expected 0 or 1)");
      matrix(r, c) = static_cast<std::uint8_t>(value);
    }
  }
  return matrix;
}

void save_binary_matrix(const BinaryMatrix& matrix,
                        const std::filesystem::path& path, FileFormat format) {
  if (matrix.rows() < 1 || matrix.cols() < 1)
    throw InvalidInputError("refusing to save an empty matrix");
  if ((matrix.array() > 1).any())
    throw InvalidInputError("matrix holds a value outside {0,1}");
  if (format == FileFormat::binary) {
    std::ofstream out = open_output(path, true);
    write_binary_header(out, matrix.rows(), matrix.cols(), kDtypeU8);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(matrix.cols()));
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < matrix.cols(); ++c)
        row[static_cast<std::size_t>(c)] = matrix(r, c);
      out.write(reinterpret_cast<const char*>(row.data()),
                static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
    return;
  }

  std::ofstream out = open_output(path, false);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << static_cast<int>(matrix(r, c));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<int> load_labels(const std::filesystem::path& path) {
  std::vector<std::string> lines = read_lines(path);
  std::vector<int> labels;
  labels.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    long value = parse_long(lines[i], path, i + 1);
    if (value < 0 || value > std::numeric_limits<int>::max())
      parse_fail(path, i + 1, "label " + std::to_string(value) + " out of range");
    labels.push_back(static_cast<int>(value));
  }
  return labels;
}

void save_labels(const std::vector<int>& labels,
                 const std::filesystem::path& path) {
  if (labels.empty()) throw InvalidInputError("refusing to save an empty label list");
  std::ofstream out = open_output(path, false);
  for (int label : labels) out << label << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

LoadedDataset load_dataset(const std::filesystem::path& feature_path,
                           const std::filesystem::path& label_path,
                           const std::filesystem::path& class_attr_path,
                           FileFormat format) {
  LoadedDataset data;
  data.features.rows = load_real_matrix(feature_path, format);
  data.features.labels = load_labels(label_path);
  data.class_attrs = load_binary_matrix(class_attr_path, format);

  const Eigen::Index n = data.features.rows.rows();
  if (static_cast<Eigen::Index>(data.features.labels.size()) != n)
    throw DataError("'" + label_path.string() + "' holds " +
                    std::to_string(data.features.labels.size()) +
                    " labels but '" + feature_path.string() + "' holds " +
                    std::to_string(n) + " rows");
  data.features.class_count = static_cast<int>(data.class_attrs.cols());
  for (std::size_t i = 0; i < data.features.labels.size(); ++i) {
    int label = data.features.labels[i];
    if (label >= data.features.class_count)
      throw DataError("label " + std::to_string(label) + " at '" +
                      label_path.string() + "':" + std::to_string(i + 1) +
                      " exceeds the " + std::to_string(data.features.class_count) +
                      " classes in '" + class_attr_path.string() + "'");
  }
  return data;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.cluster_count < 1 || spec.points_per_cluster < 1 ||
      spec.dimension < 1 || spec.attribute_count < 1)
    throw InvalidInputError("synthetic spec counts must all be >= 1");
  if (!(spec.cluster_spread > 0.0) || !std::isfinite(spec.cluster_spread))
    throw InvalidInputError("cluster_spread must be a positive real");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate <= 1.0))
    throw InvalidInputError("noise_rate must lie in [0, 1]");

  const int clusters = spec.cluster_count;
  const int per = spec.points_per_cluster;
  const int dim = spec.dimension;
  const int attr_count = spec.attribute_count;
  const Eigen::Index n = static_cast<Eigen::Index>(clusters) * per;

  if (attr_count < 63 &&
      static_cast<std::uint64_t>(clusters) > (std::uint64_t{1} << attr_count))
    throw DegenerateInputError(
        "only 2^" + std::to_string(attr_count) +
        " distinct attribute signatures exist for " + std::to_string(clusters) +
        " clusters; increase attribute_count");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> coin(0, 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticData data;

  // Draw order is fixed: signatures, then mixing matrix (re-drawn per retry),
  // then points, then the noise permutation.
  data.class_attrs.resize(attr_count, clusters);
  std::set<std::vector<std::uint8_t>> seen;
  const int signature_budget = 1000 * clusters;
  int draws = 0;
  for (int c = 0; c < clusters; ++c) {
    std::vector<std::uint8_t> column(static_cast<std::size_t>(attr_count));
    while (true) {
      if (++draws > signature_budget)
        throw DegenerateInputError(
            "could not draw distinct attribute signatures; increase attribute_count");
      for (int m = 0; m < attr_count; ++m)
        column[static_cast<std::size_t>(m)] = static_cast<std::uint8_t>(coin(rng));
      if (seen.insert(column).second) break;
    }
    for (int m = 0; m < attr_count; ++m)
      data.class_attrs(m, c) = column[static_cast<std::size_t>(m)];
  }

  // Centers are a random linear image of the centred signatures, so feature
  // geometry reflects attribute overlap. Rescaled so the closest center pair
  // sits exactly kCenterSeparationFactor * cluster_spread apart.
  Eigen::MatrixXd signatures =
      (data.class_attrs.cast<double>().array() - 0.5).matrix();  // M x L
  Eigen::MatrixXd centers;  // d x L while under construction
  const int max_attempts = 50;
  bool placed = false;
  for (int attempt = 0; attempt < max_attempts && !placed; ++attempt) {
    Eigen::MatrixXd mixing(dim, attr_count);
    for (Eigen::Index r = 0; r < mixing.rows(); ++r)
      for (Eigen::Index c = 0; c < mixing.cols(); ++c)
        mixing(r, c) = gauss(rng) / std::sqrt(static_cast<double>(attr_count));
    centers = mixing * signatures;
    if (clusters == 1) {
      placed = true;
      break;
    }
    double min_dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < clusters; ++a)
      for (int b = a + 1; b < clusters; ++b)
        min_dist = std::min(min_dist, (centers.col(a) - centers.col(b)).norm());
    double scale_floor = 1e-9 * (centers.colwise().norm().maxCoeff() + 1.0);
    if (min_dist > scale_floor) {
      centers *= kCenterSeparationFactor * spec.cluster_spread / min_dist;
      placed = true;
    }
  }
  if (!placed)
    throw DegenerateInputError(
        "cluster centers nearly coincide after " + std::to_string(max_attempts) +
        " attempts; increase dimension or attribute_count");

  data.centers = centers.transpose();  // L x d, row per cluster

  data.features.rows.resize(n, dim);
  data.features.labels.resize(static_cast<std::size_t>(n));
  data.features.class_count = clusters;
  Eigen::Index row = 0;
  for (int c = 0; c < clusters; ++c) {
    for (int i = 0; i < per; ++i, ++row) {
      data.features.labels[static_cast<std::size_t>(row)] = c;
      for (int k = 0; k < dim; ++k)
        data.features.rows(row, k) =
            centers(k, c) + spec.cluster_spread * gauss(rng);
    }
  }

  data.ground_truth.resize(attr_count, n);
  for (Eigen::Index s = 0; s < n; ++s)
    data.ground_truth.col(s) =
        data.class_attrs.col(data.features.labels[static_cast<std::size_t>(s)]);
  data.observed = data.ground_truth;

  // Flip count is the double-precision floor of noise_rate * M * N; cells are
  // drawn without replacement by a partial Fisher-Yates pass.
  const std::int64_t total = static_cast<std::int64_t>(attr_count) * n;
  const std::int64_t flips = static_cast<std::int64_t>(
      std::floor(spec.noise_rate * static_cast<double>(total)));
  std::vector<std::int64_t> cells(static_cast<std::size_t>(total));
  for (std::int64_t i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = i;
  for (std::int64_t t = 0; t < flips; ++t) {
    std::uniform_int_distribution<std::int64_t> pick(t, total - 1);
    std::swap(cells[static_cast<std::size_t>(t)],
              cells[static_cast<std::size_t>(pick(rng))]);
  }
  data.noise_mask.reserve(static_cast<std::size_t>(flips));
  for (std::int64_t t = 0; t < flips; ++t) {
    std::int64_t cell = cells[static_cast<std::size_t>(t)];
    int attr = static_cast<int>(cell / n);
    int sample = static_cast<int>(cell % n);
    data.noise_mask.emplace_back(attr, sample);
    data.observed(attr, sample) = static_cast<std::uint8_t>(
        1 - data.observed(attr, sample));
  }
  std::sort(data.noise_mask.begin(), data.noise_mask.end());
  return data;
}

void save_noise_mask(const std::vector<std::pair<int, int>>& mask,
                     const std::filesystem::path& path) {
  std::ofstream out = open_output(path, false);
  out << "attribute_index,sample_index\n";
  for (const auto& [attr, sample] : mask)
    out << attr << ',' << sample << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<std::pair<int, int>> load_noise_mask(
    const std::filesystem::path& path) {
  std::vector<std::string> lines = read_lines(path);
  if (lines[0] != "attribute_index,sample_index")
    parse_fail(path, 1, "expected header 'attribute_index,sample_index'");
  std::vector<std::pair<int, int>> mask;
  mask.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != 2) parse_fail(path, i + 1, "expected two fields");
    long attr = parse_long(fields[0], path, i + 1);
    long sample = parse_long(fields[1], path, i + 1);
    if (attr < 0 || sample < 0) parse_fail(path, i + 1, "negative index");
    mask.emplace_back(static_cast<int>(attr), static_cast<int>(sample));
  }
  std::sort(mask.begin(), mask.end());
  return mask;
}

}  // namespace hng
