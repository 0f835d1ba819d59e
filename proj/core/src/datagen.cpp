#include "sparsereg/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sparsereg/csv.hpp"

namespace sparsereg {

void SyntheticSpec::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("n and p must be positive");
  if (k_true < 1 || k_true > p) throw std::invalid_argument("k_true must lie in [1, p]");
  if (snr <= 0.0) throw std::invalid_argument("snr must be positive");
  if (covariance == CovarianceKind::Toeplitz && (rho < 0.0 || rho >= 1.0)) {
    throw std::invalid_argument("Toeplitz rho must lie in [0, 1)");
  }
  if (covariance == CovarianceKind::HardMi) {
    // theta must lie strictly inside (1/k, 1/sqrt(k)), which needs k >= 2,
    // and the coupled coordinate k_true+1 must exist.
    if (k_true < 2) throw std::invalid_argument("HardMi needs k_true >= 2");
    if (k_true + 1 > p) throw std::invalid_argument("HardMi needs k_true + 1 <= p");
  }
}

double hard_mi_theta(Eigen::Index k_true) {
  if (k_true < 2) throw std::invalid_argument("HardMi theta needs k_true >= 2");
  const double k = static_cast<double>(k_true);
  return 0.5 / k + 0.5 / std::sqrt(k);
}

Eigen::MatrixXd build_covariance(const SyntheticSpec& spec) {
  spec.validate();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(spec.p, spec.p);
  switch (spec.covariance) {
    case CovarianceKind::Identity:
      break;
    case CovarianceKind::Toeplitz:
      for (Eigen::Index i = 0; i < spec.p; ++i) {
        for (Eigen::Index j = 0; j < spec.p; ++j) {
          sigma(i, j) = std::pow(spec.rho, static_cast<double>(std::abs(i - j)));
        }
      }
      break;
    case CovarianceKind::HardMi: {
      const double theta = hard_mi_theta(spec.k_true);
      for (Eigen::Index j = 0; j < spec.k_true; ++j) {
        sigma(spec.k_true, j) = theta;
        sigma(j, spec.k_true) = theta;
      }
      break;
    }
  }
  return sigma;
}

namespace {

// One Gaussian row with the spec covariance, written through the
// closed-form Cholesky factor of each structure.
void sample_row(const SyntheticSpec& spec, Rng& rng, Eigen::VectorXd& row) {
  const Eigen::Index p = spec.p;
  switch (spec.covariance) {
    case CovarianceKind::Identity:
      for (Eigen::Index j = 0; j < p; ++j) row(j) = rng.normal();
      break;
    case CovarianceKind::Toeplitz: {
      // AR(1): x_0 = z_0, x_j = rho x_{j-1} + sqrt(1-rho^2) z_j gives
      // exactly Cov(x_i, x_j) = rho^|i-j|.
      const double c = std::sqrt(1.0 - spec.rho * spec.rho);
      row(0) = rng.normal();
      for (Eigen::Index j = 1; j < p; ++j) row(j) = spec.rho * row(j - 1) + c * rng.normal();
      break;
    }
    case CovarianceKind::HardMi: {
      const double theta = hard_mi_theta(spec.k_true);
      const Eigen::Index k = spec.k_true;
      for (Eigen::Index j = 0; j < p; ++j) row(j) = rng.normal();
      double head_sum = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) head_sum += row(j);
      row(k) = theta * head_sum + std::sqrt(1.0 - double(k) * theta * theta) * row(k);
      break;
    }
  }
}

Eigen::VectorXd sample_weights(const SyntheticSpec& spec, Rng& rng) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.p);
  switch (spec.weight_scheme) {
    case WeightScheme::SignedUnit: {
      // k_true positions uniformly at random, entries +-1.
      std::vector<Eigen::Index> idx(spec.p);
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      for (Eigen::Index j = 0; j < spec.k_true; ++j) {
        const auto pick = j + static_cast<Eigen::Index>(rng.below(std::uint64_t(spec.p - j)));
        std::swap(idx[j], idx[pick]);
        w(idx[j]) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      }
      break;
    }
    case WeightScheme::UniformOverRoot: {
      const double v = 1.0 / std::sqrt(static_cast<double>(spec.k_true));
      w.head(spec.k_true).setConstant(v);
      break;
    }
  }
  return w;
}

}  // namespace

Dataset sample_dataset(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  Dataset data;
  data.X.resize(spec.n, spec.p);
  Eigen::VectorXd row(spec.p);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    sample_row(spec, rng, row);
    data.X.row(i) = row.transpose();
  }

  const Eigen::VectorXd w = sample_weights(spec, rng);
  const Eigen::VectorXd signal = data.X * w;

  Eigen::VectorXd noise(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) noise(i) = rng.normal();
  // Rescale so ||X w|| / ||eps|| = sqrt(snr) holds exactly for this
  // realization, not merely in expectation.
  const double noise_norm = noise.norm();
  if (noise_norm > 0.0) {
    noise *= signal.norm() / (std::sqrt(spec.snr) * noise_norm);
  }

  data.Y = signal + noise;
  if (spec.task == Task::Classification) {
    for (Eigen::Index i = 0; i < spec.n; ++i) data.Y(i) = data.Y(i) >= 0.0 ? 1.0 : -1.0;
  }
  data.w_true = w;
  return data;
}

double realized_snr(const Dataset& data) {
  if (!data.w_true) throw std::invalid_argument("realized_snr requires ground truth");
  const Eigen::VectorXd signal = data.X * *data.w_true;
  const double noise_sq = (data.Y - signal).squaredNorm();
  if (noise_sq == 0.0) return std::numeric_limits<double>::infinity();
  return signal.squaredNorm() / noise_sq;
}

double realized_pve(const Dataset& data) {
  const double snr = realized_snr(data);
  return snr / (1.0 + snr);
}

void standardize_columns(Dataset& data) {
  const auto n = data.n();
  if (n < 2) throw std::invalid_argument("standardization needs at least 2 rows");
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    auto col = data.X.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double var = col.squaredNorm() / static_cast<double>(n);
    if (var <= 0.0) throw std::runtime_error("constant column cannot be standardized");
    col /= std::sqrt(var);
  }
  data.standardized = true;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

}  // namespace

Dataset ingest_matrix(std::istream& in, const IngestOptions& opts) {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  bool first = true;

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (first && opts.has_header) {
      double ignored;
      // Accept an all-numeric first row as data even when a header was
      // expected; files written by write_dataset_csv always have one.
      bool numeric = true;
      for (const auto& c : cells) numeric = numeric && parse_number(c, ignored);
      if (!numeric) {
        for (const auto& c : cells) header.push_back(trim(c));
        width = header.size();
        first = false;
        continue;
      }
    }
    first = false;
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw std::runtime_error("ragged row at line with " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(width));
    }
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (trim(cells[j]).empty()) throw std::runtime_error("missing value in column " + std::to_string(j));
      if (!parse_number(cells[j], row[j])) {
        throw std::runtime_error("non-numeric cell '" + cells[j] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no data rows");
  if (width < 2) throw std::runtime_error("need at least one feature and one response column");

  // Resolve the response column by name, then by 0-based index.
  std::size_t resp = width;  // sentinel
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == opts.response) resp = j;
    }
  }
  if (resp == width) {
    try {
      const long v = std::stol(opts.response);
      if (v >= 0 && static_cast<std::size_t>(v) < width) resp = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  if (resp == width) throw std::runtime_error("response column '" + opts.response + "' not found");

  Dataset data;
  data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  data.Y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Eigen::Index jj = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == resp) {
        data.Y(static_cast<Eigen::Index>(i)) = rows[i][j];
      } else {
        data.X(static_cast<Eigen::Index>(i), jj++) = rows[i][j];
      }
    }
  }
  if (!header.empty()) {
    for (std::size_t j = 0; j < width; ++j) {
      if (j != resp) data.column_names.push_back(header[j]);
    }
  }
  data.standardized = false;
  if (opts.standardize) standardize_columns(data);
  return data;
}

Dataset ingest_matrix(const std::filesystem::path& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return ingest_matrix(in, opts);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  if (!data.column_names.empty()) {
    for (const auto& name : data.column_names) {
      write_csv_field(out, name);
      out << ',';
    }
    out << "response\n";
  } else {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
    out << "response\n";
  }
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    for (Eigen::Index j = 0; j < data.p(); ++j) out << format_double(data.X(i, j)) << ',';
    out << format_double(data.Y(i)) << '\n';
  }
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset_csv(out, data);
}

Dataset take_rows(const Dataset& data, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > data.n()) {
    throw std::invalid_argument("row range out of bounds");
  }
  Dataset out;
  out.X = data.X.middleRows(begin, count);
  out.Y = data.Y.segment(begin, count);
  out.w_true = data.w_true;
  out.standardized = data.standardized;
  out.column_names = data.column_names;
  return out;
}

namespace {

Dataset take_index_rows(const Dataset& data, const std::vector<Eigen::Index>& idx) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(idx.size()), data.p());
  out.Y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = data.X.row(idx[i]);
    out.Y(static_cast<Eigen::Index>(i)) = data.Y(idx[i]);
  }
  out.w_true = data.w_true;
  out.standardized = data.standardized;
  out.column_names = data.column_names;
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> split_holdout(const Dataset& data, double holdout_fraction,
                                          std::uint64_t seed) {
  if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0) {
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(data.n()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  const auto n_hold = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(
      std::llround(holdout_fraction * static_cast<double>(data.n()))));
  std::vector<Eigen::Index> keep(idx.begin(), idx.end() - n_hold);
  std::vector<Eigen::Index> hold(idx.end() - n_hold, idx.end());
  std::sort(keep.begin(), keep.end());
  std::sort(hold.begin(), hold.end());
  return {take_index_rows(data, keep), take_index_rows(data, hold)};
}

std::pair<Dataset, Dataset> split_train_validation(const Dataset& data,
                                                   double validation_fraction) {
  if (validation_fraction <= 0.0 || validation_fraction >= 1.0) {
    throw std::invalid_argument("validation fraction must be in (0, 1)");
  }
  const auto n_valid = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(
      std::llround(validation_fraction * static_cast<double>(data.n()))));
  const auto n_train = data.n() - n_valid;
  if (n_train < 1) throw std::invalid_argument("split leaves no training rows");
  return {take_rows(data, 0, n_train), take_rows(data, n_train, n_valid)};
}

}  // namespace sparsereg
