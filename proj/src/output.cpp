#include "evoclust/output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "evoclust/errors.hpp"

namespace evoclust {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw Error("cannot write " + path.string());
}

void CsvWriter::separator() {
  if (row_started_) out_ << ',';
  row_started_ = true;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
  separator();
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    out_ << text;
    return *this;
  }
  out_ << '"';
  for (char c : text) {
    if (c == '"') out_ << '"';
    out_ << c;
  }
  out_ << '"';
  return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_double(x))); }
CsvWriter& CsvWriter::cell(int x) { return cell(std::string_view(std::to_string(x))); }
CsvWriter& CsvWriter::cell(std::uint64_t x) { return cell(std::string_view(std::to_string(x))); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (const std::string& c : cells) cell(std::string_view(c));
  end_row();
}

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
  if (!out_) throw Error("write failed: " + path_.string());
}

std::string snapshot_name(double time) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "density_t%.6f.csv", time);
  return buf;
}

namespace {

const char* axis_name(int a) { return a == 0 ? "x" : "y"; }

int dim_of(const Trajectory& tr) {
  return tr.centroids.empty() || tr.centroids.front().empty() ? 1 : static_cast<int>(tr.centroids.front().front().size());
}

}  // namespace

void write_summary(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed) {
  const int d = dim_of(tr);
  CsvWriter csv(path);
  std::vector<std::string> header{"seed", "model", "step", "time", "component", "alpha"};
  for (int a = 0; a < d; ++a) header.push_back(std::string("mean_") + axis_name(a));
  for (int a = 0; a < d; ++a) header.push_back(std::string("var_") + axis_name(a));
  csv.row(header);
  for (std::size_t n = 0; n < tr.centroids.size(); ++n)
    for (std::size_t k = 0; k < tr.centroids[n].size(); ++k) {
      csv.cell(seed).cell(model_name(tr.model)).cell(static_cast<int>(n)).cell(tr.time(static_cast<int>(n)));
      csv.cell(static_cast<int>(k)).cell(tr.weights[n][k]);
      for (int a = 0; a < d; ++a) csv.cell(tr.centroids[n][k](a));
      for (int a = 0; a < d; ++a) csv.cell(tr.component_cov[n][k](a, a));
      csv.end_row();
    }
}

void write_alphas(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed) {
  const std::size_t K = tr.weights.empty() ? 0 : tr.weights.front().size();
  CsvWriter csv(path);
  std::vector<std::string> header{"seed", "model", "step", "time"};
  for (std::size_t k = 0; k < K; ++k) header.push_back("alpha_" + std::to_string(k));
  for (std::size_t k = 0; k < K; ++k) header.push_back("estep_alpha_" + std::to_string(k));
  csv.row(header);
  for (std::size_t n = 0; n < tr.weights.size(); ++n) {
    const int i = static_cast<int>(n);
    csv.cell(seed).cell(model_name(tr.model)).cell(i).cell(tr.time(i));
    for (double a : tr.weights[n]) csv.cell(a);
    const bool have_raw = tr.raw.contains(i);
    for (std::size_t k = 0; k < K; ++k) csv.cell(have_raw ? tr.raw.at(i).components[k].alpha : tr.weights[n][k]);
    csv.end_row();
  }
}

void write_metrics(const std::filesystem::path& path, const Trajectory& tr, const MetricSeries& m,
                   std::uint64_t seed) {
  const int d = dim_of(tr);
  const bool have_error = !m.centroid_error.empty();
  CsvWriter csv(path);
  std::vector<std::string> header{"seed", "model", "step", "time"};
  if (have_error) header.push_back("centroid_error_l1");
  header.insert(header.end(), {m.w1_approximate ? "w1_coarsened" : "w1", "mass_drift", "tv_alpha", "tv_centroids"});
  for (int a = 0; a < d; ++a) header.push_back(std::string("mixture_mean_") + axis_name(a));
  for (int a = 0; a < d; ++a) header.push_back(std::string("data_mean_") + axis_name(a));
  header.insert(header.end(), {"max_cfl", "substeps"});
  csv.row(header);
  double tv_alpha = 0.0, tv_centroids = 0.0;
  for (std::size_t n = 0; n < m.time.size(); ++n) {
    if (n > 0) {
      for (std::size_t k = 0; k < tr.weights[n].size(); ++k) {
        tv_alpha += std::abs(tr.weights[n][k] - tr.weights[n - 1][k]);
        tv_centroids += (tr.centroids[n][k] - tr.centroids[n - 1][k]).lpNorm<1>();
      }
    }
    csv.cell(seed).cell(model_name(tr.model)).cell(static_cast<int>(n)).cell(m.time[n]);
    if (have_error) csv.cell(m.centroid_error[n]);
    csv.cell(n < m.w1.size() ? m.w1[n] : std::nan("")).cell(m.mass_drift[n]).cell(tv_alpha).cell(tv_centroids);
    for (int a = 0; a < d; ++a) csv.cell(tr.mixture[n].mean(a));
    for (int a = 0; a < d; ++a) csv.cell(tr.data[n].mean(a));
    csv.cell(tr.diagnostics[n].max_cfl).cell(tr.diagnostics[n].substeps);
    csv.end_row();
  }
}

void write_residuals(const std::filesystem::path& path, const Trajectory& tr, std::uint64_t seed) {
  CsvWriter csv(path);
  csv.row({"seed", "model", "iteration", "residual", "damping"});
  for (std::size_t i = 0; i < tr.residuals.size(); ++i) {
    csv.cell(seed).cell(model_name(tr.model)).cell(static_cast<int>(i + 1)).cell(tr.residuals[i]);
    csv.cell(i < tr.damping.size() ? tr.damping[i] : 1.0);
    csv.end_row();
  }
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s, Model model, std::uint64_t seed) {
  const SpatialGrid& g = *s.data.grid;
  const int d = g.dim();
  CsvWriter csv(path);
  std::vector<std::string> header{"seed", "model", "step", "time"};
  for (int a = 0; a < d; ++a) header.push_back(axis_name(a));
  header.insert(header.end(), {"data", "mixture"});
  for (std::size_t k = 0; k < s.components.size(); ++k) header.push_back("m_" + std::to_string(k));
  csv.row(header);
  for (std::size_t i = 0; i < g.size(); ++i) {
    csv.cell(seed).cell(model_name(model)).cell(s.index).cell(s.time);
    const Vec x = g.barycenter(i);
    for (int a = 0; a < d; ++a) csv.cell(x(a));
    double mix = 0.0;
    for (std::size_t k = 0; k < s.components.size(); ++k) mix += s.weights[k] * s.components[k].values[i];
    csv.cell(s.data.values[i]).cell(mix);
    for (const DensityField& m : s.components) csv.cell(m.values[i]);
    csv.end_row();
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace evoclust
