#include "sensakit/mst.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <fcntl.h>
#include <unistd.h>

#include "sensakit/error.hpp"
#include "sensakit/rng.hpp"
#include "sensakit/stats.hpp"

namespace sensakit {

MstResult euclidean_mst(std::span<const double> x, std::span<const double> y) {
  return kernels::parallel::prim(x, y);
}

std::string_view to_string(BetaSample s) noexcept { return s == BetaSample::ranks ? "ranks" : "uniform"; }

std::optional<BetaSample> beta_sample_from_string(std::string_view s) noexcept {
  if (s == "uniform") return BetaSample::uniform;
  if (s == "ranks") return BetaSample::ranks;
  return std::nullopt;
}

MstCalibration estimate_beta(std::size_t n, std::size_t n_rep, std::uint64_t seed, BetaSample sample) {
  if (n < 2) throw Error(ErrorCode::invalid_argument, "beta calibration needs n >= 2");
  if (n_rep < 1) throw Error(ErrorCode::invalid_argument, "beta calibration needs at least one repetition");
  const Rng base(seed);
  std::vector<double> ratios(n_rep);
  const auto reps = static_cast<std::ptrdiff_t>(n_rep);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    Rng rng = base.split(static_cast<std::uint64_t>(r));
    std::vector<double> x(n);
    std::vector<double> y(n);
    if (sample == BetaSample::uniform) {
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform();
        y[i] = rng.uniform();
      }
    } else {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(perm));
      const double scale = static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = (static_cast<double>(i) + 0.5) / scale;
        y[i] = (static_cast<double>(perm[i]) + 0.5) / scale;
      }
    }
    ratios[static_cast<std::size_t>(r)] = euclidean_mst(x, y).total_length / std::sqrt(static_cast<double>(n));
  }
  double sum = 0.0;
  for (double v : ratios) sum += v;
  MstCalibration cal;
  cal.beta = sum / static_cast<double>(n_rep);
  cal.n = n;
  cal.n_rep = n_rep;
  cal.seed = seed;
  cal.sample = sample;
  return cal;
}

double renyi_entropy_half(std::span<const double> x, std::span<const double> y, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
  const double length = euclidean_mst(x, y).total_length;
  if (!(length > 0.0)) throw Error(ErrorCode::domain_error, "MST length is zero (all points coincide)");
  return 2.0 * std::log(length / (beta * std::sqrt(static_cast<double>(x.size()))));
}

std::vector<double> copula_transform(std::span<const double> v) {
  const auto rank = ordinal_ranks(v);
  const double n = static_cast<double>(v.size());
  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = (static_cast<double>(rank[i]) + 0.5) / n;
  return u;
}

SiEstimate si_mst(std::span<const double> xk, std::span<const double> y, const MstCalibration& cal) {
  const auto start = std::chrono::steady_clock::now();
  if (xk.size() != y.size()) throw Error(ErrorCode::length_mismatch, "si_mst: input and output lengths differ");
  if (cal.n != xk.size()) {
    throw Error(ErrorCode::calibration_mismatch, "beta calibrated at n=" + std::to_string(cal.n) +
                                                     " but the sample has n=" + std::to_string(xk.size()));
  }
  if (!(cal.beta > 0.0)) throw Error(ErrorCode::invalid_argument, "beta must be positive");
  SiEstimate e;
  e.method = Method::sample_mst;
  e.L = xk.size();
  e.N = xk.size();
  e.seed = cal.seed;
  if (is_constant(xk) || is_constant(y)) {
    e.value = 0.0;
  } else {
    const auto u = copula_transform(xk);
    const auto v = copula_transform(y);
    const double length = euclidean_mst(u, v).total_length;
    e.value = 2.0 - 2.0 * length / (cal.beta * std::sqrt(static_cast<double>(xk.size())));
  }
  e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return e;
}

BetaCache::BetaCache(std::filesystem::path file) : file_(std::move(file)) {
  if (std::filesystem::exists(*file_)) {
    for (const auto& cal : read_file(*file_)) entries_[{cal.n, cal.n_rep, cal.seed, cal.sample}] = cal;
  }
}

std::optional<MstCalibration> BetaCache::find(std::size_t n, std::size_t n_rep, std::uint64_t seed,
                                              BetaSample sample) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find({n, n_rep, seed, sample});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void BetaCache::insert(const MstCalibration& cal) {
  std::lock_guard lock(mutex_);
  const auto [it, inserted] = entries_.try_emplace({cal.n, cal.n_rep, cal.seed, cal.sample}, cal);
  if (inserted && file_) append_row(*file_, cal);
}

MstCalibration BetaCache::get(std::size_t n, std::size_t n_rep, std::uint64_t seed, BetaSample sample) {
  if (auto hit = find(n, n_rep, seed, sample)) return *hit;
  const MstCalibration cal = estimate_beta(n, n_rep, seed, sample);
  insert(cal);
  return cal;
}

std::size_t BetaCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<MstCalibration> BetaCache::read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::missing_file, "cannot open calibration cache '" + file.string() + "'");
  std::vector<MstCalibration> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#' || line.rfind("n,", 0) == 0) continue;
    std::istringstream row(line);
    MstCalibration cal;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
    std::string rest;
    const std::string where = file.string() + ":" + std::to_string(line_no);
    if (!(row >> cal.n >> c1 >> cal.d >> c2 >> cal.gamma >> c3 >> cal.n_rep >> c4 >> cal.seed >> c5 >> rest) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',') {
      throw Error(ErrorCode::parse_error, where + ": malformed calibration row");
    }
    const auto comma = rest.find(',');
    const std::string beta = rest.substr(0, comma);
    const auto res = std::from_chars(beta.data(), beta.data() + beta.size(), cal.beta);
    if (res.ec != std::errc() || res.ptr != beta.data() + beta.size() || !(cal.beta > 0.0)) {
      throw Error(ErrorCode::parse_error, where + ": bad beta value");
    }
    if (comma != std::string::npos) {
      const auto sample = beta_sample_from_string(rest.substr(comma + 1));
      if (!sample) throw Error(ErrorCode::parse_error, where + ": unknown calibration sample");
      cal.sample = *sample;
    }
    out.push_back(cal);
  }
  return out;
}

void BetaCache::append_row(const std::filesystem::path& file, const MstCalibration& cal) {
  char beta[64];
  const auto res = std::to_chars(beta, beta + sizeof beta, cal.beta);
  std::ostringstream row;
  row << cal.n << ',' << cal.d << ',' << cal.gamma << ',' << cal.n_rep << ',' << cal.seed << ','
      << std::string_view(beta, static_cast<std::size_t>(res.ptr - beta)) << ',' << to_string(cal.sample) << '\n';
  const std::string text = row.str();
  const int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw Error(ErrorCode::io_error, "cannot open '" + file.string() + "': " + std::strerror(errno));
  const ssize_t written = ::write(fd, text.data(), text.size());
  ::close(fd);
  if (written != static_cast<ssize_t>(text.size())) {
    throw Error(ErrorCode::io_error, "short write to '" + file.string() + "'");
  }
}

}  // namespace sensakit
